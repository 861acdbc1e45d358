//! The Szegő tuple on the sphere: row isometry below the top shell, exact
//! moments and Toeplitz operators as fixed points of the CP map.

use sphiso::szego::{self, GradedOperator, SpherePoly};
use sphiso::Result;

pub fn main() -> Result<()> {
    let (n, d) = (2, 8);
    let tuple = szego::szego_tuple(n, d)?;
    let defect = szego::defect_report(&tuple)?;
    println!(
        "n = {n}, d = {d}: {} monomials, defect {:e} below the top shell, {} top-shell entries",
        tuple.basis().len(),
        defect.interior_max,
        defect.top_shell_size
    );
    println!("[T_i, T_j] residual {:e}", szego::commutator_residual(&tuple)?);

    for alpha in [[1u32, 0], [2, 1], [3, 3]] {
        println!("∫|z^{alpha:?}|² dσ = {}", szego::sphere_moment(n, &alpha)?);
    }

    let phi = SpherePoly::parse("z1*zbar2 + 2*z1^2 - 0.5", n)?;
    let x = szego::toeplitz_graded(&phi, n, d)?;
    let r = szego::fixed_point_residual(&x, &tuple)?;
    println!("T_φ: interior residual {:e}, boundary {:.3}", r.interior, r.boundary);

    let zero = vec![0u32; n];
    let e = GradedOperator::unit(tuple.basis(), &zero, &zero)?;
    let r = szego::fixed_point_residual(&x.add(&e)?, &tuple)?;
    println!("T_φ + E00: interior residual {:.3}", r.interior);

    let ext = szego::normal_extension_check(n, 4, &phi)?;
    println!("normal extension residuals {ext:?}");
    Ok(())
}
