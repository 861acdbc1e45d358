//! Tensor elements on the bidisc and the γ²-equation for the scaled
//! coordinate tuple.

use sphiso::circle::ToeplitzElement;
use sphiso::polydisc::{self, TensorElement};
use sphiso::{LaurentPoly, Result};

pub fn main() -> Result<()> {
    println!("γ = {}", polydisc::gamma(2)?);
    let s = polydisc::scaled_isometry_check(true)?;
    let u = polydisc::scaled_isometry_check(false)?;
    println!("scaled tuple residual {}, unscaled {}", s.residual, u.residual);

    let t = |src: &str| ToeplitzElement::toeplitz(LaurentPoly::parse(src).expect("valid symbol")).expect("one variable");
    let x = TensorElement::new(vec![(t("z + 2*zbar"), t("1 - z^2")), (t("zbar"), t("z"))]);
    let r = polydisc::gamma_equation_residual(&x, 32)?;
    println!("pure sum: residual zero {}, verdict {:?}", r.residual.is_zero(), r.verdict);

    let e = TensorElement::simple(ToeplitzElement::unit(0, 0), ToeplitzElement::identity());
    let r = polydisc::gamma_equation_residual(&e, 32)?;
    println!("E00 ⊗ I: bracket [{:.6}, {:.6}], verdict {:?}", r.norm_lower, r.norm_upper, r.verdict);

    let eq = polydisc::scaling_equivalence(&x.add(&e), 16);
    println!("scaling equivalence: {eq:?}");
    Ok(())
}
