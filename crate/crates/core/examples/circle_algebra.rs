//! Exact arithmetic in the class T_φ + F: products, adjoints, the symbol map
//! and the finite-rank semicommutator.

use sphiso::circle::{self, ToeplitzElement};
use sphiso::{CMatrix, LaurentPoly, Result, C64};

pub fn main() -> Result<()> {
    let phi = LaurentPoly::parse("z^2 + 2*zbar")?;
    let psi = LaurentPoly::parse("zbar^3 - z")?;

    let semi = circle::semicommutator(&phi, &psi)?;
    let (rows, cols) = semi.active_size();
    println!("T_φT_ψ − T_φψ: symbol {}, corner {rows}×{cols}", semi.symbol().to_text());
    println!("declared box {:?}", circle::semicommutator_box(&phi, &psi));
    println!("top-left corner:");
    let t = semi.truncation(rows.max(cols));
    for i in 0..t.rows() {
        let row: Vec<String> = (0..t.cols()).map(|j| format!("{:>5.1}", t[(i, j)].re)).collect();
        println!("  {}", row.join(" "));
    }

    let f = CMatrix::from_rows(&[
        vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
        vec![C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
    ])?;
    let x = ToeplitzElement::new(phi.clone(), f)?;
    let y = ToeplitzElement::toeplitz(psi.clone())?;
    let xy = x.mul(&y);
    println!("π(XY) = {}", xy.symbol_map().to_text());
    println!("π(X)π(Y) = {}", phi.mul(&psi).to_text());
    println!("‖(XY)* − Y*X*‖ = {:e}", xy.adjoint().max_difference(&y.adjoint().mul(&x.adjoint())));

    println!("X Toeplitz: {}, Y Toeplitz: {}", x.is_toeplitz(), y.is_toeplitz());
    println!("T_z* X T_z − X has rank {}", x.phi_map().sub(&x).correction_rank());
    println!("Φ(X) = T_{}", x.project_phi().symbol().to_text());
    Ok(())
}
