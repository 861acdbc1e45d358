//! Parse a Laurent polynomial, sample it on the circle and read off its
//! norm bracket, winding numbers and convex hull.

use sphiso::symbols::{self, Winding};
use sphiso::{LaurentPoly, Result, C64};

pub fn main() -> Result<()> {
    let phi = LaurentPoly::parse("z^2 + 0.5*zbar - 0.25i")?;
    println!("φ = {}", phi.to_text());
    println!("deg+ = {}, deg- = {}, band = {}", phi.deg_plus(), phi.deg_minus(), phi.band());

    let (lower, upper) = symbols::sup_norm(&phi, 1024);
    println!("‖φ‖∞ ∈ [{lower:.6}, {upper:.6}]");

    for lambda in [C64::new(0.0, 0.0), C64::new(0.3, 0.0), C64::new(3.0, 0.0)] {
        match symbols::winding(&phi, lambda, 1024)? {
            Winding::Number(n) => println!("wind(φ, {lambda}) = {n}"),
            Winding::OnCurve { distance, .. } => println!("{lambda} is within {distance:.2e} of φ(𝕋)"),
        }
    }

    let range = symbols::eval_grid(&phi, 256);
    let hull = symbols::conv_hull(&range.samples)?;
    println!("hull of 256 samples has {} vertices", hull.vertices().len());

    // two variables
    let psi = LaurentPoly::parse("z1*zbar2 + z2")?;
    println!("{} has {} variables, |ψ(1,1)| = {}", psi.to_text(), psi.nvars(), psi.eval_angles(&[0.0, 0.0]).norm());
    Ok(())
}
