//! Norm brackets from banded truncations: the cross section z + zbar and
//! the commutant of the shift.

use sphiso::circle::{self, ToeplitzElement};
use sphiso::{LaurentPoly, Result};

pub fn main() -> Result<()> {
    let phi = LaurentPoly::parse("z + zbar")?;
    let r = circle::cross_section_isometry(&[vec![phi]], 1024, 512, 1e-3)?;
    for (n, norm) in &r.truncation_norms {
        let exact = 2.0 * (std::f64::consts::PI / (*n as f64 + 1.0)).cos();
        println!("N = {n:>4}  ‖P_N T P_N‖ = {norm:.12}  2cos(π/(N+1)) = {exact:.12}");
    }
    println!("sup lower {:.6}, ℓ¹ upper {:.6}, verdict {:?}", r.sup_lower, r.l1_upper, r.verdict);

    for src in ["1 + 2*z - z^3", "z + zbar"] {
        let x = ToeplitzElement::toeplitz(LaurentPoly::parse(src)?)?;
        let c = circle::commutant_character(&x, 256, 512)?;
        print!("{src:<14} {:?}", c.class);
        if let Some(lift) = &c.lift {
            print!("  lift bracket [{:.6}, {:.6}]", lift.truncation_lower, lift.sup_bracket.1);
        }
        println!();
    }
    Ok(())
}
