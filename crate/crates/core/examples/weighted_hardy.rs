//! Toeplitz operators on H²(m) for the density 1 + 0.8 cos θ.

use sphiso::hardy::{self, CircleMeasure};
use sphiso::{CMatrix, LaurentPoly, Result};

pub fn main() -> Result<()> {
    let m = CircleMeasure::cosine(0.8)?;
    println!("min density {:.3}", m.min_density(1024));

    let basis = hardy::onb(&m, 6)?;
    let gram_dev = basis.gram(&m).sub(&CMatrix::identity(7))?.max_abs();
    println!("orthonormal polynomials up to degree 6, Gram deviation {gram_dev:e}");

    for d in [16, 32, 64] {
        println!("d = {d:>3}: T_z isometry residual {:e}", hardy::interior_isometry_residual(&m, d)?);
    }

    let phi = LaurentPoly::parse("z + zbar")?;
    let bh = hardy::brown_halmos_residual(&phi, &m, 8, &[32, 64, 128])?;
    for (d, r) in &bh.residuals {
        println!("window residual at d = {d}: {r:e}");
    }
    println!("nonincreasing {}, flagged {}", bh.nonincreasing, bh.flagged);

    let t = hardy::truncated_toeplitz(&phi, &m, 4)?;
    println!("5×5 truncation of T_φ on H²(m), hermitian deviation {:e}", t.hermitian_deviation());
    Ok(())
}
