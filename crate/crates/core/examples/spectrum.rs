//! Spectrum of a banded Toeplitz operator from winding numbers, with the
//! Hartman–Wintner and convex-hull inclusions and the numerical range.

use sphiso::circle::ToeplitzElement;
use sphiso::random::labelled_rng;
use sphiso::spectra::{self, Membership};
use sphiso::{LaurentPoly, Result};

pub fn main() -> Result<()> {
    let phi = LaurentPoly::parse("z^2 + 0.6*zbar")?;
    let mut rng = labelled_rng(3, "example.spectrum", 0);
    let report = spectra::spectrum_report(&phi, 512, 80, &mut rng)?;
    let count = |m: Membership| report.lambdas.iter().filter(|l| l.status == m).count();
    println!("symbol {}", report.symbol);
    println!(
        "{} grid points: {} winding nonzero, {} on curve, {} outside",
        report.lambdas.len(),
        count(Membership::WindingNonzero),
        count(Membership::OnCurve),
        count(Membership::Outside)
    );
    println!(
        "Hartman–Wintner {} ({} probes), convex bound {}",
        report.hartman_wintner, report.probes_tested, report.convex_bound
    );

    let x = ToeplitzElement::toeplitz(phi)?;
    let support = spectra::numerical_range_support(&x, &spectra::theta_grid(8), 256, 512)?;
    for (t, (h, b)) in support.thetas.iter().zip(support.values.iter().zip(&support.bounds)) {
        println!("θ = {t:.3}  h = {h:.6}  bound = {b:.6}");
    }
    let csv = report.to_csv();
    println!("csv: {} rows, header {:?}", csv.lines().count() - 1, csv.lines().next().unwrap_or(""));
    Ok(())
}
