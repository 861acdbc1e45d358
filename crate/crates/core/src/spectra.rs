//! Spectra of banded Toeplitz operators on `H²(𝕋)`.
//!
//! For a Laurent polynomial `φ`, `λ ∈ σ(T_φ)` iff `λ` lies on `φ(𝕋)` or has
//! nonzero winding number with respect to it. Verdicts come from sampled
//! winding numbers and from numerical-range support functions of
//! truncations; no nonnormal eigensolver is involved.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::circle::ToeplitzElement;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::symbols::{eval_grid, ConvexHull, Curve, LaurentPoly, Winding};

/// Hull membership tolerance for points with certified nonzero winding.
pub const HULL_TOL: f64 = 1e-8;

/// Number of Hartman–Wintner probe points.
pub const PROBES: usize = 100;

/// Largest perturbation `|δ|` of a probe point `φ(x) + δ`.
pub const PROBE_RADIUS: f64 = 0.01;

/// Cap on the refined grid used to certify probe points.
pub const MAX_REFINED_GRID: usize = 1 << 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    OnCurve,
    WindingNonzero,
    Outside,
}

impl Membership {
    pub fn in_spectrum(self) -> bool {
        self != Membership::Outside
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Membership::OnCurve => "ON_CURVE",
            Membership::WindingNonzero => "WINDING_NONZERO",
            Membership::Outside => "OUTSIDE",
        }
    }
}

fn classify(curve: &Curve, lambda: C64) -> Membership {
    match curve.winding(lambda) {
        Winding::OnCurve { .. } => Membership::OnCurve,
        Winding::Number(0) => Membership::Outside,
        Winding::Number(_) => Membership::WindingNonzero,
    }
}

/// Membership of `λ` in `σ(T_φ)` from the curve sampled at `grid_size`
/// points.
pub fn spectrum_membership(phi: &LaurentPoly, lambda: C64, grid_size: usize) -> Result<Membership> {
    Ok(classify(&Curve::new(phi, grid_size)?, lambda))
}

/// Curves of `φ` at `base, 4·base, 16·base, …` up to [`MAX_REFINED_GRID`].
pub struct RefinedCurves {
    levels: Vec<Curve>,
}

impl RefinedCurves {
    pub fn new(phi: &LaurentPoly, base_grid: usize) -> Result<Self> {
        let mut levels = Vec::new();
        let mut g = base_grid.max(8);
        while g <= MAX_REFINED_GRID {
            levels.push(Curve::new(phi, g)?);
            g *= 4;
        }
        Ok(RefinedCurves { levels })
    }

    /// Membership on the coarsest level where `λ` is not within the curve
    /// tolerance, or `None` if there is no such level.
    pub fn certify(&self, lambda: C64) -> Option<Membership> {
        self.levels
            .iter()
            .map(|c| classify(c, lambda))
            .find(|&m| m != Membership::OnCurve)
    }
}

/// Membership decided on a grid fine enough that `λ` is not within the
/// curve tolerance, or `None` if no grid up to [`MAX_REFINED_GRID`] is.
pub fn certified_membership(phi: &LaurentPoly, lambda: C64, base_grid: usize) -> Result<Option<Membership>> {
    Ok(RefinedCurves::new(phi, base_grid)?.certify(lambda))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaStatus {
    pub lambda: C64,
    pub status: Membership,
}

#[derive(Debug, Clone, Serialize)]
pub struct HartmanWintner {
    pub grid_size: usize,
    /// Essential-range samples classified `OUTSIDE` (always empty).
    pub range_counterexamples: Vec<C64>,
    /// Probe points certified in the spectrum and classified `OUTSIDE` on
    /// the base grid.
    pub probe_counterexamples: Vec<C64>,
    pub probes_tested: usize,
    pub probes_uncertified: usize,
    pub pass: bool,
}

/// Essential range inside the spectrum, plus a probe near the curve.
///
/// Probe points `λ = φ(x) + δ`, `|δ| ≤ 0.01`, are certified on a refined
/// grid; those with nonzero winding must not be `OUTSIDE` on the base grid.
/// Sampling stops after [`PROBES`] certified spectral points or
/// `20 · PROBES` attempts.
pub fn hartman_wintner_check<R: Rng>(phi: &LaurentPoly, grid_size: usize, rng: &mut R) -> Result<HartmanWintner> {
    let curve = Curve::new(phi, grid_size)?;
    let range_counterexamples: Vec<C64> = curve
        .samples()
        .iter()
        .copied()
        .filter(|&x| !classify(&curve, x).in_spectrum())
        .collect();

    let refined = RefinedCurves::new(phi, grid_size)?;
    let mut probe_counterexamples = Vec::new();
    let mut tested = 0;
    let mut uncertified = 0;
    let mut attempts = 0;
    while tested < PROBES && attempts < 20 * PROBES {
        let batch: Vec<C64> = (0..PROBES)
            .map(|_| {
                let x: f64 = rng.random_range(0.0..TAU);
                let r = PROBE_RADIUS * rng.random_range(0.0..1.0f64).sqrt();
                phi.eval_angles(&[x]) + C64::from_polar(r, rng.random_range(0.0..TAU))
            })
            .collect();
        attempts += batch.len();
        let certified: Vec<Option<Membership>> = batch.par_iter().map(|&l| refined.certify(l)).collect();
        for (&l, c) in batch.iter().zip(&certified) {
            if tested == PROBES {
                break;
            }
            match c {
                None => uncertified += 1,
                Some(Membership::WindingNonzero) => {
                    tested += 1;
                    if !classify(&curve, l).in_spectrum() {
                        probe_counterexamples.push(l);
                    }
                }
                Some(_) => {}
            }
        }
    }
    let pass = range_counterexamples.is_empty() && probe_counterexamples.is_empty();
    Ok(HartmanWintner {
        grid_size,
        range_counterexamples,
        probe_counterexamples,
        probes_tested: tested,
        probes_uncertified: uncertified,
        pass,
    })
}

/// `n × n` grid over the bounding box of `samples` inflated by 20%.
pub fn lambda_grid(samples: &[C64], n: usize) -> Vec<C64> {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in samples {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    // degenerate boxes get a unit extent
    let wx = if x1 > x0 { x1 - x0 } else { 1.0 };
    let wy = if y1 > y0 { y1 - y0 } else { 1.0 };
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let (hx, hy) = (0.6 * wx, 0.6 * wy);
    let step = |k: usize| if n > 1 { k as f64 / (n - 1) as f64 } else { 0.5 };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(C64::new(cx - hx + 2.0 * hx * step(j), cy - hy + 2.0 * hy * step(i)));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexBound {
    pub statuses: Vec<LambdaStatus>,
    pub hull_vertices: Vec<C64>,
    pub counterexamples: Vec<C64>,
    pub pass: bool,
}

/// Every `λ` of the grid in the spectrum must lie in the convex hull of the
/// sampled essential range: within [`HULL_TOL`] for certified winding, and
/// within the curve tolerance for `ON_CURVE` points.
pub fn convex_bound_check(phi: &LaurentPoly, lambdas: &[C64], grid_size: usize) -> Result<ConvexBound> {
    let curve = Curve::new(phi, grid_size)?;
    let hull = ConvexHull::new(curve.samples())?;
    let statuses: Vec<LambdaStatus> = lambdas
        .par_iter()
        .map(|&lambda| LambdaStatus {
            lambda,
            status: classify(&curve, lambda),
        })
        .collect();
    let counterexamples: Vec<C64> = statuses
        .iter()
        .filter(|s| match s.status {
            Membership::Outside => false,
            Membership::WindingNonzero => !hull.contains(s.lambda, HULL_TOL),
            Membership::OnCurve => !hull.contains(s.lambda, curve.tolerance()),
        })
        .map(|s| s.lambda)
        .collect();
    Ok(ConvexBound {
        pass: counterexamples.is_empty(),
        statuses,
        hull_vertices: hull.vertices().to_vec(),
        counterexamples,
    })
}

/// Number of non-`ON_CURVE` verdicts among `lambdas` that change when the
/// grid is doubled.
pub fn winding_stability_violations(phi: &LaurentPoly, lambdas: &[C64], grid_size: usize) -> Result<usize> {
    let base = Curve::new(phi, grid_size)?;
    let fine = Curve::new(phi, 2 * grid_size)?;
    Ok(lambdas
        .par_iter()
        .filter(|&&l| {
            let a = classify(&base, l);
            a != Membership::OnCurve && classify(&fine, l) != a
        })
        .count())
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportFunction {
    pub thetas: Vec<f64>,
    /// `h(θ)` of the truncation.
    pub values: Vec<f64>,
    /// `sup_grid Re(e^{iθ} φ) + ‖F‖ + 1e−8`.
    pub bounds: Vec<f64>,
    pub within_bounds: bool,
}

impl SupportFunction {
    /// Whether `λ` satisfies `Re(e^{iθ} λ) ≤ h(θ) + tol` for every `θ`.
    pub fn contains(&self, lambda: C64, tol: f64) -> bool {
        self.thetas
            .iter()
            .zip(&self.values)
            .all(|(&t, &h)| (C64::from_polar(1.0, t) * lambda).re <= h + tol)
    }
}

/// Support function of the numerical range of the `trunc × trunc`
/// truncation of `X`, with its upper bound from the symbol.
pub fn numerical_range_support(
    x: &ToeplitzElement,
    thetas: &[f64],
    trunc: usize,
    grid_size: usize,
) -> Result<SupportFunction> {
    let (r, c) = x.active_size();
    let need = 4 * (x.symbol().band() + r.max(c));
    if trunc < need {
        return Err(Error::Precondition(format!("truncation {trunc} below 4·(band + correction size) = {need}")));
    }
    let band = x.truncation_band(trunc);
    let samples = eval_grid(x.symbol(), grid_size).samples;
    let corr = linalg::op_norm(x.correction(), 0.0)?;
    let values: Vec<f64> = thetas
        .par_iter()
        .map(|&t| linalg::max_rotated_real_part(&band, t))
        .collect();
    let bounds: Vec<f64> = thetas
        .iter()
        .map(|&t| {
            let rot = C64::from_polar(1.0, t);
            let sup = samples.iter().map(|s| (rot * s).re).fold(f64::NEG_INFINITY, f64::max);
            sup + corr + 1e-8
        })
        .collect();
    let within_bounds = values.iter().zip(&bounds).all(|(v, b)| v <= b);
    Ok(SupportFunction {
        thetas: thetas.to_vec(),
        values,
        bounds,
        within_bounds,
    })
}

/// `k` equally spaced angles in `[0, 2π)`.
pub fn theta_grid(k: usize) -> Vec<f64> {
    (0..k).map(|i| TAU * i as f64 / k as f64).collect()
}

/// Combined spectral evidence for one symbol.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub symbol: String,
    pub grid_size: usize,
    pub curve_tolerance: f64,
    pub ess_range: Vec<C64>,
    pub lambdas: Vec<LambdaStatus>,
    pub hull_vertices: Vec<C64>,
    pub hartman_wintner: bool,
    pub convex_bound: bool,
    pub hartman_wintner_counterexamples: Vec<C64>,
    pub convex_bound_counterexamples: Vec<C64>,
    pub probes_tested: usize,
}

/// Runs both inclusion checks for `φ` on an `n × n` λ grid.
pub fn spectrum_report<R: Rng>(phi: &LaurentPoly, grid_size: usize, n: usize, rng: &mut R) -> Result<SpectrumReport> {
    let curve = Curve::new(phi, grid_size)?;
    let hw = hartman_wintner_check(phi, grid_size, rng)?;
    let lambdas = lambda_grid(curve.samples(), n);
    let cb = convex_bound_check(phi, &lambdas, grid_size)?;
    let mut hw_cx = hw.range_counterexamples;
    hw_cx.extend(hw.probe_counterexamples);
    Ok(SpectrumReport {
        symbol: phi.to_text(),
        grid_size,
        curve_tolerance: curve.tolerance(),
        ess_range: curve.samples().to_vec(),
        lambdas: cb.statuses,
        hull_vertices: cb.hull_vertices,
        hartman_wintner: hw.pass,
        convex_bound: cb.pass,
        hartman_wintner_counterexamples: hw_cx,
        convex_bound_counterexamples: cb.counterexamples,
        probes_tested: hw.probes_tested,
    })
}

impl SpectrumReport {
    /// `lambda_re,lambda_im,status` rows for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_re,lambda_im,status\n");
        for s in &self.lambdas {
            out.push_str(&format!("{:?},{:?},{}\n", s.lambda.re, s.lambda.im, s.status.as_str()));
        }
        out
    }
}
