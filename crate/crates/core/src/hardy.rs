//! Weighted Hardy spaces `H²(m)` on the circle, `dm = w(θ) dθ/2π` with a
//! strictly positive trigonometric-polynomial density `w`.
//!
//! With `⟨f, g⟩_m = ∫ f ḡ dm` the monomial moments are
//! `⟨z^j, z^i⟩_m = ŵ(i − j)`. Orthonormal polynomials come from a Cholesky
//! factorization of that moment matrix.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::symbols::LaurentPoly;

/// Grid on which strict positivity of the density is enforced.
pub const POSITIVITY_GRID: usize = 1024;

/// Smallest density value accepted on the positivity grid.
pub const MIN_DENSITY: f64 = 1e-6;

/// Smallest Cholesky pivot before reporting a conditioning failure.
pub const MIN_PIVOT: f64 = 1e-12;

/// Residuals above this are flagged as non-Toeplitz.
pub const FLAG_TOL: f64 = 1e-10;

/// Probability measure `w(θ) dθ/2π`, stored by its Fourier coefficients
/// `ŵ(k)` for `k ≥ 0`; `ŵ(−k) = conj ŵ(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure {
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawCoeff {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    density: BTreeMap<String, RawCoeff>,
}

impl CircleMeasure {
    /// Builds the measure from `ŵ(0), ŵ(1), …`. `ŵ(0)` must be real and
    /// positive; coefficients are rescaled so that `ŵ(0) = 1`.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let Some(&w0) = coeffs.first() else {
            return Err(Error::Precondition("density needs ŵ(0)".into()));
        };
        if w0.im != 0.0 || w0.re <= 0.0 || coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Precondition(format!("ŵ(0) must be real and positive, got {w0}")));
        }
        let mut coeffs: Vec<C64> = coeffs.iter().map(|c| c / w0.re).collect();
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        let m = CircleMeasure { coeffs };
        let min = m.min_density(POSITIVITY_GRID);
        if min < MIN_DENSITY {
            return Err(Error::Precondition(format!(
                "density not strictly positive: minimum {min:.3e} on a {POSITIVITY_GRID}-point grid"
            )));
        }
        Ok(m)
    }

    /// Lebesgue measure, `w = 1`.
    pub fn uniform() -> Self {
        CircleMeasure { coeffs: vec![C64::new(1.0, 0.0)] }
    }

    /// `w = 1 + a cos θ`, for `|a| < 1`.
    pub fn cosine(a: f64) -> Result<Self> {
        Self::new(vec![C64::new(1.0, 0.0), C64::new(a / 2.0, 0.0)])
    }

    /// Random density of degree `k` with `Σ_{j≥1} 2|ŵ(j)| ≤ 0.9`.
    pub fn random<R: Rng>(rng: &mut R, k: usize) -> Self {
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        for _ in 0..k {
            let c = C64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..TAU));
            coeffs.push(c * (0.45 / k.max(1) as f64));
        }
        Self::new(coeffs).expect("dominant constant term keeps the density positive")
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `ŵ(k)` for any integer `k`.
    pub fn moment(&self, k: i64) -> C64 {
        let c = self.coeffs.get(k.unsigned_abs() as usize).copied().unwrap_or(ZERO);
        if k < 0 {
            c.conj()
        } else {
            c
        }
    }

    pub fn density(&self, theta: f64) -> f64 {
        let mut s = self.coeffs[0].re;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            s += 2.0 * (c * C64::from_polar(1.0, k as f64 * theta)).re;
        }
        s
    }

    pub fn min_density(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|i| self.density(TAU * i as f64 / grid as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// `M_{ij} = ŵ(i − j)` for `0 ≤ i, j ≤ d`.
    pub fn moment_matrix(&self, d: usize) -> CMatrix {
        CMatrix::from_fn(d + 1, d + 1, |i, j| self.moment(i as i64 - j as i64))
    }
}

impl Serialize for CircleMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let density = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let v = if c.im == 0.0 {
                    RawCoeff::Real(c.re)
                } else {
                    RawCoeff::Complex([c.re, c.im])
                };
                (k.to_string(), v)
            })
            .collect();
        RawMeasure { density }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircleMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawMeasure::deserialize(d)?;
        let mut coeffs = Vec::new();
        for (key, v) in raw.density {
            let k: usize = key
                .parse()
                .map_err(|_| D::Error::custom(format!("density index {key:?} must be a non-negative integer")))?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, ZERO);
            }
            coeffs[k] = match v {
                RawCoeff::Real(x) => C64::new(x, 0.0),
                RawCoeff::Complex([re, im]) => C64::new(re, im),
            };
        }
        CircleMeasure::new(coeffs).map_err(D::Error::custom)
    }
}

/// Orthonormal polynomials `p_i = Σ_k C_{ik} z^k` of `L²(m)`, `C` lower
/// triangular.
#[derive(Debug, Clone)]
pub struct HardyBasis {
    pub d: usize,
    pub coeffs: CMatrix,
}

impl HardyBasis {
    /// `⟨p_j, p_i⟩_m`.
    pub fn gram(&self, m: &CircleMeasure) -> CMatrix {
        let c = &self.coeffs;
        let mc = m.moment_matrix(self.d).matmul(&c.transpose()).expect("square");
        conj(c).matmul(&mc).expect("square")
    }
}

fn conj(a: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)].conj())
}

/// Lower Cholesky factor of a hermitian positive definite matrix.
fn cholesky(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    let mut l = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            if i == j {
                if s.re < MIN_PIVOT {
                    return Err(Error::Conditioning { degree: i, pivot: s.re });
                }
                l[(i, i)] = C64::new(s.re.sqrt(), 0.0);
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Inverse of a lower triangular matrix, row by row.
fn lower_inverse(l: &CMatrix) -> CMatrix {
    let n = l.rows();
    let mut inv = CMatrix::zeros(n, n);
    for i in 0..n {
        inv[(i, i)] = l[(i, i)].inv();
        for j in 0..i {
            let mut s = ZERO;
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Orthonormalizes `1, z, …, z^d` in `L²(m)`.
///
/// With `M = L L*`, the coefficient matrix is `C = conj(L⁻¹)`.
pub fn onb(m: &CircleMeasure, d: usize) -> Result<HardyBasis> {
    let l = cholesky(&m.moment_matrix(d))?;
    Ok(HardyBasis {
        d,
        coeffs: conj(&lower_inverse(&l)),
    })
}

fn max_abs_exp(phi: &LaurentPoly) -> usize {
    phi.terms().map(|(e, _)| e[0].unsigned_abs() as usize).max().unwrap_or(0)
}

/// `⟨φ z^k, z^l⟩_m = Σ_s φ̂(s) ŵ(l − k − s)` as an `(d+1) × (d+1)` matrix
/// indexed `(l, k)`.
fn monomial_matrix(phi: &LaurentPoly, m: &CircleMeasure, d: usize) -> CMatrix {
    let lo = phi.min_exp() as i64 - m.degree() as i64;
    let hi = phi.max_exp() as i64 + m.degree() as i64;
    let conv: Vec<C64> = (lo..=hi)
        .map(|t| phi.terms().map(|(e, c)| c * m.moment(t - e[0] as i64)).sum())
        .collect();
    CMatrix::from_fn(d + 1, d + 1, |l, k| {
        let t = l as i64 - k as i64;
        if t < lo || t > hi {
            ZERO
        } else {
            conv[(t - lo) as usize]
        }
    })
}

/// `⟨φ p_j, p_i⟩_m` for `0 ≤ i, j ≤ d`.
pub fn truncated_toeplitz(phi: &LaurentPoly, m: &CircleMeasure, d: usize) -> Result<CMatrix> {
    truncated_toeplitz_in(phi, m, &onb(m, d)?)
}

fn truncated_toeplitz_in(phi: &LaurentPoly, m: &CircleMeasure, basis: &HardyBasis) -> Result<CMatrix> {
    if phi.nvars() != 1 {
        return Err(Error::Precondition("symbol must have one variable".into()));
    }
    let band = max_abs_exp(phi);
    if 2 * band > basis.d {
        return Err(Error::Precondition(format!("symbol band {band} exceeds d/2 = {}", basis.d / 2)));
    }
    let a = monomial_matrix(phi, m, basis.d);
    let c = &basis.coeffs;
    conj(c).matmul(&a.matmul(&c.transpose())?)
}

/// `max |(T_z* X T_z − X)_{ij}|` over `i, j < window`.
///
/// `z p_j` lies in the span of `p_0, …, p_{j+1}`, so the sums run over
/// `a ≤ i + 1`, `b ≤ j + 1` only. Those entries do not depend on the
/// truncation degree.
fn window_residual(x: &CMatrix, tz: &CMatrix, window: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..window {
        for j in 0..window {
            let mut s = ZERO;
            for a in 0..=i + 1 {
                for b in 0..=j + 1 {
                    s += tz[(a, i)].conj() * x[(a, b)] * tz[(b, j)];
                }
            }
            worst = worst.max((s - x[(i, j)]).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct BrownHalmosReport {
    pub window: usize,
    /// `(d, residual)` in the order given.
    pub residuals: Vec<(usize, f64)>,
    pub nonincreasing: bool,
    /// Some residual exceeds the flag tolerance.
    pub flagged: bool,
}

impl BrownHalmosReport {
    fn from_residuals(window: usize, residuals: Vec<(usize, f64)>) -> Self {
        BrownHalmosReport {
            window,
            nonincreasing: residuals.windows(2).all(|w| w[1].1 <= w[0].1),
            flagged: residuals.iter().any(|r| r.1 > FLAG_TOL),
            residuals,
        }
    }
}

/// Brown–Halmos fixed-point residual of `X = T_φ` on `H²(m)` for each `d`.
pub fn brown_halmos_residual(
    phi: &LaurentPoly,
    m: &CircleMeasure,
    window: usize,
    degrees: &[usize],
) -> Result<BrownHalmosReport> {
    check_window(max_abs_exp(phi), window, degrees)?;
    let z = LaurentPoly::var(1, 0);
    let residuals = degrees
        .iter()
        .map(|&d| {
            let basis = onb(m, d)?;
            let x = truncated_toeplitz_in(phi, m, &basis)?;
            let tz = truncated_toeplitz_in(&z, m, &basis)?;
            Ok((d, window_residual(&x, &tz, window)))
        })
        .collect::<Result<_>>()?;
    Ok(BrownHalmosReport::from_residuals(window, residuals))
}

/// Same residual for an arbitrary operator `X`, given by its matrix in the
/// orthonormal basis (padded with zeros up to each `d`).
pub fn brown_halmos_residual_matrix(
    x: &CMatrix,
    m: &CircleMeasure,
    window: usize,
    degrees: &[usize],
) -> Result<BrownHalmosReport> {
    check_window(0, window, degrees)?;
    let z = LaurentPoly::var(1, 0);
    let residuals = degrees
        .iter()
        .map(|&d| {
            let tz = truncated_toeplitz(&z, m, d)?;
            Ok((d, window_residual(&x.resized(d + 1, d + 1), &tz, window)))
        })
        .collect::<Result<_>>()?;
    Ok(BrownHalmosReport::from_residuals(window, residuals))
}

fn check_window(band: usize, window: usize, degrees: &[usize]) -> Result<()> {
    let min = degrees.iter().copied().min().unwrap_or(0);
    if degrees.is_empty() || window + band >= min {
        return Err(Error::Precondition(format!(
            "window {window} + band {band} must be below every degree in {degrees:?}"
        )));
    }
    Ok(())
}

/// `max |(T_z* T_z − I)_{ij}|` over `i, j ≤ d − 2`: deviation of `T_z` from
/// an isometry on vectors of degree `≤ d − 2`.
pub fn interior_isometry_residual(m: &CircleMeasure, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Precondition("need d ≥ 2".into()));
    }
    let tz = truncated_toeplitz(&LaurentPoly::var(1, 0), m, d)?;
    let g = tz.adjoint().matmul(&tz)?;
    let mut worst: f64 = 0.0;
    for i in 0..d - 1 {
        for j in 0..d - 1 {
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - id).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::ToeplitzElement;
    use crate::random::trial_rng;

    #[test]
    fn uniform_gives_monomials() {
        let b = onb(&CircleMeasure::uniform(), 6).unwrap();
        assert_eq!(b.coeffs, CMatrix::identity(7));
    }

    #[test]
    fn cosine_weight_two_by_two() {
        // 1 + cos θ vanishes at θ = π, so strict positivity rejects it
        assert!(CircleMeasure::cosine(1.0).is_err());
        let m = CircleMeasure::cosine(0.9).unwrap();
        // Gram–Schmidt on {1, z}: p1 = (z − ⟨z,1⟩) / ‖z − ⟨z,1⟩‖
        let a = m.moment_matrix(1)[(0, 1)];
        assert_eq!(a, C64::new(0.45, 0.0));
        let norm = (1.0 - a.norm_sqr()).sqrt();
        let b = onb(&m, 1).unwrap();
        assert_eq!(b.coeffs[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(b.coeffs[(0, 1)], ZERO);
        assert!((b.coeffs[(1, 1)] - 1.0 / norm).norm() < 1e-15);
        assert!((b.coeffs[(1, 0)] + a / norm).norm() < 1e-15);
    }

    #[test]
    fn random_density_gram() {
        let mut rng = trial_rng(11, 0);
        for _ in 0..5 {
            let m = CircleMeasure::random(&mut rng, 4);
            let b = onb(&m, 20).unwrap();
            let g = b.gram(&m);
            assert!(g.sub(&CMatrix::identity(21)).unwrap().max_abs() <= 1e-10);
        }
    }

    #[test]
    fn nonpositive_density_rejected() {
        assert!(CircleMeasure::cosine(1.2).is_err());
        assert!(CircleMeasure::new(vec![C64::new(0.0, 1.0)]).is_err());
        assert!(CircleMeasure::new(vec![]).is_err());
    }

    #[test]
    fn uniform_reproduces_circle_truncations() {
        let phi = LaurentPoly::parse("(1+2i)*z^2 - 3*zbar + 0.5").unwrap();
        let t = truncated_toeplitz(&phi, &CircleMeasure::uniform(), 12).unwrap();
        let expect = ToeplitzElement::toeplitz(phi).unwrap().truncation(13);
        assert_eq!(t, expect);
        let one = truncated_toeplitz(&LaurentPoly::one(1), &CircleMeasure::cosine(0.8).unwrap(), 10).unwrap();
        assert!(one.sub(&CMatrix::identity(11)).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn shift_is_isometric_on_interior() {
        let m = CircleMeasure::cosine(0.8).unwrap();
        for d in [8, 32] {
            assert!(interior_isometry_residual(&m, d).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn hermitian_symbols_hermitian_matrices() {
        let m = CircleMeasure::random(&mut trial_rng(3, 1), 3);
        let phi = LaurentPoly::parse("z + zbar + (0+1i)*z^2 - (0+1i)*zbar^2").unwrap();
        let t = truncated_toeplitz(&phi, &m, 16).unwrap();
        assert!(t.hermitian_deviation() <= 1e-12);
    }

    #[test]
    fn residual_examples() {
        let phi = LaurentPoly::parse("z + zbar").unwrap();
        let r = brown_halmos_residual(&phi, &CircleMeasure::uniform(), 8, &[16, 32]).unwrap();
        assert!(r.residuals.iter().all(|x| x.1 <= 1e-12));

        let m = CircleMeasure::cosine(0.8).unwrap();
        let r = brown_halmos_residual(&phi, &m, 8, &[32, 64, 128]).unwrap();
        assert!(r.nonincreasing && !r.flagged, "{r:?}");

        let e00 = ToeplitzElement::unit(0, 0).truncation(1);
        let r = brown_halmos_residual_matrix(&e00, &CircleMeasure::uniform(), 4, &[16]).unwrap();
        assert_eq!(r.residuals[0].1, 1.0);
        assert!(r.flagged);
        assert!(brown_halmos_residual(&phi, &m, 40, &[32]).is_err());
    }

    #[test]
    fn json_config_form() {
        let m: CircleMeasure = serde_json::from_str(r#"{"density": {"0": 1.0, "1": [0.4, 0.0]}}"#).unwrap();
        assert_eq!(m.moment(-1), C64::new(0.4, 0.0));
        let back: CircleMeasure = serde_json::from_value(serde_json::to_value(&m).unwrap()).unwrap();
        assert_eq!(m, back);
        assert!(serde_json::from_str::<CircleMeasure>(r#"{"density": {"-1": 0.2, "0": 1.0}}"#).is_err());
        assert!(serde_json::from_str::<CircleMeasure>(r#"{"density": {"0": 1.0, "1": 0.6}}"#).is_err());
    }
}
