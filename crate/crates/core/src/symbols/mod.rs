//! Laurent polynomial symbols on the torus: evaluation grids, winding
//! numbers, sup-norm brackets and convex hulls of essential ranges.

mod hull;
mod text;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

pub use hull::ConvexHull;
pub use text::{ParsedPoly, ParsedTerm};

/// Default grid size for one-variable symbols.
pub const DEFAULT_GRID_1D: usize = 512;
/// Default grid size per axis for two-variable symbols.
pub const DEFAULT_GRID_2D: usize = 64;

/// Finitely supported coefficient map on `Z^nvars`.
///
/// Exponent `k < 0` in variable `j` stands for `zbar_j^{|k|}`, which agrees
/// with `z_j^{k}` on the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly {
    nvars: usize,
    coeffs: BTreeMap<Vec<i32>, C64>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, ONE)
    }

    pub fn monomial(exponent: Vec<i32>, c: C64) -> Self {
        let mut p = Self::zero(exponent.len());
        p.add_term(exponent, c);
        p
    }

    /// `z_j` (0-based `j`) in `nvars` variables.
    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::monomial(e, ONE)
    }

    /// One-variable polynomial `Σ c_k z^k` from `(k, c_k)` pairs.
    pub fn from_coeffs_1d(terms: impl IntoIterator<Item = (i32, C64)>) -> Self {
        let mut p = Self::zero(1);
        for (k, c) in terms {
            p.add_term(vec![k], c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<i32>, C64)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension(format!(
                    "exponent {e:?} for {nvars} variables"
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Precondition("non-finite coefficient".into()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exponent: Vec<i32>, c: C64) {
        debug_assert_eq!(exponent.len(), self.nvars);
        match self.coeffs.entry(exponent) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == ZERO {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                if c != ZERO {
                    slot.insert(c);
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exponent: &[i32]) -> C64 {
        self.coeffs.get(exponent).copied().unwrap_or(ZERO)
    }

    /// Fourier coefficient of a one-variable symbol.
    pub fn coeff1(&self, k: i64) -> C64 {
        debug_assert_eq!(self.nvars, 1);
        match i32::try_from(k) {
            Ok(k) => self.coeffs.get(&[k][..]).copied().unwrap_or(ZERO),
            Err(_) => ZERO,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], C64)> + '_ {
        self.coeffs.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    /// Largest exponent of a one-variable symbol (0 for the zero symbol).
    pub fn max_exp(&self) -> i32 {
        self.coeffs.keys().map(|e| e[0]).max().unwrap_or(0)
    }

    pub fn min_exp(&self) -> i32 {
        self.coeffs.keys().map(|e| e[0]).min().unwrap_or(0)
    }

    /// Number of nonzero subdiagonals of `T_φ`: `max(max_exp, 0)`.
    pub fn deg_plus(&self) -> usize {
        self.max_exp().max(0) as usize
    }

    /// Number of nonzero superdiagonals of `T_φ`: `max(-min_exp, 0)`.
    pub fn deg_minus(&self) -> usize {
        (-self.min_exp()).max(0) as usize
    }

    /// Largest `|k|_1` over the support.
    pub fn band(&self) -> usize {
        self.coeffs
            .keys()
            .map(|e| e.iter().map(|k| k.unsigned_abs() as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Largest `|k_j|` over all variables and the support.
    pub fn max_abs_exp(&self) -> usize {
        self.coeffs
            .keys()
            .flat_map(|e| e.iter().map(|k| k.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    pub fn is_analytic(&self) -> bool {
        self.coeffs.keys().all(|e| e.iter().all(|&k| k >= 0))
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, |s, x| s + x)
    }

    /// `Σ |k|_1 |c_k|`, a bound on the angular derivative along the torus.
    pub fn derivative_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(e, c)| e.iter().map(|k| k.unsigned_abs() as f64).sum::<f64>() * c.norm())
            .fold(0.0, |s, x| s + x)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, &c) in &self.coeffs {
            p.add_term(e.clone(), c * s);
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut p = self.clone();
        for (e, &c) in &other.coeffs {
            p.add_term(e.clone(), c);
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut acc: BTreeMap<Vec<i32>, C64> = BTreeMap::new();
        for (ea, &a) in &self.coeffs {
            for (eb, &b) in &other.coeffs {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert(ZERO) += a * b;
            }
        }
        acc.retain(|_, c| *c != ZERO);
        LaurentPoly {
            nvars: self.nvars,
            coeffs: acc,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut p = Self::one(self.nvars);
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }

    /// Torus conjugate: exponents negated, coefficients conjugated.
    pub fn conj(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e.iter().map(|k| -k).collect(), c.conj()))
                .collect(),
        }
    }

    /// Evaluate at an arbitrary point of `(C \ 0)^nvars` with negative powers
    /// taken literally.
    pub fn eval(&self, point: &[C64]) -> C64 {
        assert_eq!(point.len(), self.nvars);
        self.coeffs
            .iter()
            .map(|(e, &c)| {
                e.iter()
                    .zip(point)
                    .fold(c, |acc, (&k, &z)| acc * z.powi(k))
            })
            .sum()
    }

    /// Evaluate at `(e^{iθ_1}, …, e^{iθ_n})`.
    pub fn eval_angles(&self, theta: &[f64]) -> C64 {
        assert_eq!(theta.len(), self.nvars);
        self.coeffs
            .iter()
            .map(|(e, &c)| {
                let phase: f64 = e.iter().zip(theta).map(|(&k, t)| k as f64 * t).sum();
                c * C64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// Smallest grid satisfying `grid ≥ 4(1 + max|exponent|)`.
    pub fn min_grid(&self) -> usize {
        4 * (1 + self.max_abs_exp())
    }

    /// Text form, e.g. `2.5*z1^3*zbar2^1`; parses back to an identical value.
    pub fn to_text(&self) -> String {
        text::print(self)
    }

    pub fn parse(s: &str) -> Result<Self> {
        ParsedPoly::parse(s)?.to_laurent(None)
    }

    pub fn parse_nvars(s: &str, nvars: usize) -> Result<Self> {
        ParsedPoly::parse(s)?.to_laurent(Some(nvars))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Exponent keys are rendered as comma-separated integers, values as `[re, im]`.
impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.coeffs.len()))?;
        for (e, c) in &self.coeffs {
            let key = e.iter().map(i32::to_string).collect::<Vec<_>>().join(",");
            map.serialize_entry(&key, &[c.re, c.im])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw: BTreeMap<String, [f64; 2]> = BTreeMap::deserialize(d)?;
        let mut nvars = None;
        let mut terms = Vec::new();
        for (k, [re, im]) in raw {
            let e: Vec<i32> = k
                .split(',')
                .map(|t| t.trim().parse::<i32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|err| D::Error::custom(format!("bad exponent key {k:?}: {err}")))?;
            if *nvars.get_or_insert(e.len()) != e.len() {
                return Err(D::Error::custom("inconsistent exponent lengths"));
            }
            terms.push((e, C64::new(re, im)));
        }
        LaurentPoly::from_terms(nvars.unwrap_or(1), terms).map_err(D::Error::custom)
    }
}

/// Table of `e^{2πi r/g}`, `r = 0..g`.
fn roots_of_unity(g: usize) -> Vec<C64> {
    (0..g)
        .map(|r| C64::from_polar(1.0, 2.0 * PI * r as f64 / g as f64))
        .collect()
}

/// Samples of a symbol on the equispaced grid of `T^nvars`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssRange {
    pub nvars: usize,
    pub grid_size: usize,
    /// Row-major over the axes: index `m_1 g^{n-1} + … + m_n`.
    pub samples: Vec<C64>,
}

/// Samples `φ` at the points `(e^{2πi m_1/g}, …)`.
///
/// Phases are reduced modulo `g` before lookup, so grid values are exact
/// functions of the integer grid index.
pub fn eval_grid(phi: &LaurentPoly, grid_size: usize) -> EssRange {
    let g = grid_size.max(1);
    let n = phi.nvars();
    let table = roots_of_unity(g);
    let total = g.pow(n as u32);
    let terms: Vec<(&[i32], C64)> = phi.terms().collect();
    let mut samples = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let mut v = ZERO;
        for (e, c) in &terms {
            let mut r: i64 = 0;
            for (k, m) in e.iter().zip(&idx) {
                r += *k as i64 * *m as i64;
            }
            v += c * table[r.rem_euclid(g as i64) as usize];
        }
        samples.push(v);
        for axis in (0..n).rev() {
            idx[axis] += 1;
            if idx[axis] < g {
                break;
            }
            idx[axis] = 0;
        }
    }
    EssRange {
        nvars: n,
        grid_size: g,
        samples,
    }
}

/// Lower bound `max_grid |φ|` and upper bound `Σ|c_k|` for `‖φ‖_∞`.
pub fn sup_norm(phi: &LaurentPoly, grid_size: usize) -> (f64, f64) {
    let lower = eval_grid(phi, grid_size)
        .samples
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    (lower, phi.l1_norm())
}

/// Outcome of a winding-number evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Winding {
    Number(i64),
    /// `λ` is too close to the sampled curve for the count to be certified.
    OnCurve { distance: f64, tolerance: f64 },
}

impl Winding {
    pub fn number(self) -> Option<i64> {
        match self {
            Winding::Number(n) => Some(n),
            Winding::OnCurve { .. } => None,
        }
    }
}

/// Sampled closed curve `θ ↦ φ(e^{iθ})` of a one-variable symbol.
#[derive(Debug, Clone)]
pub struct Curve {
    samples: Vec<C64>,
    tolerance: f64,
    bbox: (f64, f64, f64, f64),
    l1: f64,
}

impl Curve {
    pub fn new(phi: &LaurentPoly, grid_size: usize) -> Result<Self> {
        if phi.nvars() != 1 {
            return Err(Error::Precondition(format!(
                "winding needs a one-variable symbol, got {}",
                phi.nvars()
            )));
        }
        let g = grid_size.max(3);
        let samples = eval_grid(phi, g).samples;
        let tolerance = 10.0 * (2.0 * PI / g as f64) * phi.derivative_bound();
        let mut bbox = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in &samples {
            bbox.0 = bbox.0.min(z.re);
            bbox.1 = bbox.1.max(z.re);
            bbox.2 = bbox.2.min(z.im);
            bbox.3 = bbox.3.max(z.im);
        }
        Ok(Curve {
            samples,
            tolerance,
            bbox,
            l1: phi.l1_norm(),
        })
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    /// Curve tolerance `10 · (2π/g) · Σ|k||c_k|`.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn distance(&self, lambda: C64) -> f64 {
        self.samples
            .iter()
            .map(|z| (z - lambda).norm_sqr())
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    fn bbox_distance(&self, lambda: C64) -> f64 {
        let dx = (self.bbox.0 - lambda.re).max(lambda.re - self.bbox.1).max(0.0);
        let dy = (self.bbox.2 - lambda.im).max(lambda.im - self.bbox.3).max(0.0);
        dx.hypot(dy)
    }

    pub fn winding(&self, lambda: C64) -> Winding {
        // φ(𝕋) lies in the disc of radius Σ|c_k|; beyond that disc, or far
        // outside the bounding box, the count is 0
        if lambda.norm() > self.l1 * (1.0 + 1e-12) || self.bbox_distance(lambda) > self.tolerance {
            return Winding::Number(0);
        }
        let distance = self.distance(lambda);
        if distance <= self.tolerance {
            return Winding::OnCurve {
                distance,
                tolerance: self.tolerance,
            };
        }
        // signed crossings of the ray from λ in the +re direction
        let n = self.samples.len();
        let mut turns = 0i64;
        for m in 0..n {
            let a = self.samples[m] - lambda;
            let b = self.samples[(m + 1) % n] - lambda;
            let side = a.re * b.im - a.im * b.re;
            if a.im <= 0.0 && b.im > 0.0 && side > 0.0 {
                turns += 1;
            } else if a.im > 0.0 && b.im <= 0.0 && side < 0.0 {
                turns -= 1;
            }
        }
        Winding::Number(turns)
    }
}

/// Winding number of `φ(𝕋) - λ` around the origin.
pub fn winding(phi: &LaurentPoly, lambda: C64, grid_size: usize) -> Result<Winding> {
    Ok(Curve::new(phi, grid_size)?.winding(lambda))
}

/// Convex hull of a finite point set.
pub fn conv_hull(points: &[C64]) -> Result<ConvexHull> {
    ConvexHull::new(points)
}

/// Domain carrying a spherical multifunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Circle,
    /// Unit sphere in `C^n`.
    Sphere(usize),
    /// Distinguished boundary `T^n` of the polydisc; the components carry
    /// the `1/γ` factor.
    Torus { n: usize, gamma: f64 },
}

/// Family `{φ_j}` with `Σ_j |φ_j|² = 1` on the domain.
#[derive(Debug, Clone)]
pub struct SphericalMultifunction {
    pub components: Vec<LaurentPoly>,
    pub domain: Domain,
}

impl SphericalMultifunction {
    pub fn circle() -> Self {
        SphericalMultifunction {
            components: vec![LaurentPoly::var(1, 0)],
            domain: Domain::Circle,
        }
    }

    /// Coordinate functions `z_1, …, z_n` on the unit sphere of `C^n`.
    pub fn sphere(n: usize) -> Self {
        SphericalMultifunction {
            components: (0..n).map(|j| LaurentPoly::var(n, j)).collect(),
            domain: Domain::Sphere(n),
        }
    }

    /// `z_j / γ` on `T^n`, with `γ = √n` the largest modulus on the closed
    /// polydisc.
    pub fn torus(n: usize) -> Self {
        let gamma = (n as f64).sqrt();
        SphericalMultifunction {
            components: (0..n)
                .map(|j| LaurentPoly::var(n, j).scale(C64::new(1.0 / gamma, 0.0)))
                .collect(),
            domain: Domain::Torus { n, gamma },
        }
    }

    /// Grid points of the domain: torus grids of the given size per axis, and
    /// for the sphere, radial profiles on a simplex grid times phase grids.
    pub fn grid_points(&self, grid_size: usize) -> Vec<Vec<C64>> {
        let g = grid_size.max(1);
        match self.domain {
            Domain::Circle => roots_of_unity(g).into_iter().map(|z| vec![z]).collect(),
            Domain::Torus { n, .. } => torus_points(n, g),
            Domain::Sphere(n) => {
                let mut pts = Vec::new();
                for radii in sphere_radii(n, g) {
                    for phases in torus_points(n, g.min(8)) {
                        pts.push(radii.iter().zip(&phases).map(|(r, p)| p * *r).collect());
                    }
                }
                pts
            }
        }
    }

    /// Largest deviation of `Σ_j |φ_j(x)|²` from one over the grid.
    pub fn invariant_deviation(&self, grid_size: usize) -> f64 {
        self.grid_points(grid_size)
            .iter()
            .map(|x| {
                let s: f64 = self.components.iter().map(|c| c.eval(x).norm_sqr()).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn torus_points(n: usize, g: usize) -> Vec<Vec<C64>> {
    let table = roots_of_unity(g);
    let mut pts = Vec::new();
    let mut idx = vec![0usize; n];
    for _ in 0..g.pow(n as u32) {
        pts.push(idx.iter().map(|&m| table[m]).collect());
        for axis in (0..n).rev() {
            idx[axis] += 1;
            if idx[axis] < g {
                break;
            }
            idx[axis] = 0;
        }
    }
    pts
}

/// Nonnegative radius vectors with `Σ r_j² = 1` from hyperspherical angles.
fn sphere_radii(n: usize, g: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![1.0]];
    }
    let steps = g.clamp(2, 16);
    let mut out = Vec::new();
    for k in 0..=steps {
        let t = 0.5 * PI * k as f64 / steps as f64;
        for rest in sphere_radii(n - 1, g) {
            let mut r = vec![t.cos()];
            r.extend(rest.iter().map(|x| x * t.sin()));
            out.push(r);
        }
    }
    out
}
