//! The Szegő tuple on the Hardy space of the unit sphere `S^{2n−1}`.
//!
//! The monomials `z^α` are orthogonal in `L²(σ)` with
//! `‖z^α‖² = (n−1)! α! / (n−1+|α|)!`, so the coordinate multipliers act as a
//! weighted multishift on the normalized basis `e_α = z^α/‖z^α‖`:
//! `T_j e_α = sqrt((α_j+1)/(n+|α|)) e_{α+e_j}`.
//!
//! Operators are truncated to total degree `≤ d`; images leaving that range
//! are dropped. Each [`GradedOperator`] records the degree up to which its
//! entries and the fixed-point identity can be trusted.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::symbols::ParsedPoly;

pub type MultiIndex = Vec<u32>;

/// Largest total degree accepted by [`sphere_moment`].
pub const MAX_MOMENT_DEGREE: u32 = 60;

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `∫_{S^{2n−1}} |z^α|² dσ = (n−1)! α! / (n−1+|α|)!` as an exact rational.
pub fn sphere_moment(n: usize, alpha: &[u32]) -> Result<BigRational> {
    if n == 0 || alpha.len() != n {
        return Err(Error::Precondition(format!(
            "multi-index {alpha:?} for n = {n}"
        )));
    }
    let total: u32 = alpha.iter().sum();
    if total > MAX_MOMENT_DEGREE {
        return Err(Error::Precondition(format!(
            "|α| = {total} exceeds {MAX_MOMENT_DEGREE}"
        )));
    }
    let m = n as u32 - 1;
    let num = alpha.iter().fold(factorial(m), |acc, &a| acc * factorial(a));
    Ok(BigRational::new(num, factorial(m + total)))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("moment fits in f64")
}

/// `sqrt(a / b)` evaluated from an exact rational quotient.
fn sqrt_ratio(a: &BigRational, b: &BigRational) -> f64 {
    to_f64(&(a / b)).sqrt()
}

/// Monte Carlo estimate `(mean, standard error)` of the moment of `α` from
/// `samples` uniform points on the sphere.
pub fn monte_carlo_moment<R: Rng>(n: usize, alpha: &[u32], samples: usize, rng: &mut R) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut z = vec![ZERO; n];
    for _ in 0..samples {
        let mut norm2 = 0.0;
        for zj in z.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *zj = C64::new(re, im);
            norm2 += zj.norm_sqr();
        }
        let f: f64 = z
            .iter()
            .zip(alpha)
            .map(|(zj, &a)| (zj.norm_sqr() / norm2).powi(a as i32))
            .product();
        sum += f;
        sum_sq += f * f;
    }
    let k = samples as f64;
    let mean = sum / k;
    let var = (sum_sq / k - mean * mean).max(0.0);
    (mean, (var / k).sqrt())
}

/// Multi-indices of total degree `≤ d`, ordered by degree.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    n: usize,
    d: u32,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    norms_sq: Vec<BigRational>,
}

fn indices_of_degree(n: usize, deg: u32) -> Vec<MultiIndex> {
    if n == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in indices_of_degree(n - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl GradedBasis {
    pub fn new(n: usize, d: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("n must be at least 1".into()));
        }
        let indices: Vec<MultiIndex> = (0..=d).flat_map(|k| indices_of_degree(n, k)).collect();
        let lookup = indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let norms_sq = indices
            .iter()
            .map(|a| sphere_moment(n, a))
            .collect::<Result<_>>()?;
        Ok(GradedBasis {
            n,
            d,
            indices,
            lookup,
            norms_sq,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, alpha: &[u32]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.indices[i].iter().sum()
    }
}

/// Truncated operator on `H²(S^{2n−1})`, blocked by total degree.
#[derive(Debug, Clone)]
pub struct GradedOperator {
    basis: Arc<GradedBasis>,
    matrix: CMatrix,
    safe_degree: u32,
}

impl PartialEq for GradedOperator {
    fn eq(&self, other: &Self) -> bool {
        self.basis.n == other.basis.n
            && self.basis.d == other.basis.d
            && self.safe_degree == other.safe_degree
            && self.matrix == other.matrix
    }
}

impl GradedOperator {
    pub fn identity(basis: Arc<GradedBasis>) -> Self {
        let size = basis.len();
        GradedOperator {
            safe_degree: basis.d,
            basis,
            matrix: CMatrix::identity(size),
        }
    }

    /// Matrix unit `E_{β,α}` (maps `e_α` to `e_β`).
    pub fn unit(basis: Arc<GradedBasis>, beta: &[u32], alpha: &[u32]) -> Result<Self> {
        let (r, c) = match (basis.position(beta), basis.position(alpha)) {
            (Some(r), Some(c)) => (r, c),
            _ => return Err(Error::Precondition("multi-index outside the truncation".into())),
        };
        let mut matrix = CMatrix::zeros(basis.len(), basis.len());
        matrix[(r, c)] = ONE;
        Ok(GradedOperator {
            safe_degree: basis.d,
            basis,
            matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.basis.n
    }

    pub fn d(&self) -> u32 {
        self.basis.d
    }

    pub fn safe_degree(&self) -> u32 {
        self.safe_degree
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `⟨X e_α, e_β⟩`; zero outside the truncation.
    pub fn entry(&self, beta: &[u32], alpha: &[u32]) -> C64 {
        match (self.basis.position(beta), self.basis.position(alpha)) {
            (Some(r), Some(c)) => self.matrix[(r, c)],
            _ => ZERO,
        }
    }

    /// Whether the `(β, α)` entry lies in the trusted region.
    pub fn is_valid(&self, beta: &[u32], alpha: &[u32]) -> bool {
        beta.iter().sum::<u32>() <= self.safe_degree && alpha.iter().sum::<u32>() <= self.safe_degree
    }

    fn with_matrix(&self, matrix: CMatrix, safe_degree: u32) -> Self {
        GradedOperator {
            basis: Arc::clone(&self.basis),
            matrix,
            safe_degree,
        }
    }

    pub fn adjoint(&self) -> Self {
        self.with_matrix(self.matrix.adjoint(), self.safe_degree)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(self.with_matrix(
            self.matrix.matmul(&other.matrix)?,
            self.safe_degree.min(other.safe_degree),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(self.with_matrix(
            self.matrix.sub(&other.matrix)?,
            self.safe_degree.min(other.safe_degree),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(self.with_matrix(
            self.matrix.add(&other.matrix)?,
            self.safe_degree.min(other.safe_degree),
        ))
    }

    /// Max `|entry|` over pairs with both degrees `≤ max_degree`.
    fn max_abs_within(&self, max_degree: u32) -> f64 {
        let b = &self.basis;
        let mut m: f64 = 0.0;
        for r in 0..b.len() {
            for c in 0..b.len() {
                if b.degree(r) <= max_degree && b.degree(c) <= max_degree {
                    m = m.max(self.matrix[(r, c)].norm());
                }
            }
        }
        m
    }
}

#[derive(Serialize, Deserialize)]
struct RawGradedEntry {
    row: MultiIndex,
    col: MultiIndex,
    value: C64,
    valid: bool,
}

#[derive(Serialize, Deserialize)]
struct RawGraded {
    n: usize,
    d: u32,
    safe_degree: u32,
    entries: Vec<RawGradedEntry>,
}

/// JSON form: nonzero entries keyed by explicit multi-indices, each with its
/// validity flag.
impl Serialize for GradedOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let b = &self.basis;
        let mut entries = Vec::new();
        for r in 0..b.len() {
            for c in 0..b.len() {
                let v = self.matrix[(r, c)];
                if v != ZERO {
                    entries.push(RawGradedEntry {
                        row: b.indices[r].clone(),
                        col: b.indices[c].clone(),
                        value: v,
                        valid: self.is_valid(&b.indices[r], &b.indices[c]),
                    });
                }
            }
        }
        RawGraded {
            n: b.n,
            d: b.d,
            safe_degree: self.safe_degree,
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GradedOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawGraded::deserialize(d)?;
        let basis = Arc::new(GradedBasis::new(raw.n, raw.d).map_err(D::Error::custom)?);
        let mut matrix = CMatrix::zeros(basis.len(), basis.len());
        for e in raw.entries {
            match (basis.position(&e.row), basis.position(&e.col)) {
                (Some(r), Some(c)) => matrix[(r, c)] = e.value,
                _ => return Err(D::Error::custom("entry outside the truncation")),
            }
        }
        Ok(GradedOperator {
            basis,
            matrix,
            safe_degree: raw.safe_degree.min(raw.d),
        })
    }
}

/// `(T_{z_1}, …, T_{z_n})` truncated to degree `d`.
#[derive(Debug, Clone)]
pub struct SzegoTuple {
    pub n: usize,
    pub d: u32,
    pub shifts: Vec<GradedOperator>,
}

impl SzegoTuple {
    pub fn basis(&self) -> Arc<GradedBasis> {
        Arc::clone(&self.shifts[0].basis)
    }

    /// `Σ_j T_j* X T_j`, entrywise:
    /// `Σ_j w_j(β) w_j(α) X_{β+e_j, α+e_j}`.
    ///
    /// The weight products are `sqrt((β_j+1)(α_j+1)) / sqrt((n+|β|)(n+|α|))`;
    /// integer square roots and the common denominator are taken exactly
    /// whenever possible, so identities such as `Σ_j w_j(α)² = 1` hold
    /// without rounding.
    pub fn cp_map(&self, x: &GradedOperator) -> Result<GradedOperator> {
        if x.n() != self.n || x.d() != self.d {
            return Err(Error::Precondition("operator and tuple truncations differ".into()));
        }
        let basis = self.basis();
        let n = self.n as u64;
        let size = basis.len();
        let mut out = CMatrix::zeros(size, size);
        let ups: Vec<Vec<Option<usize>>> = basis
            .indices
            .iter()
            .map(|a| {
                (0..self.n)
                    .map(|j| {
                        let mut up = a.clone();
                        up[j] += 1;
                        basis.position(&up)
                    })
                    .collect()
            })
            .collect();
        for r in 0..size {
            let beta = &basis.indices[r];
            let db = n + u64::from(basis.degree(r));
            for c in 0..size {
                let alpha = &basis.indices[c];
                let da = n + u64::from(basis.degree(c));
                let mut acc = ZERO;
                for j in 0..self.n {
                    if let (Some(ur), Some(uc)) = (ups[r][j], ups[c][j]) {
                        let num = u64::from(beta[j] + 1) * u64::from(alpha[j] + 1);
                        acc += x.matrix[(ur, uc)] * exact_sqrt(num);
                    }
                }
                if acc != ZERO {
                    out[(r, c)] = acc / exact_sqrt(db * da);
                }
            }
        }
        Ok(x.with_matrix(out, x.safe_degree))
    }
}

/// `sqrt(k)`, exact for perfect squares.
fn exact_sqrt(k: u64) -> f64 {
    let s = (k as f64).sqrt().round() as u64;
    if s * s == k {
        s as f64
    } else {
        (k as f64).sqrt()
    }
}

/// Weighted shifts with `w_j(α) = sqrt((α_j + 1)/(n + |α|))`.
pub fn szego_tuple(n: usize, d: u32) -> Result<SzegoTuple> {
    if n == 0 || d < 2 {
        return Err(Error::Precondition(format!("need n ≥ 1 and d ≥ 2, got n = {n}, d = {d}")));
    }
    let basis = Arc::new(GradedBasis::new(n, d)?);
    let mut shifts = Vec::with_capacity(n);
    for j in 0..n {
        let mut m = CMatrix::zeros(basis.len(), basis.len());
        for (c, alpha) in basis.indices.iter().enumerate() {
            let mut up = alpha.clone();
            up[j] += 1;
            if let Some(r) = basis.position(&up) {
                // ratio of consecutive moments, exactly (α_j+1)/(n+|α|)
                m[(r, c)] = C64::new(sqrt_ratio(&basis.norms_sq[r], &basis.norms_sq[c]), 0.0);
            }
        }
        shifts.push(GradedOperator {
            basis: Arc::clone(&basis),
            matrix: m,
            safe_degree: d,
        });
    }
    Ok(SzegoTuple { n, d, shifts })
}

/// Polynomial `Σ c z^γ zbar^δ` on the sphere, where `zbar_j` is not `1/z_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoly {
    pub n: usize,
    pub terms: Vec<(MultiIndex, MultiIndex, C64)>,
}

impl SpherePoly {
    pub fn parse(src: &str, n: usize) -> Result<Self> {
        let parsed = ParsedPoly::parse(src)?;
        if parsed.nvars > n {
            return Err(Error::Precondition(format!(
                "symbol uses {} variables, sphere has {n}",
                parsed.nvars
            )));
        }
        let terms = parsed
            .terms
            .iter()
            .map(|t| {
                let mut g = vec![0u32; n];
                let mut h = vec![0u32; n];
                for (&j, &a) in &t.z {
                    g[j - 1] += a;
                }
                for (&j, &b) in &t.zbar {
                    h[j - 1] += b;
                }
                (g, h, t.coeff)
            })
            .collect();
        Ok(SpherePoly { n, terms })
    }

    pub fn coordinate(n: usize, j: usize) -> Self {
        let mut g = vec![0; n];
        g[j] = 1;
        SpherePoly {
            n,
            terms: vec![(g, vec![0; n], ONE)],
        }
    }

    /// Largest holomorphic or antiholomorphic degree of a term.
    pub fn band(&self) -> u32 {
        self.terms
            .iter()
            .map(|(g, h, _)| g.iter().sum::<u32>().max(h.iter().sum()))
            .max()
            .unwrap_or(0)
    }

    /// Complex conjugate: `z` and `zbar` exponents swapped.
    pub fn conj(&self) -> Self {
        SpherePoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(g, h, c)| (h.clone(), g.clone(), c.conj()))
                .collect(),
        }
    }
}

/// Compression of multiplication by `φ` to `H²(S^{2n−1})`, degrees `≤ d`.
///
/// `⟨φ z^α, z^β⟩ = Σ c ∫ z^{γ+α} zbar^{δ+β} dσ` vanishes unless
/// `γ + α = δ + β`, in which case it is the moment of `γ + α`.
pub fn toeplitz_graded(phi: &SpherePoly, n: usize, d: u32) -> Result<GradedOperator> {
    if phi.n != n {
        return Err(Error::Precondition(format!("symbol on n = {}, model n = {n}", phi.n)));
    }
    let band = phi.band();
    if 2 * band > d {
        return Err(Error::Precondition(format!("symbol band {band} exceeds d/2 = {}", d / 2)));
    }
    let basis = Arc::new(GradedBasis::new(n, d)?);
    let mut m = CMatrix::zeros(basis.len(), basis.len());
    for (c, alpha) in basis.indices.iter().enumerate() {
        for (g, h, coeff) in &phi.terms {
            // β = γ + α − δ must be a multi-index
            let top: Vec<u32> = g.iter().zip(alpha).map(|(a, b)| a + b).collect();
            if top.iter().zip(h).any(|(t, hh)| t < hh) {
                continue;
            }
            let beta: Vec<u32> = top.iter().zip(h).map(|(t, hh)| t - hh).collect();
            let Some(r) = basis.position(&beta) else {
                continue;
            };
            let moment = sphere_moment(n, &top)?;
            let num = &moment * &moment;
            let den = &basis.norms_sq[c] * &basis.norms_sq[r];
            m[(r, c)] += coeff * sqrt_ratio(&num, &den);
        }
    }
    Ok(GradedOperator {
        basis,
        matrix: m,
        safe_degree: d - band,
    })
}

/// Max residual of `Σ_j T_j* X T_j − X` inside and outside the trusted region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResidual {
    /// Over pairs with both degrees `≤ safe_degree − 1`.
    pub interior: f64,
    pub boundary: f64,
}

pub fn fixed_point_residual(x: &GradedOperator, tuple: &SzegoTuple) -> Result<FixedPointResidual> {
    if x.d() != tuple.d || x.n() != tuple.n {
        return Err(Error::Precondition("operator and tuple truncations differ".into()));
    }
    let r = tuple.cp_map(x)?.sub(x)?;
    let b = x.basis();
    let cut = x.safe_degree.saturating_sub(1);
    let has_interior = x.safe_degree >= 1;
    let mut interior: f64 = 0.0;
    let mut boundary: f64 = 0.0;
    for i in 0..b.len() {
        for j in 0..b.len() {
            let v = r.matrix[(i, j)].norm();
            if has_interior && b.degree(i) <= cut && b.degree(j) <= cut {
                interior = interior.max(v);
            } else {
                boundary = boundary.max(v);
            }
        }
    }
    Ok(FixedPointResidual { interior, boundary })
}

/// Structure of `Σ_j T_j* T_j − I` under truncation.
#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    pub top_shell_size: usize,
    /// Every nonzero defect entry is diagonal and on the shell `|α| = d`.
    pub supported_on_top_shell: bool,
    /// Largest `|defect + 1|` over the top-shell diagonal.
    pub top_shell_deviation: f64,
    /// Largest `|defect|` over degrees `≤ d − 1`.
    pub interior_max: f64,
}

pub fn defect_report(tuple: &SzegoTuple) -> Result<DefectReport> {
    let basis = tuple.basis();
    let id = GradedOperator::identity(Arc::clone(&basis));
    let defect = tuple.cp_map(&id)?.sub(&id)?;
    let d = tuple.d;
    let mut top_shell_size = 0;
    let mut supported = true;
    let mut top_dev: f64 = 0.0;
    for i in 0..basis.len() {
        if basis.degree(i) == d {
            top_shell_size += 1;
            top_dev = top_dev.max((defect.matrix[(i, i)] + ONE).norm());
        }
        for j in 0..basis.len() {
            let on_shell = i == j && basis.degree(i) == d;
            if !on_shell && defect.matrix[(i, j)] != ZERO && defect.matrix[(i, j)].norm() > 1e-14 {
                supported = false;
            }
        }
    }
    Ok(DefectReport {
        top_shell_size,
        supported_on_top_shell: supported,
        top_shell_deviation: top_dev,
        interior_max: defect.max_abs_within(d - 1),
    })
}

/// Largest `|T_i T_j − T_j T_i|` entry over columns of degree `≤ d − 2`.
pub fn commutator_residual(tuple: &SzegoTuple) -> Result<f64> {
    let basis = tuple.basis();
    let mut worst: f64 = 0.0;
    for i in 0..tuple.n {
        for j in i + 1..tuple.n {
            let a = tuple.shifts[i].mul(&tuple.shifts[j])?;
            let b = tuple.shifts[j].mul(&tuple.shifts[i])?;
            let diff = a.sub(&b)?;
            for r in 0..basis.len() {
                for c in 0..basis.len() {
                    if basis.degree(c) + 2 <= tuple.d {
                        worst = worst.max(diff.matrix[(r, c)].norm());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Consistency of the Szegő tuple with multiplication operators on the
/// polynomial model of `L²(σ)` spanned by `z^γ zbar^δ`.
#[derive(Debug, Clone, Serialize)]
pub struct NormalExtensionReport {
    /// Compression of `M_{z_j}` to analytic monomials vs the tuple.
    pub shift_compression_residual: f64,
    /// Compression of `M_φ` vs `toeplitz_graded(φ)`.
    pub symbol_compression_residual: f64,
    /// `⟨M_{z_j} f, M_{z_j} g⟩ − ⟨M_{zbar_j} f, M_{zbar_j} g⟩`.
    pub normality_residual: f64,
    /// `Σ_j ⟨M_{z_j} f, M_{z_j} g⟩ − ⟨f, g⟩`.
    pub spherical_residual: f64,
}

/// Runs the checks of [`NormalExtensionReport`] on two-sided monomials of
/// total degree `≤ degree`, using `d` for the comparison truncations.
pub fn normal_extension_check(n: usize, degree: u32, phi: &SpherePoly) -> Result<NormalExtensionReport> {
    // L²(σ) inner product of z^γ zbar^δ and z^γ' zbar^δ'
    let inner = |g: &[u32], h: &[u32], g2: &[u32], h2: &[u32]| -> Result<f64> {
        let left: Vec<u32> = g.iter().zip(h2).map(|(a, b)| a + b).collect();
        let right: Vec<u32> = h.iter().zip(g2).map(|(a, b)| a + b).collect();
        if left != right {
            return Ok(0.0);
        }
        sphere_moment(n, &left).map(|m| to_f64(&m))
    };
    let basis = GradedBasis::new(n, degree)?;
    let two_sided: Vec<(MultiIndex, MultiIndex)> = basis
        .indices
        .iter()
        .flat_map(|g| {
            basis
                .indices
                .iter()
                .filter(move |h| g.iter().sum::<u32>() + h.iter().sum::<u32>() < degree)
                .map(move |h| (g.clone(), h.clone()))
        })
        .collect();
    let zero = vec![0u32; n];
    let norm = |a: &[u32]| to_f64(&sphere_moment(n, a).expect("bounded degree")).sqrt();

    let tuple = szego_tuple(n, degree.max(2))?;
    let mut shift_res: f64 = 0.0;
    for (j, t) in tuple.shifts.iter().enumerate() {
        for alpha in basis.indices.iter().filter(|a| a.iter().sum::<u32>() < degree) {
            let mut up = alpha.clone();
            up[j] += 1;
            for beta in &basis.indices {
                let v = inner(&up, &zero, beta, &zero)? / (norm(alpha) * norm(beta));
                shift_res = shift_res.max((t.entry(beta, alpha) - v).norm());
            }
        }
    }

    let graded = toeplitz_graded(phi, n, degree.max(2 * phi.band()))?;
    let mut sym_res: f64 = 0.0;
    for alpha in &basis.indices {
        for beta in &basis.indices {
            let mut v = ZERO;
            for (g, h, c) in &phi.terms {
                let ga: Vec<u32> = g.iter().zip(alpha).map(|(a, b)| a + b).collect();
                v += c * inner(&ga, h, beta, &zero)?;
            }
            v /= norm(alpha) * norm(beta);
            sym_res = sym_res.max((graded.entry(beta, alpha) - v).norm());
        }
    }

    let mut normality: f64 = 0.0;
    let mut spherical: f64 = 0.0;
    for (g, h) in &two_sided {
        for (g2, h2) in &two_sided {
            let mut sum = 0.0;
            for j in 0..n {
                let bump = |v: &[u32]| {
                    let mut w = v.to_vec();
                    w[j] += 1;
                    w
                };
                let zz = inner(&bump(g), h, &bump(g2), h2)?;
                let bb = inner(g, &bump(h), g2, &bump(h2))?;
                normality = normality.max((zz - bb).abs());
                sum += zz;
            }
            spherical = spherical.max((sum - inner(g, h, g2, h2)?).abs());
        }
    }

    Ok(NormalExtensionReport {
        shift_compression_residual: shift_res,
        symbol_compression_residual: sym_res,
        normality_residual: normality,
        spherical_residual: spherical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn moment_examples() {
        assert_eq!(sphere_moment(3, &[0, 0, 0]).unwrap(), BigRational::one());
        assert_eq!(sphere_moment(2, &[1, 0]).unwrap(), q(1, 2));
        assert_eq!(sphere_moment(3, &[2, 1, 0]).unwrap(), q(1, 30));
        assert!(sphere_moment(2, &[40, 21]).is_err());
        assert!(sphere_moment(2, &[1]).is_err());
        assert!(!sphere_moment(2, &[30, 30]).unwrap().is_zero());
    }

    #[test]
    fn circle_tuple_is_unweighted_shift() {
        let t = szego_tuple(1, 8).unwrap();
        let m = t.shifts[0].matrix();
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i == j + 1 { ONE } else { ZERO };
                assert_eq!(m[(i, j)], expect);
            }
        }
    }

    #[test]
    fn first_weight_on_s3() {
        let t = szego_tuple(2, 4).unwrap();
        let w = t.shifts[0].entry(&[1, 0], &[0, 0]);
        assert!((w.re - 0.5f64.sqrt()).abs() < 1e-16 && w.im == 0.0);
    }

    #[test]
    fn row_isometry_below_top_degree() {
        let t = szego_tuple(2, 10).unwrap();
        let r = defect_report(&t).unwrap();
        assert!(r.interior_max <= 1e-14);
        assert_eq!(r.top_shell_size, 11);
    }

    #[test]
    fn defect_patterns() {
        let r = defect_report(&szego_tuple(1, 8).unwrap()).unwrap();
        assert_eq!(r.top_shell_size, 1);
        assert!(r.supported_on_top_shell && r.top_shell_deviation == 0.0);
        let r = defect_report(&szego_tuple(2, 6).unwrap()).unwrap();
        assert_eq!(r.top_shell_size, 7);
        assert!(r.supported_on_top_shell && r.top_shell_deviation == 0.0);
        assert!(r.interior_max <= 1e-14);
    }

    #[test]
    fn graded_toeplitz_examples() {
        let one = toeplitz_graded(&SpherePoly::parse("1", 2).unwrap(), 2, 6).unwrap();
        assert_eq!(one.matrix(), &CMatrix::identity(one.basis().len()));

        let t = szego_tuple(2, 6).unwrap();
        let z1 = toeplitz_graded(&SpherePoly::parse("z1", 2).unwrap(), 2, 6).unwrap();
        assert!(z1.matrix().sub(t.shifts[0].matrix()).unwrap().max_abs() <= 1e-15);

        let z1z1bar = toeplitz_graded(&SpherePoly::parse("z1*zbar1", 2).unwrap(), 2, 6).unwrap();
        assert!((z1z1bar.entry(&[0, 0], &[0, 0]) - C64::new(0.5, 0.0)).norm() <= 1e-16);
        assert!(toeplitz_graded(&SpherePoly::parse("z1^4", 2).unwrap(), 2, 6).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        let t = szego_tuple(2, 10).unwrap();
        let id = GradedOperator::identity(t.basis());
        let r = fixed_point_residual(&id, &t).unwrap();
        assert_eq!(r.interior, 0.0);
        assert!(r.boundary > 0.5);

        let phi = SpherePoly::parse("z1*zbar2 + zbar1*z2", 2).unwrap();
        let x = toeplitz_graded(&phi, 2, 10).unwrap();
        assert!(fixed_point_residual(&x, &t).unwrap().interior <= 1e-10);

        let e = GradedOperator::unit(t.basis(), &[0, 0], &[0, 0]).unwrap();
        assert!(fixed_point_residual(&e, &t).unwrap().interior >= 0.4);
    }

    #[test]
    fn shifts_commute_below_top() {
        for n in [2, 3] {
            assert!(commutator_residual(&szego_tuple(n, 7).unwrap()).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn selfadjoint_symbols_give_hermitian_matrices() {
        let phi = SpherePoly::parse("z1*zbar2 + zbar1*z2 + 3*z1*zbar1 + (0+2i)*z2 - (0+2i)*zbar2", 2).unwrap();
        assert_eq!(phi.conj().terms.len(), phi.terms.len());
        let x = toeplitz_graded(&phi, 2, 8).unwrap();
        assert!(x.matrix().hermitian_deviation() <= 1e-14);
    }

    #[test]
    fn normal_extension_matches_compressions() {
        let phi = SpherePoly::parse("z1*zbar2 + 2*z2 - (0.5+1i)*zbar1*zbar1", 2).unwrap();
        let r = normal_extension_check(2, 4, &phi).unwrap();
        assert!(r.shift_compression_residual <= 1e-15, "{r:?}");
        assert!(r.symbol_compression_residual <= 1e-14, "{r:?}");
        assert!(r.normality_residual <= 1e-15, "{r:?}");
        assert!(r.spherical_residual <= 1e-15, "{r:?}");
    }

    #[test]
    fn graded_json_roundtrip() {
        let phi = SpherePoly::parse("z1*zbar2 + 0.25", 2).unwrap();
        let x = toeplitz_graded(&phi, 2, 4).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains("\"valid\""));
        let y: GradedOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
