//! Exact calculus for the Toeplitz algebra of the unilateral shift.
//!
//! Basis and matrix convention, used everywhere in this crate: the Hardy
//! space `H²(𝕋)` has orthonormal basis `e_k = z^k`, `k ≥ 0`, and
//! `(T_φ)_{ij} = φ̂(i − j)`. So `T_z` is the subdiagonal shift and
//! `E_{ij}` is the matrix unit mapping `e_j` to `e_i`.
//!
//! Every element generated by Toeplitz operators with Laurent polynomial
//! symbols is held exactly as `T_φ + F` with `F` a finite matrix anchored at
//! the origin. The symbol is unique (it is read off far from the corner), so
//! the symbol map, the completely positive projection onto Toeplitz operators
//! and the kernel of the symbol map are all computed without truncation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, BandMatrix, CMatrix, C64, ONE, ZERO};
use crate::symbols::{self, LaurentPoly};

/// Correction entries below this fraction of the block maximum are flushed.
pub const FLUSH_RELATIVE: f64 = 1e-14;

/// `T_φ + F` on `H²(𝕋)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawElement", into = "RawElement")]
pub struct ToeplitzElement {
    symbol: LaurentPoly,
    correction: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawElement {
    symbol: LaurentPoly,
    correction: CMatrix,
}

impl TryFrom<RawElement> for ToeplitzElement {
    type Error = String;

    fn try_from(raw: RawElement) -> std::result::Result<Self, String> {
        if raw.symbol.nvars() != 1 {
            return Err(format!("symbol has {} variables, expected 1", raw.symbol.nvars()));
        }
        let trimmed = trim(&raw.correction);
        if trimmed != raw.correction {
            return Err("correction is not in trimmed canonical form".into());
        }
        Ok(ToeplitzElement {
            symbol: raw.symbol,
            correction: trimmed,
        })
    }
}

impl From<ToeplitzElement> for RawElement {
    fn from(x: ToeplitzElement) -> Self {
        RawElement {
            symbol: x.symbol,
            correction: x.correction,
        }
    }
}

/// Flush float dust and drop trailing all-zero rows and columns.
fn trim(f: &CMatrix) -> CMatrix {
    let cutoff = FLUSH_RELATIVE * f.max_abs();
    let keep = |z: C64| z.norm() > cutoff;
    let mut rows = 0;
    let mut cols = 0;
    for i in 0..f.rows() {
        for j in 0..f.cols() {
            if keep(f[(i, j)]) {
                rows = rows.max(i + 1);
                cols = cols.max(j + 1);
            }
        }
    }
    CMatrix::from_fn(rows, cols, |i, j| {
        let z = f[(i, j)];
        if keep(z) {
            z
        } else {
            ZERO
        }
    })
}

fn require_one_var(phi: &LaurentPoly) -> Result<()> {
    if phi.nvars() != 1 {
        return Err(Error::Precondition(format!(
            "circle symbols have one variable, got {}",
            phi.nvars()
        )));
    }
    Ok(())
}

/// Accumulates `value` into a growable dense block.
fn accumulate(block: &mut CMatrix, i: usize, j: usize, value: C64) {
    if i >= block.rows() || j >= block.cols() {
        *block = block.resized(block.rows().max(i + 1), block.cols().max(j + 1));
    }
    block[(i, j)] += value;
}

/// Corner of `T_φ T_ψ − T_{φψ}`: `−Σ_{k ≤ −1} φ̂(i−k) ψ̂(k−j)`.
///
/// Nonzero only for `i < deg₊(φ)` and `j < deg₋(ψ)`.
fn semicommutator_corner(phi: &LaurentPoly, psi: &LaurentPoly) -> CMatrix {
    let rows = phi.deg_plus();
    let cols = psi.deg_minus();
    let kmin = -(cols as i64);
    CMatrix::from_fn(rows, cols, |i, j| {
        let mut s = ZERO;
        for k in kmin..0 {
            let a = phi.coeff1(i as i64 - k);
            if a == ZERO {
                continue;
            }
            s += a * psi.coeff1(k - j as i64);
        }
        -s
    })
}

impl ToeplitzElement {
    /// `T_φ + F`, canonicalized.
    pub fn new(symbol: LaurentPoly, correction: CMatrix) -> Result<Self> {
        require_one_var(&symbol)?;
        if !correction.is_finite() {
            return Err(Error::Precondition("non-finite correction".into()));
        }
        Ok(ToeplitzElement {
            symbol,
            correction: trim(&correction),
        })
    }

    /// The Toeplitz operator `T_φ`.
    pub fn toeplitz(symbol: LaurentPoly) -> Result<Self> {
        Self::new(symbol, CMatrix::zeros(0, 0))
    }

    /// The finite-rank operator `F`.
    pub fn finite(correction: CMatrix) -> Self {
        ToeplitzElement {
            symbol: LaurentPoly::zero(1),
            correction: trim(&correction),
        }
    }

    pub fn identity() -> Self {
        Self::toeplitz(LaurentPoly::one(1)).expect("one-variable symbol")
    }

    pub fn zero() -> Self {
        Self::finite(CMatrix::zeros(0, 0))
    }

    /// Unilateral shift `T_z`.
    pub fn shift() -> Self {
        Self::toeplitz(LaurentPoly::var(1, 0)).expect("one-variable symbol")
    }

    /// Matrix unit `E_{ij}`.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut f = CMatrix::zeros(i + 1, j + 1);
        f[(i, j)] = ONE;
        Self::finite(f)
    }

    pub fn symbol(&self) -> &LaurentPoly {
        &self.symbol
    }

    pub fn correction(&self) -> &CMatrix {
        &self.correction
    }

    /// `(rows, cols)` of the active correction block.
    pub fn active_size(&self) -> (usize, usize) {
        (self.correction.rows(), self.correction.cols())
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.symbol.coeff1(i as i64 - j as i64) + self.correction.get_or_zero(i, j)
    }

    /// `P_N X P_N` as an `N × N` matrix.
    pub fn truncation(&self, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// `P_N X P_N` in banded storage.
    pub fn truncation_band(&self, n: usize) -> BandMatrix {
        let (r, c) = self.active_size();
        let lower = self.symbol.deg_plus().max(r.saturating_sub(1));
        let upper = self.symbol.deg_minus().max(c.saturating_sub(1));
        let mut b = BandMatrix::zeros(n, lower.min(n.saturating_sub(1)), upper.min(n.saturating_sub(1)));
        for i in 0..n {
            for j in i.saturating_sub(b.lower())..(i + b.upper() + 1).min(n) {
                let v = self.entry(i, j);
                if v != ZERO {
                    b.set(i, j, v);
                }
            }
        }
        b
    }

    pub fn is_correction_free(&self) -> bool {
        self.correction.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let rows = self.correction.rows().max(other.correction.rows());
        let cols = self.correction.cols().max(other.correction.cols());
        let f = self
            .correction
            .resized(rows, cols)
            .add(&other.correction.resized(rows, cols))
            .expect("equal shapes");
        ToeplitzElement {
            symbol: self.symbol.add(&other.symbol),
            correction: trim(&f),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        ToeplitzElement {
            symbol: self.symbol.scale(s),
            correction: trim(&self.correction.scale(s)),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    /// Exact product `(T_φ + F)(T_ψ + G)`.
    ///
    /// The symbol is `φψ`; the correction is the semicommutator corner plus
    /// `T_φ G + F T_ψ + F G`, each evaluated on the active block padded by the
    /// symbol band.
    pub fn mul(&self, other: &Self) -> Self {
        let (phi, f) = (&self.symbol, &self.correction);
        let (psi, g) = (&other.symbol, &other.correction);
        let mut block = semicommutator_corner(phi, psi);

        // T_φ G: rows up to rG + deg₊(φ)
        if !g.is_empty() && !phi.is_zero() {
            let rows = g.rows() + phi.deg_plus();
            for i in 0..rows {
                for l in 0..g.rows() {
                    let a = phi.coeff1(i as i64 - l as i64);
                    if a == ZERO {
                        continue;
                    }
                    for j in 0..g.cols() {
                        let b = g[(l, j)];
                        if b != ZERO {
                            accumulate(&mut block, i, j, a * b);
                        }
                    }
                }
            }
        }
        // F T_ψ: columns up to cF + deg₋(ψ)
        if !f.is_empty() && !psi.is_zero() {
            let cols = f.cols() + psi.deg_minus();
            for i in 0..f.rows() {
                for l in 0..f.cols() {
                    let a = f[(i, l)];
                    if a == ZERO {
                        continue;
                    }
                    for j in 0..cols {
                        let b = psi.coeff1(l as i64 - j as i64);
                        if b != ZERO {
                            accumulate(&mut block, i, j, a * b);
                        }
                    }
                }
            }
        }
        // F G
        if !f.is_empty() && !g.is_empty() {
            let inner = f.cols().min(g.rows());
            for i in 0..f.rows() {
                for l in 0..inner {
                    let a = f[(i, l)];
                    if a == ZERO {
                        continue;
                    }
                    for j in 0..g.cols() {
                        let b = g[(l, j)];
                        if b != ZERO {
                            accumulate(&mut block, i, j, a * b);
                        }
                    }
                }
            }
        }
        ToeplitzElement {
            symbol: phi.mul(psi),
            correction: trim(&block),
        }
    }

    pub fn adjoint(&self) -> Self {
        ToeplitzElement {
            symbol: self.symbol.conj(),
            correction: self.correction.adjoint(),
        }
    }

    /// `T_z* X T_z`: the symbol is invariant and the corner shifts up-left.
    pub fn phi_map(&self) -> Self {
        let f = &self.correction;
        let shifted = if f.rows() <= 1 || f.cols() <= 1 {
            CMatrix::zeros(0, 0)
        } else {
            CMatrix::from_fn(f.rows() - 1, f.cols() - 1, |i, j| f[(i + 1, j + 1)])
        };
        ToeplitzElement {
            symbol: self.symbol.clone(),
            correction: trim(&shifted),
        }
    }

    /// Completely positive projection onto Toeplitz operators.
    ///
    /// Iterating `phi_map` as many times as the active block is large kills
    /// the correction, leaving `T_{π(X)}`.
    pub fn project_phi(&self) -> Self {
        let (r, c) = self.active_size();
        let mut x = self.clone();
        for _ in 0..r.min(c) {
            x = x.phi_map();
        }
        debug_assert!(x.is_correction_free());
        x
    }

    /// Symbol homomorphism `π`.
    pub fn symbol_map(&self) -> LaurentPoly {
        self.symbol.clone()
    }

    /// Brown–Halmos test: `T_z* X T_z = X`, asserted to coincide with
    /// vanishing correction.
    pub fn is_toeplitz(&self) -> bool {
        let fixed = self.phi_map() == *self;
        let clean = self.is_correction_free();
        assert_eq!(fixed, clean, "fixed-point and correction criteria disagree");
        fixed
    }

    /// Largest absolute difference over symbol coefficients and correction
    /// entries.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let d = self.sub_raw(other);
        let sym = d.symbol.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        sym.max(d.correction.max_abs())
    }

    // difference without flushing, so tiny residuals stay visible
    fn sub_raw(&self, other: &Self) -> Self {
        let rows = self.correction.rows().max(other.correction.rows());
        let cols = self.correction.cols().max(other.correction.cols());
        ToeplitzElement {
            symbol: self.symbol.sub(&other.symbol),
            correction: self
                .correction
                .resized(rows, cols)
                .sub(&other.correction.resized(rows, cols))
                .expect("equal shapes"),
        }
    }

    /// Upper bound `‖φ‖_{ℓ¹} + ‖F‖` for the operator norm.
    pub fn norm_upper(&self) -> f64 {
        self.symbol.l1_norm() + linalg::op_norm(&self.correction, 0.0).unwrap_or(f64::INFINITY)
    }

    pub fn correction_rank(&self) -> usize {
        linalg::rank(&self.correction)
    }
}

/// `T_φ`.
pub fn make_toeplitz(phi: &LaurentPoly) -> Result<ToeplitzElement> {
    ToeplitzElement::toeplitz(phi.clone())
}

/// `T_φ T_ψ − T_{φψ}`; the symbol part vanishes identically and the
/// correction lies in `[0, deg₊(φ)) × [0, deg₋(ψ))`.
pub fn semicommutator(phi: &LaurentPoly, psi: &LaurentPoly) -> Result<ToeplitzElement> {
    let a = make_toeplitz(phi)?;
    let b = make_toeplitz(psi)?;
    let s = a.mul(&b).sub(&make_toeplitz(&phi.mul(psi))?);
    let (rows, cols) = semicommutator_box(phi, psi);
    assert!(s.symbol.is_zero(), "semicommutator has a symbol part");
    assert!(
        s.correction.rows() <= rows && s.correction.cols() <= cols,
        "semicommutator corner escapes its degree box"
    );
    Ok(s)
}

/// Degree box `(deg₊(φ), deg₋(ψ))` containing the semicommutator corner.
pub fn semicommutator_box(phi: &LaurentPoly, psi: &LaurentPoly) -> (usize, usize) {
    (phi.deg_plus(), psi.deg_minus())
}

/// The three averaging expressions and the Choi–Effros product.
#[derive(Debug, Clone, Serialize)]
pub struct AveragingReport {
    /// `Φ(Φ(X)Y)`
    pub left: ToeplitzElement,
    /// `Φ(XΦ(Y))`
    pub middle: ToeplitzElement,
    /// `Φ(Φ(X)Φ(Y))`, the Choi–Effros product of `Φ(X)` and `Φ(Y)`.
    pub choi_effros: ToeplitzElement,
    /// Largest pairwise coefficient difference between the three.
    pub max_difference: f64,
    /// Distance from the Choi–Effros product to `T_{π(X)π(Y)}`.
    pub choi_effros_deviation: f64,
}

impl AveragingReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_difference <= tol && self.choi_effros_deviation <= tol
    }
}

pub fn verify_averaging_identities(x: &ToeplitzElement, y: &ToeplitzElement) -> AveragingReport {
    let px = x.project_phi();
    let py = y.project_phi();
    let left = px.mul(y).project_phi();
    let middle = x.mul(&py).project_phi();
    let choi_effros = px.mul(&py).project_phi();
    let max_difference = left
        .max_difference(&middle)
        .max(left.max_difference(&choi_effros))
        .max(middle.max_difference(&choi_effros));
    let target = ToeplitzElement::toeplitz(x.symbol_map().mul(&y.symbol_map()))
        .expect("one-variable symbol");
    let choi_effros_deviation = choi_effros.max_difference(&target);
    AveragingReport {
        left,
        middle,
        choi_effros,
        max_difference,
        choi_effros_deviation,
    }
}

/// Pass or not-yet-converged verdict of a norm bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BracketVerdict {
    Pass,
    Inconclusive,
}

/// Norm evidence for the cross section `φ ↦ T_φ` at matrix level `k`.
#[derive(Debug, Clone, Serialize)]
pub struct CrossSectionReport {
    pub level: usize,
    /// `(N, ‖P_N [T_{φ_ab}] P_N‖)`; lower bounds for the operator norm.
    pub truncation_norms: Vec<(usize, f64)>,
    /// `max_x ‖[φ_ab(x)]‖` over the evaluation grid.
    pub sup_lower: f64,
    /// `Σ_k ‖[φ̂_ab(k)]‖`, an upper bound for both sides.
    pub l1_upper: f64,
    /// Whether the truncation norms are nondecreasing (to 1e-12).
    pub monotone: bool,
    pub gap: f64,
    pub verdict: BracketVerdict,
}

/// Truncation sizes `64, 128, …` up to `max_trunc` (always ending there).
fn truncation_schedule(max_trunc: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut n = 64;
    while n < max_trunc {
        sizes.push(n);
        n *= 2;
    }
    sizes.push(max_trunc.max(1));
    sizes
}

/// Block truncation of `[T_{φ_ab}]` with interleaved indices `i·k + a`.
pub fn block_truncation(symbols: &[Vec<LaurentPoly>], n: usize) -> Result<BandMatrix> {
    let k = symbols.len();
    if k == 0 || symbols.iter().any(|row| row.len() != k) {
        return Err(Error::Precondition("symbol matrix must be square and nonempty".into()));
    }
    for phi in symbols.iter().flatten() {
        require_one_var(phi)?;
    }
    let dp = symbols.iter().flatten().map(LaurentPoly::deg_plus).max().unwrap_or(0);
    let dm = symbols.iter().flatten().map(LaurentPoly::deg_minus).max().unwrap_or(0);
    let size = n * k;
    let lower = ((dp + 1) * k).min(size.saturating_sub(1));
    let upper = ((dm + 1) * k).min(size.saturating_sub(1));
    let mut m = BandMatrix::zeros(size, lower, upper);
    for i in 0..n {
        for j in i.saturating_sub(dp)..(i + dm + 1).min(n) {
            for (a, row) in symbols.iter().enumerate() {
                for (b, phi) in row.iter().enumerate() {
                    let v = phi.coeff1(i as i64 - j as i64);
                    if v != ZERO {
                        m.set(i * k + a, j * k + b, v);
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Norm bracket for the completely isometric cross section at level
/// `k = symbols.len()`.
pub fn cross_section_isometry(
    symbols: &[Vec<LaurentPoly>],
    max_trunc: usize,
    grid_size: usize,
    tol: f64,
) -> Result<CrossSectionReport> {
    let k = symbols.len();
    if !(1..=3).contains(&k) {
        return Err(Error::Precondition(format!("level must be 1, 2 or 3, got {k}")));
    }
    let mut truncation_norms = Vec::new();
    for n in truncation_schedule(max_trunc) {
        let m = block_truncation(symbols, n)?;
        truncation_norms.push((n, linalg::op_norm_band(&m)));
    }
    let monotone = truncation_norms.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12);

    let grids: Vec<Vec<Vec<C64>>> = symbols
        .iter()
        .map(|row| row.iter().map(|phi| symbols::eval_grid(phi, grid_size).samples).collect())
        .collect();
    let mut sup_lower: f64 = 0.0;
    for x in 0..grid_size {
        let pointwise = CMatrix::from_fn(k, k, |a, b| grids[a][b][x]);
        sup_lower = sup_lower.max(linalg::op_norm(&pointwise, 0.0)?);
    }

    let lo_exp = symbols.iter().flatten().map(LaurentPoly::min_exp).min().unwrap_or(0);
    let hi_exp = symbols.iter().flatten().map(LaurentPoly::max_exp).max().unwrap_or(0);
    let mut l1_upper = 0.0;
    for e in lo_exp..=hi_exp {
        let coeffs = CMatrix::from_fn(k, k, |a, b| symbols[a][b].coeff1(e as i64));
        l1_upper += linalg::op_norm(&coeffs, 0.0)?;
    }

    let last = truncation_norms.last().map_or(0.0, |t| t.1);
    let gap = (last - sup_lower).abs();
    Ok(CrossSectionReport {
        level: k,
        truncation_norms,
        sup_lower,
        l1_upper,
        monotone,
        gap,
        verdict: if gap <= tol {
            BracketVerdict::Pass
        } else {
            BracketVerdict::Inconclusive
        },
    })
}

/// Position of an element relative to the commutant of the shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CommutantClass {
    NotToeplitz,
    ToeplitzNotAnalytic,
    AnalyticToeplitz,
}

/// Lift of an analytic Toeplitz operator to the commutant of the minimal
/// normal extension: multiplication by the symbol on `L²(𝕋)`.
#[derive(Debug, Clone, Serialize)]
pub struct CommutantLift {
    pub symbol: LaurentPoly,
    /// Max difference between the compression of the bilateral
    /// multiplication matrix to indices `≥ 0` and the Toeplitz truncation.
    pub restriction_residual: f64,
    /// Max entry of `M_ψ M_z − M_z M_ψ` on the bilateral window interior.
    pub bilateral_commutator: f64,
    /// `(grid lower, ℓ¹ upper)` for `‖ψ‖_∞ = ‖M_ψ‖`.
    pub sup_bracket: (f64, f64),
    /// `‖P_N T_ψ P_N‖` at the requested truncation.
    pub truncation_lower: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutantReport {
    pub class: CommutantClass,
    /// `X` and `X*X` both Toeplitz.
    pub toeplitz_pair_test: bool,
    /// `X T_z = T_z X`.
    pub commutes_with_shift: bool,
    pub criteria_agree: bool,
    pub lift: Option<CommutantLift>,
}

/// Bilateral multiplication matrix of `ψ` on `L²(𝕋)` over indices `−m..=m`.
pub fn bilateral_multiplication(psi: &LaurentPoly, m: usize) -> CMatrix {
    let size = 2 * m + 1;
    CMatrix::from_fn(size, size, |i, j| psi.coeff1(i as i64 - j as i64))
}

fn lift_evidence(psi: &LaurentPoly, trunc: usize, grid_size: usize) -> Result<CommutantLift> {
    let window = 2 * psi.band() + 8;
    let bilateral = bilateral_multiplication(psi, window);
    let toeplitz = ToeplitzElement::toeplitz(psi.clone())?;
    let compressed = CMatrix::from_fn(window + 1, window + 1, |i, j| bilateral[(window + i, window + j)]);
    let restriction_residual = compressed
        .sub(&toeplitz.truncation(window + 1))?
        .max_abs();
    let shift = bilateral_multiplication(&LaurentPoly::var(1, 0), window);
    let comm = bilateral.matmul(&shift)?.sub(&shift.matmul(&bilateral)?)?;
    // the window edges see truncation effects, the interior does not
    let edge = psi.band() + 1;
    let mut bilateral_commutator: f64 = 0.0;
    for i in edge..comm.rows() - edge {
        for j in edge..comm.cols() - edge {
            bilateral_commutator = bilateral_commutator.max(comm[(i, j)].norm());
        }
    }
    Ok(CommutantLift {
        symbol: psi.clone(),
        restriction_residual,
        bilateral_commutator,
        sup_bracket: symbols::sup_norm(psi, grid_size),
        truncation_lower: linalg::op_norm_band(&toeplitz.truncation_band(trunc)),
    })
}

/// Classify `X` by the `(X, X*X)` Toeplitz test, cross-checked against
/// commutation with the shift; analytic Toeplitz operators come with their
/// lift and norm evidence.
pub fn commutant_character(x: &ToeplitzElement, trunc: usize, grid_size: usize) -> Result<CommutantReport> {
    let shift = ToeplitzElement::shift();
    let toeplitz = x.is_toeplitz();
    let toeplitz_pair_test = toeplitz && x.adjoint().mul(x).is_toeplitz();
    let commutator = x.mul(&shift).sub(&shift.mul(x));
    let scale = x.norm_upper().max(1.0);
    let commutes_with_shift = commutator.max_difference(&ToeplitzElement::zero()) <= 1e-12 * scale;
    let class = if !toeplitz {
        CommutantClass::NotToeplitz
    } else if toeplitz_pair_test {
        CommutantClass::AnalyticToeplitz
    } else {
        CommutantClass::ToeplitzNotAnalytic
    };
    let lift = if class == CommutantClass::AnalyticToeplitz {
        Some(lift_evidence(x.symbol(), trunc, grid_size)?)
    } else {
        None
    };
    Ok(CommutantReport {
        class,
        toeplitz_pair_test,
        commutes_with_shift,
        criteria_agree: toeplitz_pair_test == commutes_with_shift,
        lift,
    })
}

/// Evidence that `0 → ker π → C*(T_z) → C(𝕋) → 0` is realized on a pair.
#[derive(Debug, Clone, Serialize)]
pub struct ExactSequenceReport {
    pub x: ToeplitzElement,
    pub y: ToeplitzElement,
    pub symbol_product: LaurentPoly,
    /// Rank of the correction of `XY`.
    pub correction_rank: usize,
    /// `π(XY) = π(X)π(Y)`, max coefficient deviation.
    pub multiplicativity_residual: f64,
    /// `π(X*) = conj π(X)`, max coefficient deviation.
    pub star_residual: f64,
    /// `XY − Φ(XY)` has zero symbol.
    pub kernel_membership: bool,
    /// Cross-section norm bracket for `π(XY)`.
    pub cross_section: CrossSectionReport,
}

pub fn exact_sequence_report(
    x: &ToeplitzElement,
    y: &ToeplitzElement,
    max_trunc: usize,
    grid_size: usize,
) -> Result<ExactSequenceReport> {
    let xy = x.mul(y);
    let symbol_product = x.symbol_map().mul(&y.symbol_map());
    let coeff_dev = |a: &LaurentPoly, b: &LaurentPoly| {
        a.sub(b).terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    };
    let multiplicativity_residual = coeff_dev(&xy.symbol_map(), &symbol_product);
    let star_residual = coeff_dev(&x.adjoint().symbol_map(), &x.symbol_map().conj());
    let kernel_membership = xy.sub(&xy.project_phi()).symbol_map().is_zero();
    let cross_section = cross_section_isometry(&[vec![symbol_product.clone()]], max_trunc, grid_size, 1e-3)?;
    Ok(ExactSequenceReport {
        x: x.clone(),
        y: y.clone(),
        correction_rank: xy.correction_rank(),
        symbol_product,
        multiplicativity_residual,
        star_residual,
        kernel_membership,
        cross_section,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> LaurentPoly {
        LaurentPoly::parse(s).unwrap()
    }

    fn t(s: &str) -> ToeplitzElement {
        make_toeplitz(&sym(s)).unwrap()
    }

    fn e(i: usize, j: usize) -> ToeplitzElement {
        ToeplitzElement::unit(i, j)
    }

    fn id() -> ToeplitzElement {
        ToeplitzElement::identity()
    }

    #[test]
    fn shift_matrix_is_subdiagonal() {
        let m = t("z").truncation(5);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j + 1 { ONE } else { ZERO };
                assert_eq!(m[(i, j)], expect);
            }
        }
        assert_eq!(t("1").truncation(4), CMatrix::identity(4));
        let tri = t("z + zbar").truncation(6);
        for i in 0..6usize {
            for j in 0..6 {
                let expect = if i.abs_diff(j) == 1 { ONE } else { ZERO };
                assert_eq!(tri[(i, j)], expect);
            }
        }
    }

    #[test]
    fn product_examples() {
        assert_eq!(t("zbar").mul(&t("z")), id());
        assert_eq!(t("z").mul(&t("zbar")), id().sub(&e(0, 0)));
        assert_eq!(t("z^2").mul(&t("zbar")), t("z").sub(&e(1, 0)));
    }

    #[test]
    fn product_matches_truncated_matrices() {
        // direct computation on e_0, e_1, … at truncation 8
        let n = 8;
        let a = t("z^2");
        let b = t("zbar");
        let direct = a.truncation(n + 4).matmul(&b.truncation(n + 4)).unwrap().resized(n, n);
        assert_eq!(a.mul(&b).truncation(n), direct);
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(t("z").adjoint(), t("zbar"));
        let p = id().sub(&e(0, 0));
        assert_eq!(p.adjoint(), p);
    }

    #[test]
    fn phi_map_examples() {
        let phi = t("3*z^2 - (1+2i)*zbar + 0.5");
        assert_eq!(phi.phi_map(), phi);
        assert_eq!(e(0, 0).phi_map(), ToeplitzElement::zero());
        assert_eq!(t("z").add(&e(1, 1)).phi_map(), t("z").add(&e(0, 0)));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(id().sub(&e(0, 0)).project_phi(), id());
        assert_eq!(t("z").add(&e(1, 0)).project_phi(), t("z"));
        let x = t("z + zbar");
        let sq = x.mul(&x);
        assert_eq!(sq.project_phi(), t("z^2 + 2 + zbar^2"));
        assert_eq!(sq.project_phi().symbol(), &x.symbol().mul(x.symbol()));
    }

    #[test]
    fn averaging_examples() {
        let r = verify_averaging_identities(&t("z").add(&e(0, 0)), &t("zbar"));
        assert!(r.holds(0.0));
        assert_eq!(r.choi_effros, id());

        let phi = t("z^2 - 0.5*zbar");
        let r = verify_averaging_identities(&phi, &phi);
        assert!(r.holds(1e-15));
        assert_eq!(r.choi_effros, make_toeplitz(&phi.symbol().pow(2)).unwrap());

        let r = verify_averaging_identities(&e(0, 0), &e(0, 0));
        assert!(r.holds(0.0));
        assert_eq!(r.left, ToeplitzElement::zero());
    }

    #[test]
    fn symbol_map_examples() {
        assert_eq!(t("z").mul(&t("zbar")).symbol_map(), LaurentPoly::one(1));
        assert!(e(0, 0).symbol_map().is_zero());
        // coefficient convolution oracle for (1+z)(1+zbar)
        let got = t("1 + z").mul(&t("1 + zbar")).symbol_map();
        assert_eq!(got, sym("2 + z + zbar"));
    }

    #[test]
    fn brown_halmos_examples() {
        assert!(t("z^3 + 2*zbar").is_toeplitz());
        assert!(!id().sub(&e(0, 0)).is_toeplitz());
        let defect = t("z").mul(&t("zbar"));
        assert!(!defect.is_toeplitz());
        assert!(defect.project_phi().is_toeplitz());
    }

    #[test]
    fn semicommutator_examples() {
        assert_eq!(semicommutator(&sym("zbar"), &sym("z")).unwrap(), ToeplitzElement::zero());
        assert_eq!(semicommutator(&sym("z"), &sym("zbar")).unwrap(), e(0, 0).scale(-ONE));
        let expect = e(0, 0).add(&e(1, 1)).scale(-ONE);
        assert_eq!(semicommutator(&sym("z^2"), &sym("zbar^2")).unwrap(), expect);
    }

    #[test]
    fn commutant_examples() {
        let r = commutant_character(&t("z"), 256, 512).unwrap();
        assert_eq!(r.class, CommutantClass::AnalyticToeplitz);
        assert!(r.criteria_agree);
        let lift = r.lift.unwrap();
        assert_eq!(lift.sup_bracket, (1.0, 1.0));
        assert!((lift.truncation_lower - 1.0).abs() < 1e-12);
        assert_eq!(lift.restriction_residual, 0.0);
        assert_eq!(lift.bilateral_commutator, 0.0);

        let r = commutant_character(&t("zbar"), 64, 64).unwrap();
        assert_eq!(r.class, CommutantClass::ToeplitzNotAnalytic);
        assert!(!r.commutes_with_shift && r.criteria_agree && r.lift.is_none());
        let r = commutant_character(&t("z + zbar"), 64, 64).unwrap();
        assert_eq!(r.class, CommutantClass::ToeplitzNotAnalytic);
        let x = t("z + zbar");
        assert_eq!(x.adjoint().mul(&x).correction_rank(), 1);
        let r = commutant_character(&t("z").add(&e(0, 0)), 64, 64).unwrap();
        assert_eq!(r.class, CommutantClass::NotToeplitz);
        assert!(r.criteria_agree);
    }

    #[test]
    fn cross_section_examples() {
        let r = cross_section_isometry(&[vec![sym("z")]], 128, 512, 1e-8).unwrap();
        assert_eq!(r.verdict, BracketVerdict::Pass);
        assert!((r.sup_lower - 1.0).abs() < 1e-15);

        let r = cross_section_isometry(&[vec![sym("z + zbar")]], 256, 720, 1e-3).unwrap();
        for &(n, v) in &r.truncation_norms {
            let oracle = 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((v - oracle).abs() <= 1e-10, "N={n}: {v} vs {oracle}");
        }
        assert!(r.monotone);
        assert_eq!(r.verdict, BracketVerdict::Pass);

        let blocks = vec![
            vec![sym("z"), LaurentPoly::zero(1)],
            vec![LaurentPoly::zero(1), sym("zbar")],
        ];
        let r = cross_section_isometry(&blocks, 128, 256, 1e-8).unwrap();
        assert!((r.truncation_norms.last().unwrap().1 - 1.0).abs() <= 1e-8);
        assert!((r.sup_lower - 1.0).abs() <= 1e-8);

        let r = cross_section_isometry(&[vec![sym("z + zbar")]], 64, 720, 1e-6).unwrap();
        assert_eq!(r.verdict, BracketVerdict::Inconclusive);
        assert!(cross_section_isometry(&[], 64, 64, 1e-3).is_err());
    }

    #[test]
    fn far_diagonals_carry_the_symbol() {
        let x = t("z^2 - zbar^3").add(&ToeplitzElement::finite(CMatrix::from_fn(3, 2, |i, j| {
            C64::new(i as f64 + 1.0, j as f64)
        })));
        let n = 20;
        let m = x.truncation(n);
        for i in 6..n {
            for j in 6..n {
                assert_eq!(m[(i, j)], x.symbol().coeff1(i as i64 - j as i64));
            }
        }
    }

    #[test]
    fn serde_roundtrip_and_validation() {
        let x = t("(0.1+0.2i)*z^3 - zbar").add(&e(2, 1).scale(C64::new(1.0 / 3.0, -0.7)));
        let s = serde_json::to_string(&x).unwrap();
        let y: ToeplitzElement = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        let bad = r#"{"symbol":{"0":[1.0,0.0]},"correction":{"rows":1,"cols":2,"entries":[[1,0],[0,0]]}}"#;
        assert!(serde_json::from_str::<ToeplitzElement>(bad).is_err());
        let two_var = r#"{"symbol":{"0,1":[1.0,0.0]},"correction":{"rows":0,"cols":0,"entries":[]}}"#;
        assert!(serde_json::from_str::<ToeplitzElement>(two_var).is_err());
    }
}
