//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are small enough (a few thousand rows at most) that everything is
//! stored densely, except for the banded fast path used by norm and extreme
//! eigenvalue computations on Toeplitz truncations.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Pivots below this fraction of the largest pivot count as zero.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl TryFrom<RawMatrix> for CMatrix {
    type Error = String;

    fn try_from(raw: RawMatrix) -> std::result::Result<Self, String> {
        if raw.entries.len() != raw.rows * raw.cols {
            return Err(format!(
                "entries length {} != rows*cols = {}",
                raw.entries.len(),
                raw.rows * raw.cols
            ));
        }
        if raw.entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err("non-finite matrix entry".into());
        }
        Ok(CMatrix {
            rows: raw.rows,
            cols: raw.cols,
            data: raw.entries,
        })
    }
}

impl From<CMatrix> for RawMatrix {
    fn from(m: CMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.data,
        }
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(CMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Entry lookup that returns zero outside the stored block.
    pub fn get_or_zero(&self, i: usize, j: usize) -> C64 {
        if i < self.rows && j < self.cols {
            self.data[i * self.cols + j]
        } else {
            ZERO
        }
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).fold(0.0, |s, x| s + x).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian part `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        }))
    }

    /// Copy of the `rows x cols` block starting at the origin, zero padded.
    pub fn resized(&self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| self.get_or_zero(i, j))
    }

    /// Largest `|i - j|` over nonzero entries, split into (lower, upper).
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut lo, mut up) = (0, 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self[(i, j)] != ZERO {
                    if i > j {
                        lo = lo.max(i - j);
                    } else {
                        up = up.max(j - i);
                    }
                }
            }
        }
        (lo, up)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (r2, c2) = (other.rows, other.cols);
        CMatrix::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).fold(0.0, |s, x| s + x).sqrt()
}

/// Square matrix with entries confined to `lower` subdiagonals and `upper`
/// superdiagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    // row i holds columns i-lower ..= i+upper
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        BandMatrix {
            n,
            lower,
            upper,
            data: vec![ZERO; n * (lower + upper + 1)],
        }
    }

    pub fn from_dense(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let (lower, upper) = a.bandwidths();
        let mut b = BandMatrix::zeros(a.rows(), lower, upper);
        for i in 0..a.rows() {
            for j in i.saturating_sub(lower)..(i + upper + 1).min(a.cols()) {
                b.set(i, j, a[(i, j)]);
            }
        }
        Ok(b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.lower < i || j > i + self.upper {
            None
        } else {
            Some(i * (self.lower + self.upper + 1) + (j + self.lower - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.slot(i, j).map_or(ZERO, |s| self.data[s])
    }

    /// Panics when `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside band"));
        self.data[s] = v;
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Interleaved hermitian dilation `[[0, A], [A*, 0]]`, whose largest
    /// eigenvalue is the largest singular value of `A`.
    fn dilation(&self) -> HermBand {
        let bw = (2 * self.upper + 1).max((2 * self.lower).saturating_sub(1));
        let mut h = HermBand::zeros(2 * self.n, bw);
        for i in 0..self.n {
            for j in i.saturating_sub(self.lower)..(i + self.upper + 1).min(self.n) {
                let a = self.get(i, j);
                let (r, c) = (2 * i, 2 * j + 1);
                if r >= c {
                    h.set_lower(r, c, a);
                } else {
                    h.set_lower(c, r, a.conj());
                }
            }
        }
        h
    }

    /// Hermitian part of `e^{iθ} A`, as a banded hermitian matrix.
    fn rotated_hermitian_part(&self, theta: f64) -> HermBand {
        let rot = C64::from_polar(1.0, theta);
        let bw = self.lower.max(self.upper);
        let mut h = HermBand::zeros(self.n, bw);
        for i in 0..self.n {
            for j in i.saturating_sub(bw)..=i {
                let v = (rot * self.get(i, j) + (rot * self.get(j, i)).conj()) * 0.5;
                h.set_lower(i, j, v);
            }
        }
        h
    }
}

/// Hermitian matrix stored by its lower band.
#[derive(Debug, Clone)]
struct HermBand {
    n: usize,
    bw: usize,
    // row i holds columns i-bw ..= i
    data: Vec<C64>,
}

impl HermBand {
    fn zeros(n: usize, bw: usize) -> Self {
        HermBand {
            n,
            bw,
            data: vec![ZERO; n * (bw + 1)],
        }
    }

    fn lower(&self, i: usize, j: usize) -> C64 {
        if i - j > self.bw {
            ZERO
        } else {
            self.data[i * (self.bw + 1) + (j + self.bw - i)]
        }
    }

    fn set_lower(&mut self, i: usize, j: usize, v: C64) {
        debug_assert!(j <= i && i - j <= self.bw);
        self.data[i * (self.bw + 1) + (j + self.bw - i)] = v;
    }

    fn gershgorin(&self) -> (f64, f64) {
        let mut radius = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..i {
                let a = self.lower(i, j).norm();
                radius[i] += a;
                radius[j] += a;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, r) in radius.iter().enumerate() {
            let d = self.lower(i, i).re;
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    /// Whether `sigma·I - H` admits a banded Cholesky factorization.
    fn shifted_is_positive_definite(&self, sigma: f64, work: &mut Vec<C64>) -> bool {
        let (n, bw) = (self.n, self.bw);
        work.clear();
        work.resize(n * (bw + 1), ZERO);
        let at = |i: usize, j: usize| i * (bw + 1) + (j + bw - i);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = if i == j {
                    C64::new(sigma - self.lower(i, i).re, 0.0)
                } else {
                    -self.lower(i, j)
                };
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= work[at(i, k)] * work[at(j, k)].conj();
                }
                if i == j {
                    if !(s.re > 0.0) {
                        return false;
                    }
                    work[at(i, i)] = C64::new(s.re.sqrt(), 0.0);
                } else {
                    work[at(i, j)] = s / work[at(j, j)].re;
                }
            }
        }
        true
    }

    /// Bracket `(lo, hi)` around the largest eigenvalue: `sigma·I - H` fails
    /// Cholesky at `lo` and succeeds at `hi`.
    fn max_eig_bracket(&self, rel_tol: f64) -> (f64, f64) {
        if self.n == 0 {
            return (0.0, 0.0);
        }
        let (glo, ghi) = self.gershgorin();
        if glo == ghi {
            return (glo, ghi);
        }
        let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
        let mut work = Vec::new();
        let mut hi = ghi + 1e-12 * scale;
        while !self.shifted_is_positive_definite(hi, &mut work) {
            hi += 1e-12 * scale + (hi - glo).abs();
        }
        let mut lo = glo - 1e-12 * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= rel_tol.max(4.0 * f64::EPSILON) * scale {
                break;
            }
            if self.shifted_is_positive_definite(mid, &mut work) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }
}

fn require_hermitian(a: &CMatrix, tol: f64) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let deviation = a.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    Ok(())
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a hermitian matrix
/// by cyclic Jacobi rotations.
pub fn herm_eig(a: &CMatrix, tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    require_hermitian(a, tol)?;
    let n = a.rows();
    let mut m = a.hermitian_part()?;
    let mut v = CMatrix::identity(n);
    let norm = m.frobenius().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let phase = b / babs;
                let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let u00 = C64::new(c, 0.0);
                let u01 = C64::new(s, 0.0);
                let u10 = -phase.conj() * s;
                let u11 = phase.conj() * c;
                for k in 0..n {
                    let (akp, akq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = akp * u00 + akq * u10;
                    m[(k, q)] = akp * u01 + akq * u11;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
                    m[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * u00 + vkq * u10;
                    v[(k, q)] = vkp * u01 + vkq * u11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Sorted eigenvalues of a hermitian matrix.
pub fn herm_eigs(a: &CMatrix, tol: f64) -> Result<Vec<f64>> {
    herm_eig(a, tol).map(|(values, _)| values)
}

/// Largest eigenvalue of a hermitian matrix by Cholesky bisection.
pub fn max_herm_eig(a: &CMatrix, tol: f64) -> Result<f64> {
    require_hermitian(a, tol)?;
    let band = BandMatrix::from_dense(a)?;
    let bw = band.lower.max(band.upper);
    let mut h = HermBand::zeros(a.rows(), bw);
    for i in 0..a.rows() {
        for j in i.saturating_sub(bw)..=i {
            h.set_lower(i, j, (a[(i, j)] + a[(j, i)].conj()) * 0.5);
        }
    }
    let (lo, hi) = h.max_eig_bracket(0.0);
    Ok(0.5 * (lo + hi))
}

/// Largest eigenvalue of the hermitian part of `e^{iθ} A` for banded `A`.
pub fn max_rotated_real_part(a: &BandMatrix, theta: f64) -> f64 {
    let (lo, hi) = a.rotated_hermitian_part(theta).max_eig_bracket(0.0);
    0.5 * (lo + hi)
}

/// Largest singular value of a banded matrix.
pub fn op_norm_band(a: &BandMatrix) -> f64 {
    op_norm_band_tol(a, 0.0)
}

fn op_norm_band_tol(a: &BandMatrix, rel_tol: f64) -> f64 {
    if a.n == 0 {
        return 0.0;
    }
    let (lo, hi) = a.dilation().max_eig_bracket(rel_tol);
    (0.5 * (lo + hi)).max(0.0)
}

/// Largest singular value `σ_max(A)`.
///
/// Computed as the top eigenvalue of the hermitian dilation of `A`, located
/// by bisection on Cholesky success, stopped once the bracket is within
/// `tol` relative to its Gershgorin scale. Banded inputs stay banded.
pub fn op_norm(a: &CMatrix, tol: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::Precondition("matrix has non-finite entries".into()));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    if a.is_square() {
        return Ok(op_norm_band_tol(&BandMatrix::from_dense(a)?, tol));
    }
    let n = a.rows().max(a.cols());
    op_norm(&a.resized(n, n), tol)
}

#[derive(Debug, Clone)]
pub struct LsqSolution {
    pub x: Vec<C64>,
    pub residual: f64,
    pub rank: usize,
}

/// Householder QR with column pivoting; returns (R factor stored in `a`,
/// Householder vectors, permutation, detected rank).
struct PivotedQr {
    qr: CMatrix,
    taus: Vec<(Vec<C64>, C64)>,
    perm: Vec<usize>,
    rank: usize,
}

fn pivoted_qr(a: &CMatrix) -> PivotedQr {
    let (m, n) = (a.rows(), a.cols());
    let mut qr = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut taus = Vec::new();
    let steps = m.min(n);
    let mut colnorm: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| qr[(i, j)].norm_sqr()).sum())
        .collect();
    let mut first_pivot = 0.0;
    let mut rank = 0;

    for k in 0..steps {
        let p = (k..n)
            .max_by(|&x, &y| colnorm[x].total_cmp(&colnorm[y]))
            .unwrap_or(k);
        if p != k {
            perm.swap(k, p);
            colnorm.swap(k, p);
            for i in 0..m {
                let tmp = qr[(i, k)];
                qr[(i, k)] = qr[(i, p)];
                qr[(i, p)] = tmp;
            }
        }
        let x: Vec<C64> = (k..m).map(|i| qr[(i, k)]).collect();
        let xnorm = vec_norm(&x);
        if k == 0 {
            first_pivot = xnorm;
        }
        if xnorm <= RANK_THRESHOLD * first_pivot || xnorm == 0.0 {
            break;
        }
        rank += 1;
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            ONE
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = if vnorm2 > 0.0 {
            C64::new(2.0 / vnorm2, 0.0)
        } else {
            ZERO
        };
        // apply H = I - tau v v* to the trailing block
        for j in k..n {
            let dot: C64 = (k..m).map(|i| v[i - k].conj() * qr[(i, j)]).sum();
            let f = tau * dot;
            for i in k..m {
                qr[(i, j)] -= f * v[i - k];
            }
        }
        for j in k + 1..n {
            colnorm[j] = (k + 1..m).map(|i| qr[(i, j)].norm_sqr()).sum();
        }
        taus.push((v, tau));
    }
    PivotedQr {
        qr,
        taus,
        perm,
        rank,
    }
}

/// Numerical rank with the pivot threshold `RANK_THRESHOLD`.
pub fn rank(a: &CMatrix) -> usize {
    if a.is_empty() {
        0
    } else {
        pivoted_qr(a).rank
    }
}

/// Least-squares solution of `A x ≈ b` for full column rank `A`.
pub fn solve_lsq(a: &CMatrix, b: &[C64]) -> Result<LsqSolution> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::Dimension(format!(
            "right-hand side length {} for {} rows",
            b.len(),
            m
        )));
    }
    let f = pivoted_qr(a);
    if f.rank < n {
        return Err(Error::RankDeficient {
            rank: f.rank,
            cols: n,
        });
    }
    let mut y = b.to_vec();
    for (k, (v, tau)) in f.taus.iter().enumerate() {
        let dot: C64 = (k..m).map(|i| v[i - k].conj() * y[i]).sum();
        let s = tau * dot;
        for i in k..m {
            y[i] -= s * v[i - k];
        }
    }
    let mut z = vec![ZERO; n];
    for k in (0..n).rev() {
        let mut s = y[k];
        for j in k + 1..n {
            s -= f.qr[(k, j)] * z[j];
        }
        z[k] = s / f.qr[(k, k)];
    }
    let mut x = vec![ZERO; n];
    for (k, &p) in f.perm.iter().enumerate() {
        x[p] = z[k];
    }
    let ax = a.matvec(&x)?;
    let r: Vec<C64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    Ok(LsqSolution {
        x,
        residual: vec_norm(&r),
        rank: f.rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, cl: usize) -> CMatrix {
        CMatrix::from_fn(r, cl, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = random_matrix(rng, n, n);
        a.add(&a.adjoint()).unwrap().scale(c(0.5))
    }

    #[test]
    fn identity_eigenvalues() {
        let e = herm_eigs(&CMatrix::identity(3), 1e-12).unwrap();
        assert_eq!(e, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let e = herm_eigs(&CMatrix::diag(&[c(2.0), c(-1.0)]), 1e-12).unwrap();
        assert_eq!(e, vec![-1.0, 2.0]);
    }

    #[test]
    fn eigenpairs_have_small_residual_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 5, 12] {
            let a = random_hermitian(&mut rng, n);
            let (vals, vecs) = herm_eig(&a, 1e-12).unwrap();
            let anorm = op_norm(&a, 1e-12).unwrap();
            for (k, &lam) in vals.iter().enumerate() {
                let v: Vec<C64> = (0..n).map(|i| vecs[(i, k)]).collect();
                let av = a.matvec(&v).unwrap();
                let r: Vec<C64> = av.iter().zip(&v).map(|(x, y)| x - y * lam).collect();
                assert!(vec_norm(&r) <= 1e-12 * anorm.max(1.0));
            }
            let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
            assert!((vals.iter().sum::<f64>() - trace).abs() <= 1e-12 * n as f64);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = CMatrix::from_rows(&[vec![c(1.0), c(2.0)], vec![c(0.0), c(1.0)]]).unwrap();
        assert!(matches!(herm_eigs(&a, 1e-12), Err(Error::NotHermitian { .. })));
        let r = CMatrix::zeros(2, 3);
        assert!(matches!(herm_eigs(&r, 1e-12), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn zero_and_unitary_norms() {
        assert_eq!(op_norm(&CMatrix::zeros(4, 4), 1e-12).unwrap(), 0.0);
        // permutation times phases
        let mut u = CMatrix::zeros(4, 4);
        for i in 0..4 {
            u[((i + 1) % 4, i)] = C64::from_polar(1.0, 0.3 * i as f64);
        }
        assert!((op_norm(&u, 1e-12).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn op_norm_matches_gram_eigenvalue() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 6, 6);
        let gram = a.adjoint().matmul(&a).unwrap();
        let top = *herm_eigs(&gram, 1e-10).unwrap().last().unwrap();
        assert!((op_norm(&a, 1e-12).unwrap() - top.sqrt()).abs() <= 1e-10);
    }

    #[test]
    fn op_norm_rectangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_matrix(&mut rng, 7, 3);
        let gram = a.adjoint().matmul(&a).unwrap();
        let top = *herm_eigs(&gram, 1e-10).unwrap().last().unwrap();
        assert!((op_norm(&a, 1e-12).unwrap() - top.sqrt()).abs() <= 1e-10);
    }

    #[test]
    fn banded_norm_of_tridiagonal_matches_closed_form() {
        for n in [8usize, 64, 300] {
            let mut b = BandMatrix::zeros(n, 1, 1);
            for i in 0..n - 1 {
                b.set(i + 1, i, ONE);
                b.set(i, i + 1, ONE);
            }
            let expect = 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((op_norm_band(&b) - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn max_herm_eig_agrees_with_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(&mut rng, 9);
        let top = *herm_eigs(&a, 1e-12).unwrap().last().unwrap();
        assert!((max_herm_eig(&a, 1e-12).unwrap() - top).abs() <= 1e-12);
    }

    #[test]
    fn lsq_identity_and_consistent() {
        let b = vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5), c(4.0)];
        let s = solve_lsq(&CMatrix::identity(3), &b).unwrap();
        for (x, y) in s.x.iter().zip(&b) {
            assert!((x - y).norm() <= 1e-14);
        }
        let a = CMatrix::from_rows(&[
            vec![c(1.0), c(0.0)],
            vec![c(0.0), c(1.0)],
            vec![c(1.0), c(1.0)],
        ])
        .unwrap();
        let s = solve_lsq(&a, &[c(2.0), c(3.0), c(5.0)]).unwrap();
        assert!(s.residual <= 1e-12);
        assert!((s.x[0] - c(2.0)).norm() <= 1e-12 && (s.x[1] - c(3.0)).norm() <= 1e-12);
    }

    #[test]
    fn lsq_recovers_planted_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 8, 4);
        let plant: Vec<C64> = (0..4)
            .map(|_| C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let b = a.matvec(&plant).unwrap();
        let s = solve_lsq(&a, &b).unwrap();
        for (x, y) in s.x.iter().zip(&plant) {
            assert!((x - y).norm() <= 1e-10);
        }
    }

    #[test]
    fn lsq_reports_rank_deficiency() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0), c(2.0), c(3.0)],
            vec![c(2.0), c(4.0), c(6.0)],
            vec![c(1.0), c(0.0), c(1.0)],
            vec![c(0.0), c(1.0), c(1.0)],
        ])
        .unwrap();
        match solve_lsq(&a, &[ONE; 4]) {
            Err(Error::RankDeficient { rank, cols }) => {
                assert_eq!((rank, cols), (2, 3));
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn serde_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 3, 2);
        let s = serde_json::to_string(&a).unwrap();
        let b: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<CMatrix>(r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#).is_err());
    }
}
