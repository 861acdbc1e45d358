//! Tensor model of `H²(𝕋²) = H²(𝕋) ⊗ H²(𝕋)` for the bidisc.
//!
//! Elements are finite sums `Σ Aᵢ ⊗ Bᵢ` of circle elements. The coordinate
//! tuple is `T_{z₁} = T_z ⊗ I`, `T_{z₂} = I ⊗ T_z`, and `z/γ` with `γ = √2`
//! maps the distinguished boundary into the unit sphere.

use serde::{Deserialize, Serialize};

use crate::circle::ToeplitzElement;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};

/// Maximum number of terms a product may produce.
pub const MAX_TERMS: usize = 4096;

/// Default truncation per factor for equality and norm evidence.
pub const DEFAULT_TRUNCATION: usize = 32;

/// Tolerance on the norm upper bound for the `TOEPLITZ` verdict.
pub const VERDICT_TOL: f64 = 1e-10;

/// `γ = max{|ζ| : ζ in the closed polydisc} = √n`.
pub fn gamma(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    Ok((n as f64).sqrt())
}

/// `γ² = n`, without the round trip through the square root.
fn gamma_sq(n: usize) -> f64 {
    n as f64
}

fn is_zero(a: &ToeplitzElement) -> bool {
    a.symbol().is_zero() && a.correction().is_empty()
}

/// `c` with `y = c·x` exactly, if there is one.
fn ratio(x: &ToeplitzElement, y: &ToeplitzElement) -> Option<C64> {
    let pivot = x
        .symbol()
        .terms()
        .next()
        .map(|(e, c)| (c, y.symbol().coeff(e)))
        .or_else(|| {
            let f = x.correction();
            f.as_slice()
                .iter()
                .position(|v| *v != ZERO)
                .map(|k| (f.as_slice()[k], y.correction().get_or_zero(k / f.cols(), k % f.cols())))
        })?;
    let c = pivot.1 / pivot.0;
    (x.scale(c) == *y).then_some(c)
}

/// `Σ Aᵢ ⊗ Bᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TensorElement {
    terms: Vec<(ToeplitzElement, ToeplitzElement)>,
}

impl TensorElement {
    pub fn new(terms: Vec<(ToeplitzElement, ToeplitzElement)>) -> Self {
        let mut t = TensorElement { terms };
        t.canonicalize();
        t
    }

    pub fn zero() -> Self {
        TensorElement { terms: Vec::new() }
    }

    pub fn simple(a: ToeplitzElement, b: ToeplitzElement) -> Self {
        Self::new(vec![(a, b)])
    }

    pub fn identity() -> Self {
        Self::simple(ToeplitzElement::identity(), ToeplitzElement::identity())
    }

    /// `T_{z_j}` for `j ∈ {0, 1}`.
    pub fn coordinate(j: usize) -> Self {
        let (s, i) = (ToeplitzElement::shift(), ToeplitzElement::identity());
        if j == 0 {
            Self::simple(s, i)
        } else {
            Self::simple(i, s)
        }
    }

    pub fn terms(&self) -> &[(ToeplitzElement, ToeplitzElement)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops terms with a zero factor and merges terms whose left or right
    /// factors are exact scalar multiples of each other.
    fn canonicalize(&mut self) {
        self.terms.retain(|(a, b)| !is_zero(a) && !is_zero(b));
        let mut out: Vec<(ToeplitzElement, ToeplitzElement)> = Vec::with_capacity(self.terms.len());
        for (a, b) in self.terms.drain(..) {
            let mut merged = None;
            for (i, (oa, ob)) in out.iter().enumerate() {
                if let Some(c) = ratio(oa, &a) {
                    merged = Some((i, (oa.clone(), ob.add(&b.scale(c)))));
                    break;
                }
                if let Some(c) = ratio(ob, &b) {
                    merged = Some((i, (oa.add(&a.scale(c)), ob.clone())));
                    break;
                }
            }
            match merged {
                Some((i, (ma, mb))) if is_zero(&ma) || is_zero(&mb) => {
                    out.remove(i);
                }
                Some((i, t)) => out[i] = t,
                None => out.push((a, b)),
            }
        }
        self.terms = out;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(terms)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.terms.iter().map(|(a, b)| (a.scale(s), b.clone())).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    /// `P_N ⊗ P_N` compression as an `N² × N²` matrix (index `i·N + j`).
    pub fn matricization(&self, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n * n, n * n);
        for (a, b) in &self.terms {
            m = m
                .add(&a.truncation(n).kron(&b.truncation(n)))
                .expect("equal shapes");
        }
        m
    }

    /// `Σ ‖Aᵢ‖ ‖Bᵢ‖` from the per-factor upper bounds.
    pub fn norm_upper(&self) -> f64 {
        self.terms.iter().map(|(a, b)| a.norm_upper() * b.norm_upper()).fold(0.0, |s, x| s + x)
    }

    /// Largest entry of the difference of the `n`-per-factor matricizations.
    pub fn max_difference(&self, other: &Self, n: usize) -> f64 {
        self.matricization(n).sub(&other.matricization(n)).expect("equal shapes").max_abs()
    }

    pub fn approx_eq(&self, other: &Self, n: usize, tol: f64) -> bool {
        self.max_difference(other, n) <= tol
    }

    /// Applies a map to each factor: `Σ f(Aᵢ) ⊗ g(Bᵢ)`.
    fn map_factors(&self, f: impl Fn(&ToeplitzElement) -> ToeplitzElement, g: impl Fn(&ToeplitzElement) -> ToeplitzElement) -> Self {
        Self::new(self.terms.iter().map(|(a, b)| (f(a), g(b))).collect())
    }
}

/// Bilinear product, each factor via the exact circle product.
pub fn tensor_mul(x: &TensorElement, y: &TensorElement) -> Result<TensorElement> {
    let count = x.terms.len() * y.terms.len();
    if count > MAX_TERMS {
        return Err(Error::TooManyTerms {
            count,
            limit: MAX_TERMS,
        });
    }
    let mut terms = Vec::with_capacity(count);
    for (a, b) in &x.terms {
        for (a2, b2) in &y.terms {
            terms.push((a.mul(a2), b.mul(b2)));
        }
    }
    Ok(TensorElement::new(terms))
}

pub fn tensor_adjoint(x: &TensorElement) -> TensorElement {
    x.map_factors(ToeplitzElement::adjoint, ToeplitzElement::adjoint)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaledIsometryReport {
    /// `‖(1/γ²) Σⱼ Tⱼ*Tⱼ − I‖` upper bound (or the unscaled sum when not scaled).
    pub residual: f64,
    /// `‖T_z*T_z − I‖` in one factor.
    pub per_factor_residual: f64,
}

/// Checks `(1/γ²) Σⱼ Tⱼ*Tⱼ = I ⊗ I` in the tensor class. With
/// `scaled = false` the factor `1/γ²` is omitted, as a negative control.
pub fn scaled_isometry_check(scaled: bool) -> Result<ScaledIsometryReport> {
    let c = if scaled { 1.0 / gamma_sq(2) } else { 1.0 };
    let mut sum = TensorElement::zero();
    for j in 0..2 {
        let t = TensorElement::coordinate(j);
        sum = sum.add(&tensor_mul(&tensor_adjoint(&t), &t)?.scale(C64::new(c, 0.0)));
    }
    let residual = sum.sub(&TensorElement::identity()).norm_upper();
    let s = ToeplitzElement::shift();
    let per_factor_residual = s.adjoint().mul(&s).sub(&ToeplitzElement::identity()).norm_upper();
    Ok(ScaledIsometryReport {
        residual,
        per_factor_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GammaVerdict {
    Toeplitz,
    NotToeplitz,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaReport {
    /// `R = Σⱼ Tⱼ* X Tⱼ − γ² X` in the tensor class.
    #[serde(skip)]
    pub residual: TensorElement,
    /// `‖P R P‖` at the given truncation; a lower bound for `‖R‖`.
    pub norm_lower: f64,
    /// Sum of per-term norm bounds; an upper bound for `‖R‖`.
    pub norm_upper: f64,
    pub truncation: usize,
    pub verdict: GammaVerdict,
}

/// `Σⱼ T_{z_j}* (A ⊗ B) T_{z_j} − γ² A ⊗ B` for one term.
///
/// Grouped as `(φ(A) − A) ⊗ B + A ⊗ (φ(B) − B)`, which equals the expanded
/// form because `γ² = 2`.
fn term_residual(a: &ToeplitzElement, b: &ToeplitzElement) -> TensorElement {
    TensorElement::new(vec![(a.phi_map().sub(a), b.clone()), (a.clone(), b.phi_map().sub(b))])
}

/// `R = T_{z₁}* X T_{z₁} + T_{z₂}* X T_{z₂} − γ² X`, computed term by term.
///
/// `T_z* A T_z` is the circle map `phi_map`, so a pure Toeplitz factor is left
/// unchanged and each pure term cancels exactly.
pub fn gamma_residual(x: &TensorElement) -> TensorElement {
    let mut terms = Vec::new();
    for (a, b) in &x.terms {
        terms.extend(term_residual(a, b).terms);
    }
    TensorElement { terms }
}

/// Norm bracket and verdict for `R`, with the lower bound from an
/// `n`-per-factor truncation.
pub fn gamma_equation_residual(x: &TensorElement, n: usize) -> Result<GammaReport> {
    let residual = gamma_residual(x);
    let norm_upper = residual.norm_upper();
    let norm_lower = if residual.is_zero() {
        0.0
    } else {
        linalg::op_norm(&residual.matricization(n), 0.0)?
    };
    let verdict = if norm_upper <= VERDICT_TOL {
        GammaVerdict::Toeplitz
    } else {
        GammaVerdict::NotToeplitz
    };
    Ok(GammaReport {
        residual,
        norm_lower,
        norm_upper,
        truncation: n,
        verdict,
    })
}

/// `Σⱼ (Tⱼ/γ)* X (Tⱼ/γ)`: the CP map of the spherical multifunction `z/γ`.
pub fn scaled_cp_map(x: &TensorElement) -> TensorElement {
    let c = C64::new(1.0 / gamma_sq(2), 0.0);
    let mut terms = Vec::new();
    for (a, b) in &x.terms {
        terms.push((a.phi_map().scale(c), b.clone()));
        terms.push((a.scale(c), b.phi_map()));
    }
    TensorElement::new(terms)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingEquivalence {
    /// Entry gap between `γ²(Ψ(X) − X)` and `R` at the truncation.
    pub max_difference: f64,
    pub fixed_point: bool,
    pub gamma_equation: bool,
}

impl ScalingEquivalence {
    pub fn consistent(&self, tol: f64) -> bool {
        self.max_difference <= tol && self.fixed_point == self.gamma_equation
    }
}

/// Compares the fixed-point form under the scaled multifunction with the
/// `γ²`-equation.
pub fn scaling_equivalence(x: &TensorElement, n: usize) -> ScalingEquivalence {
    let defect = scaled_cp_map(x).sub(x);
    let r = gamma_residual(x);
    let lhs = defect.scale(C64::new(gamma_sq(2), 0.0));
    ScalingEquivalence {
        max_difference: lhs.max_difference(&r, n),
        fixed_point: defect.norm_upper() <= VERDICT_TOL,
        gamma_equation: r.norm_upper() <= VERDICT_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::LaurentPoly;

    fn t(s: &str) -> ToeplitzElement {
        ToeplitzElement::toeplitz(LaurentPoly::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(1).unwrap(), 1.0);
        assert_eq!(gamma(2).unwrap(), std::f64::consts::SQRT_2);
        assert_eq!(gamma(4).unwrap(), 2.0);
        assert!(gamma(0).is_err());
    }

    #[test]
    fn product_examples() {
        let z1 = TensorElement::coordinate(0);
        let z2 = TensorElement::coordinate(1);
        let zz = TensorElement::simple(t("z"), t("z"));
        assert_eq!(tensor_mul(&z1, &z2).unwrap(), zz);
        assert_eq!(tensor_mul(&tensor_adjoint(&z1), &z1).unwrap(), TensorElement::identity());

        let x = TensorElement::simple(t("z"), t("zbar"));
        let y = TensorElement::simple(t("zbar"), t("z"));
        let expect = TensorElement::simple(
            ToeplitzElement::identity().sub(&ToeplitzElement::unit(0, 0)),
            ToeplitzElement::identity(),
        );
        assert_eq!(tensor_mul(&x, &y).unwrap(), expect);
    }

    #[test]
    fn term_guard() {
        let many = TensorElement {
            terms: (0..65).map(|k| (t(&format!("z^{k}")), t("1"))).collect(),
        };
        assert!(matches!(tensor_mul(&many, &many), Err(Error::TooManyTerms { .. })));
    }

    #[test]
    fn scaled_isometry() {
        let r = scaled_isometry_check(true).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.per_factor_residual, 0.0);
        assert_eq!(scaled_isometry_check(false).unwrap().residual, 1.0);
    }

    #[test]
    fn gamma_equation_examples() {
        let pure = TensorElement::simple(t("2*z^2 - zbar"), t("(1+1i)*z + 3*zbar^2"));
        let r = gamma_equation_residual(&pure, 8).unwrap();
        assert!(r.residual.is_zero());
        assert_eq!((r.norm_lower, r.norm_upper), (0.0, 0.0));
        assert_eq!(r.verdict, GammaVerdict::Toeplitz);

        assert!(gamma_residual(&TensorElement::identity()).is_zero());

        let e = TensorElement::simple(ToeplitzElement::unit(0, 0), ToeplitzElement::identity());
        let r = gamma_equation_residual(&e, 8).unwrap();
        assert!(r.norm_lower <= 1.0 + 1e-12 && 1.0 <= r.norm_upper + 1e-12);
        assert_eq!(r.verdict, GammaVerdict::NotToeplitz);
    }

    #[test]
    fn scaling_equivalence_holds() {
        let pure = TensorElement::new(vec![(t("z + zbar"), t("z^3")), (t("1"), t("zbar"))]);
        assert!(scaling_equivalence(&pure, 8).consistent(1e-12));
        let e = TensorElement::simple(ToeplitzElement::unit(1, 0), t("z"));
        let s = scaling_equivalence(&e, 8);
        assert!(s.consistent(1e-12) && !s.fixed_point);
    }

    #[test]
    fn merging_cancels_exactly() {
        let a = TensorElement::simple(t("z"), t("zbar"));
        assert!(a.sub(&a).is_zero());
        let b = TensorElement::new(vec![(t("z"), t("1")), (t("z"), t("zbar"))]);
        assert_eq!(b.terms().len(), 1);
    }

    #[test]
    fn json_is_list_of_pairs() {
        let x = TensorElement::simple(t("z"), ToeplitzElement::unit(0, 1));
        let v = serde_json::to_value(&x).unwrap();
        assert!(v.as_array().unwrap()[0].as_array().unwrap().len() == 2);
        let y: TensorElement = serde_json::from_value(v).unwrap();
        assert_eq!(x, y);
    }
}
