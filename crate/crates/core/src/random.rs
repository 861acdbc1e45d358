//! Seeded generators for random symbols and elements.
//!
//! Trial `t` of a run with seed `s` draws from ChaCha8 stream `t` under key
//! `s`, so trials are independent of scheduling order and thread count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circle::ToeplitzElement;
use crate::linalg::{CMatrix, C64};
use crate::polydisc::TensorElement;
use crate::symbols::LaurentPoly;
use crate::szego::SpherePoly;

/// Counter-based stream for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Derived stream for a named sub-experiment (suite, check) of a run.
pub fn labelled_rng(seed: u64, label: &str, trial: u64) -> ChaCha8Rng {
    // FNV-1a of the label keeps different checks on different keys
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    trial_rng(seed ^ h, trial)
}

pub fn complex_unit_box<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random one-variable symbol with exponents in `[-max_deg, max_deg]`.
pub fn random_symbol<R: Rng>(rng: &mut R, max_deg: i32) -> LaurentPoly {
    let terms = rng.random_range(1..=4);
    LaurentPoly::from_coeffs_1d((0..terms).map(|_| (rng.random_range(-max_deg..=max_deg), complex_unit_box(rng))))
}

/// Random analytic symbol with exponents in `[0, max_deg]`, not constant.
pub fn random_analytic_symbol<R: Rng>(rng: &mut R, max_deg: i32) -> LaurentPoly {
    loop {
        let terms = rng.random_range(1..=4);
        let p = LaurentPoly::from_coeffs_1d(
            (0..terms).map(|_| (rng.random_range(0..=max_deg.max(1)), complex_unit_box(rng))),
        );
        if p.max_exp() > 0 {
            return p;
        }
    }
}

/// Random symbol with at least one negative exponent.
pub fn random_non_analytic_symbol<R: Rng>(rng: &mut R, max_deg: i32) -> LaurentPoly {
    loop {
        let p = random_symbol(rng, max_deg);
        if p.min_exp() < 0 {
            return p;
        }
    }
}

/// Random dense corner of size at most `max_size × max_size`, nonzero.
pub fn random_correction<R: Rng>(rng: &mut R, max_size: usize) -> CMatrix {
    let r = rng.random_range(1..=max_size.max(1));
    let c = rng.random_range(1..=max_size.max(1));
    CMatrix::from_fn(r, c, |_, _| complex_unit_box(rng))
}

/// `T_φ + F` with random symbol and, with probability one half, a random
/// corner.
pub fn random_element<R: Rng>(rng: &mut R, max_deg: i32, max_corr: usize) -> ToeplitzElement {
    let phi = random_symbol(rng, max_deg);
    let f = if rng.random_bool(0.5) {
        random_correction(rng, max_corr)
    } else {
        CMatrix::zeros(0, 0)
    };
    ToeplitzElement::new(phi, f).expect("one-variable symbol")
}

/// Random symbol `Σ c z^γ zbar^δ` on the sphere in `C^n` with
/// `|γ|, |δ| ≤ max_deg`.
pub fn random_sphere_poly<R: Rng>(rng: &mut R, n: usize, max_deg: u32) -> SpherePoly {
    let index = |rng: &mut R| {
        let mut a = vec![0u32; n];
        for _ in 0..rng.random_range(0..=max_deg) {
            a[rng.random_range(0..n)] += 1;
        }
        a
    };
    let terms = (0..rng.random_range(1..=4))
        .map(|_| {
            let g = index(rng);
            let h = index(rng);
            (g, h, complex_unit_box(rng))
        })
        .collect();
    SpherePoly { n, terms }
}

/// Random `Σ T_φ ⊗ T_ψ` with one to four pure Toeplitz terms.
pub fn random_pure_tensor<R: Rng>(rng: &mut R, max_deg: i32) -> TensorElement {
    let terms = (0..rng.random_range(1..=4))
        .map(|_| {
            let a = ToeplitzElement::toeplitz(random_symbol(rng, max_deg)).expect("one-variable symbol");
            let b = ToeplitzElement::toeplitz(random_symbol(rng, max_deg)).expect("one-variable symbol");
            (a, b)
        })
        .collect();
    TensorElement::new(terms)
}

/// Random `Σ A ⊗ B` with one or two terms of arbitrary elements.
pub fn random_tensor<R: Rng>(rng: &mut R, max_deg: i32, max_corr: usize) -> TensorElement {
    let terms = (0..rng.random_range(1..=2))
        .map(|_| (random_element(rng, max_deg, max_corr), random_element(rng, max_deg, max_corr)))
        .collect();
    TensorElement::new(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(5, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(5, 3).random()).collect();
        assert_eq!(a, b);
        let x: u64 = trial_rng(5, 3).random();
        let y: u64 = trial_rng(5, 4).random();
        assert_ne!(x, y);
        let p: u64 = labelled_rng(5, "circle", 0).random();
        let q: u64 = labelled_rng(5, "spectra", 0).random();
        assert_ne!(p, q);
    }

    #[test]
    fn generators_respect_bounds() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..50 {
            let p = random_symbol(&mut rng, 6);
            assert!(p.max_abs_exp() <= 6);
            assert!(random_analytic_symbol(&mut rng, 6).is_analytic());
            assert!(random_non_analytic_symbol(&mut rng, 6).min_exp() < 0);
            let f = random_correction(&mut rng, 5);
            assert!(f.rows() <= 5 && f.cols() <= 5);
        }
    }
}
