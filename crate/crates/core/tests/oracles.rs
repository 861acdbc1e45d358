use std::f64::consts::PI;

use num_traits::ToPrimitive;
use sphiso::circle::ToeplitzElement;
use sphiso::hardy::{self, CircleMeasure};
use sphiso::linalg::{herm_eigs, CMatrix, C64};
use sphiso::random::{labelled_rng, random_element, random_symbol};
use sphiso::szego::sphere_moment;

/// Determinant by Gaussian elimination with partial pivoting.
fn det(mut a: Vec<Vec<C64>>) -> C64 {
    let n = a.len();
    let mut d = C64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        if a[p][k].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        d *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
        }
    }
    d
}

fn char_poly(a: &CMatrix, t: f64) -> f64 {
    let n = a.rows();
    let m = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)] - if i == j { C64::new(t, 0.0) } else { C64::new(0.0, 0.0) }).collect())
        .collect();
    det(m).re
}

#[test]
fn jacobi_eigenvalues_are_characteristic_roots() {
    let mut rng = labelled_rng(11, "oracle.eig", 0);
    let n = 8;
    let b = CMatrix::from_fn(n, n, |_, _| sphiso::random::complex_unit_box(&mut rng));
    let a = b.add(&b.adjoint()).unwrap();
    let eigs = herm_eigs(&a, 1e-12).unwrap();

    let r = (0..n).map(|i| (0..n).map(|j| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max) + 1.0;
    let steps = 20000;
    let mut roots = Vec::new();
    let mut prev_t = -r;
    let mut prev = char_poly(&a, prev_t);
    for k in 1..=steps {
        let t = -r + 2.0 * r * k as f64 / steps as f64;
        let v = char_poly(&a, t);
        if prev.signum() != v.signum() {
            let (mut lo, mut hi, mut flo) = (prev_t, t, prev);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let fm = char_poly(&a, mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_t = t;
        prev = v;
    }
    assert_eq!(roots.len(), n, "scan found {roots:?}");
    for (x, y) in eigs.iter().zip(&roots) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn tridiagonal_spectrum_of_cosine_symbol() {
    let phi = sphiso::LaurentPoly::parse("z + zbar").unwrap();
    let t = ToeplitzElement::toeplitz(phi).unwrap();
    for n in [1usize, 2, 7, 40] {
        let eigs = herm_eigs(&t.truncation(n), 1e-12).unwrap();
        for (k, e) in eigs.iter().enumerate() {
            let exact = 2.0 * (PI * (n - k) as f64 / (n as f64 + 1.0)).cos();
            assert!((e - exact).abs() < 1e-12, "n={n} k={k}: {e} vs {exact}");
        }
    }
}

/// Entries of T_φ T_ψ summed directly over the shared index.
#[test]
fn product_truncations_match_direct_sums() {
    for trial in 0..20 {
        let mut rng = labelled_rng(5, "oracle.product", trial);
        let phi = random_symbol(&mut rng, 4);
        let psi = random_symbol(&mut rng, 4);
        let prod = ToeplitzElement::toeplitz(phi.clone())
            .unwrap()
            .mul(&ToeplitzElement::toeplitz(psi.clone()).unwrap());
        let n = 12;
        let m = prod.truncation(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n + 10 {
                    s += phi.coeff1(i as i64 - k as i64) * psi.coeff1(k as i64 - j as i64);
                }
                assert!((m[(i, j)] - s).norm() < 1e-13, "({i},{j})");
            }
        }
    }
}

#[test]
fn general_products_match_dense_truncations() {
    for trial in 0..20 {
        let mut rng = labelled_rng(6, "oracle.dense", trial);
        let x = random_element(&mut rng, 3, 4);
        let y = random_element(&mut rng, 3, 4);
        let n = 10;
        // padding by the band makes the finite product exact in the top-left block
        let big = n + 16;
        let dense = x.truncation(big).matmul(&y.truncation(big)).unwrap();
        let exact = x.mul(&y).truncation(n);
        for i in 0..n {
            for j in 0..n {
                assert!((dense[(i, j)] - exact[(i, j)]).norm() < 1e-12);
            }
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// On S³ the weight |z₁|² is uniform on [0, 1]; on S⁵ the squared moduli
/// are uniform on the 2-simplex.
#[test]
fn sphere_moments_by_quadrature() {
    for (a, b) in [(0u32, 0u32), (1, 0), (2, 3), (4, 1), (5, 5)] {
        let q = simpson(|t| t.powi(a as i32) * (1.0 - t).powi(b as i32), 0.0, 1.0, 2000);
        let exact = sphere_moment(2, &[a, b]).unwrap().to_f64().unwrap();
        assert!((q - exact).abs() < 1e-12, "({a},{b}): {q} vs {exact}");
    }
    for (a, b, c) in [(1u32, 1u32, 1u32), (2, 0, 1), (3, 2, 0)] {
        let q = 2.0
            * simpson(
                |x| {
                    simpson(
                        |y| x.powi(a as i32) * y.powi(b as i32) * (1.0 - x - y).max(0.0).powi(c as i32),
                        0.0,
                        1.0 - x,
                        400,
                    )
                },
                0.0,
                1.0,
                400,
            );
        let exact = sphere_moment(3, &[a, b, c]).unwrap().to_f64().unwrap();
        assert!((q - exact).abs() < 1e-9, "({a},{b},{c}): {q} vs {exact}");
    }
}

/// Gram matrix of the orthonormal polynomials by trapezoid quadrature of
/// the density, which is exact for trigonometric polynomials of low degree.
#[test]
fn weighted_onb_is_orthonormal_under_quadrature() {
    for m in [CircleMeasure::cosine(0.8).unwrap(), CircleMeasure::random(&mut labelled_rng(3, "oracle.measure", 0), 3)] {
        let d = 12;
        let basis = hardy::onb(&m, d).unwrap();
        let g = 256;
        let mut gram = CMatrix::zeros(d + 1, d + 1);
        for s in 0..g {
            let th = 2.0 * PI * s as f64 / g as f64;
            let w = m.density(th) / g as f64;
            let vals: Vec<C64> = (0..=d)
                .map(|i| (0..=d).map(|k| basis.coeffs[(i, k)] * C64::from_polar(1.0, k as f64 * th)).sum())
                .collect();
            for i in 0..=d {
                for j in 0..=d {
                    gram[(i, j)] += vals[j] * vals[i].conj() * w;
                }
            }
        }
        let dev = gram.sub(&CMatrix::identity(d + 1)).unwrap().max_abs();
        assert!(dev < 1e-10, "{dev}");
    }
}
