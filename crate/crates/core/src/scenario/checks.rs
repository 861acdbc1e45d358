use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{Artifact, CheckInfo, Record, Scenario, Suite};
use crate::circle::{self, CommutantClass, ToeplitzElement};
use crate::error::Result;
use crate::hardy::{self, CircleMeasure};
use crate::linalg::{CMatrix, C64};
use crate::polydisc::{self, GammaVerdict, TensorElement};
use crate::random::{self, labelled_rng};
use crate::spectra::{self, Membership};
use crate::symbols::LaurentPoly;
use crate::szego::{self, GradedOperator};

pub const CHECKS: &[CheckInfo] = &[
    CheckInfo {
        id: "algebra_closure",
        suite: Suite::Circle,
        tag: "Thm3.1(3),Thm3.1(4)",
        model: "exact circle class T_φ + F with Laurent polynomial symbols and finite corners",
        criterion: "symbol map multiplicative and *-preserving to the exact tolerance; semicommutators have zero symbol and a corner inside the degree box",
    },
    CheckInfo {
        id: "thm2_1_identities",
        suite: Suite::Circle,
        tag: "Thm2.1,Thm2.3",
        model: "projection Φ onto Toeplitz operators on the exact circle class",
        criterion: "Φ(Φ(X)Y) = Φ(XΦ(Y)) = Φ(Φ(X)Φ(Y)) to the exact tolerance; Φ idempotent and unital; Choi–Effros product equals T_{π(X)π(Y)}",
    },
    CheckInfo {
        id: "brown_halmos",
        suite: Suite::Circle,
        tag: "Thm3.1(1)",
        model: "T_z* X T_z = X on the exact circle class, planted Toeplitz and finite-rank perturbations",
        criterion: "fixed-point verdict agrees with an empty correction on every element",
    },
    CheckInfo {
        id: "commutant",
        suite: Suite::Circle,
        tag: "Thm2.9(3f),Thm3.1(2)",
        model: "pair test (X, X*X Toeplitz) against commutation with T_z; lift to multiplication on L²",
        criterion: "analytic symbols classified ANALYTIC_TOEPLITZ with agreeing criteria and a norm bracket gap within the bracket tolerance; other elements rejected",
    },
    CheckInfo {
        id: "cross_section",
        suite: Suite::Circle,
        tag: "Thm2.9(3d)",
        model: "banded truncations of [T_{φ_ab}] against sup and ℓ¹ bounds of the symbol matrix",
        criterion: "z + zbar reproduces 2cos(π/(N+1)) to 1e-10 and reaches 2 within the bracket tolerance; diag(z, zbar) gives 1 on both sides to 1e-8",
    },
    CheckInfo {
        id: "exact_sequence",
        suite: Suite::Circle,
        tag: "Thm2.9(3e)",
        model: "symbol homomorphism on products of random elements",
        criterion: "π multiplicative and *-preserving, XY − Φ(XY) in the kernel",
    },
    CheckInfo {
        id: "hartman_wintner",
        suite: Suite::Spectra,
        tag: "Thm3.1(3)",
        model: "winding-number membership for banded Toeplitz operators",
        criterion: "no essential-range sample and no certified near-curve spectral point is OUTSIDE",
    },
    CheckInfo {
        id: "convex_bound",
        suite: Suite::Spectra,
        tag: "Thm3.1(3)",
        model: "λ grid over the inflated bounding box, convex hull of the sampled essential range",
        criterion: "every λ in the spectrum lies in the hull; verdicts stable under grid doubling",
    },
    CheckInfo {
        id: "numerical_range",
        suite: Suite::Spectra,
        tag: "Thm3.1(3)",
        model: "support function of the numerical range of banded truncations",
        criterion: "h(θ) below the symbol bound and the support region contains every WINDING_NONZERO point",
    },
    CheckInfo {
        id: "szego_row_isometry",
        suite: Suite::Szego,
        tag: "Def2.5",
        model: "Szegő tuple as a weighted multishift on monomials of degree ≤ d",
        criterion: "Σ T_j*T_j = I below the top shell to the exact tolerance, defect −1 on the top shell, shifts commute",
    },
    CheckInfo {
        id: "sphere_moment_mc",
        suite: Suite::Szego,
        tag: "plumbing",
        model: "exact monomial moments on the sphere against uniform sampling",
        criterion: "Monte Carlo estimate within mc_sigmas standard errors",
    },
    CheckInfo {
        id: "szego_fixed_point",
        suite: Suite::Szego,
        tag: "Thm3.1(1)",
        model: "graded compressions of polynomial symbols in z and zbar",
        criterion: "interior fixed-point residual within the fixed-point tolerance; planted rank-one perturbation ≥ 0.4",
    },
    CheckInfo {
        id: "normal_extension",
        suite: Suite::Szego,
        tag: "Thm2.9(2)",
        model: "multiplication operators on the two-sided monomial model of L²(σ)",
        criterion: "compressions match the tuple and toeplitz_graded; normality and Σ|z_j|² = 1 hold",
    },
    CheckInfo {
        id: "gamma_equation",
        suite: Suite::Polydisc,
        tag: "Ex4.3",
        model: "tensor class Σ A ⊗ B on H²(𝕋²)",
        criterion: "pure Toeplitz sums give residual exactly 0; E00 ⊗ I gives a bracket containing 1",
    },
    CheckInfo {
        id: "scaled_isometry",
        suite: Suite::Polydisc,
        tag: "Ex4.3,Def2.5",
        model: "coordinate tuple scaled by γ = √2",
        criterion: "(1/γ²) Σ T_j*T_j = I exactly; the unscaled control gives 1",
    },
    CheckInfo {
        id: "scaling_equivalence",
        suite: Suite::Polydisc,
        tag: "Ex4.3",
        model: "fixed points of the scaled CP map against the γ²-equation; associativity of the tensor product",
        criterion: "γ²(Ψ(X) − X) = R entrywise and both verdicts agree; (XY)Z = X(YZ) on truncations",
    },
    CheckInfo {
        id: "weighted_isometry",
        suite: Suite::Measures,
        tag: "Sec3",
        model: "orthonormal polynomials of a positive trigonometric density",
        criterion: "T_z isometric on degrees ≤ d − 2 to the isometry tolerance",
    },
    CheckInfo {
        id: "weighted_brown_halmos",
        suite: Suite::Measures,
        tag: "Thm3.1(1)",
        model: "window residual of T_z* X T_z − X on H²(m) across degrees",
        criterion: "nonincreasing and unflagged for X = T_φ; flagged for X = E00",
    },
    CheckInfo {
        id: "weighted_uniform_reproduction",
        suite: Suite::Measures,
        tag: "Sec3",
        model: "w = 1 compared with the circle class; hermitian symbols on weighted spaces",
        criterion: "entry-exact agreement for w = 1; hermitian symbols give hermitian matrices",
    },
    CheckInfo {
        id: "determinism",
        suite: Suite::All,
        tag: "plumbing",
        model: "per-trial counter-based RNG streams",
        criterion: "records identical on one thread and on the default pool",
    },
];

pub const SUITE_ORDER: [Suite; 5] = [Suite::Circle, Suite::Spectra, Suite::Szego, Suite::Polydisc, Suite::Measures];

pub struct Group {
    pub records: Vec<Record>,
    pub artifacts: Vec<Artifact>,
}

impl From<Record> for Group {
    fn from(r: Record) -> Self {
        Group {
            records: vec![r],
            artifacts: Vec::new(),
        }
    }
}

type GroupFn = fn(&Scenario) -> Result<Group>;

pub fn suite_groups(suite: Suite) -> Vec<GroupFn> {
    match suite {
        Suite::Circle => vec![
            algebra_closure,
            averaging,
            brown_halmos,
            commutant,
            cross_section,
            exact_sequence,
        ],
        Suite::Spectra => vec![spectra_suite],
        Suite::Szego => vec![szego_row_isometry, sphere_moment_mc, szego_fixed_point, normal_extension],
        Suite::Polydisc => vec![gamma_equation, scaled_isometry, scaling_equivalence],
        Suite::Measures => vec![weighted_isometry, weighted_brown_halmos, weighted_uniform_reproduction],
        Suite::All => Vec::new(),
    }
}

fn max_coeff(p: &LaurentPoly) -> f64 {
    p.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

fn trials<T: Send>(n: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..n as u64).into_par_iter().map(f).collect()
}

fn algebra_closure(s: &Scenario) -> Result<Group> {
    let p = &s.circle;
    let tol = s.tolerances.exact;
    let mut rec = Record::new("algebra_closure", s.seed, &(p, tol));
    let rows = trials(p.trials, |t| {
        let mut rng = labelled_rng(s.seed, "algebra_closure", t);
        let x = random::random_element(&mut rng, p.max_degree, p.max_correction);
        let y = random::random_element(&mut rng, p.max_degree, p.max_correction);
        let xy = x.mul(&y);
        let hom = max_coeff(&xy.symbol_map().sub(&x.symbol_map().mul(&y.symbol_map())));
        let star = max_coeff(&x.adjoint().symbol_map().sub(&x.symbol_map().conj()));
        let adj = xy.adjoint().max_difference(&y.adjoint().mul(&x.adjoint()));
        let (phi, psi) = (x.symbol(), y.symbol());
        let semi = ToeplitzElement::toeplitz(phi.clone())
            .expect("one variable")
            .mul(&ToeplitzElement::toeplitz(psi.clone()).expect("one variable"))
            .sub(&ToeplitzElement::toeplitz(phi.mul(psi)).expect("one variable"));
        let (br, bc) = circle::semicommutator_box(phi, psi);
        let (r, c) = semi.active_size();
        let semi_ok = semi.symbol().is_zero() && r <= br && c <= bc;
        (hom, star, adj, semi_ok)
    });
    let hom = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let star = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let adj = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let semi_bad = rows.iter().filter(|r| !r.3).count();
    rec.metric("trials", p.trials);
    rec.metric("max_multiplicativity_residual", hom);
    rec.metric("max_star_residual", star);
    rec.metric("max_adjoint_product_residual", adj);
    rec.metric("semicommutator_violations", semi_bad);
    rec.require(hom <= tol, || format!("π(XY) − π(X)π(Y) = {hom:e}"));
    rec.require(star <= tol, || format!("π(X*) − conj π(X) = {star:e}"));
    rec.require(adj <= tol, || format!("(XY)* − Y*X* = {adj:e}"));
    rec.require(semi_bad == 0, || format!("{semi_bad} semicommutators outside their degree box"));
    Ok(rec.into())
}

fn averaging(s: &Scenario) -> Result<Group> {
    let p = &s.circle;
    let tol = s.tolerances.exact;
    let mut rec = Record::new("thm2_1_identities", s.seed, &(p, tol));
    let rows = trials(p.trials, |t| {
        let mut rng = labelled_rng(s.seed, "thm2_1_identities", t);
        let x = random::random_element(&mut rng, p.max_degree, p.max_correction);
        let y = random::random_element(&mut rng, p.max_degree, p.max_correction);
        let r = circle::verify_averaging_identities(&x, &y);
        let px = x.project_phi();
        let idempotent = px.project_phi() == px;
        (r.max_difference, r.choi_effros_deviation, idempotent)
    });
    let diff = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let ce = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let non_idem = rows.iter().filter(|r| !r.2).count();
    let unital = ToeplitzElement::identity().project_phi() == ToeplitzElement::identity();
    rec.metric("trials", p.trials);
    rec.metric("max_averaging_difference", diff);
    rec.metric("max_choi_effros_deviation", ce);
    rec.metric("idempotence_failures", non_idem);
    rec.metric("unital", unital);
    rec.require(diff <= tol, || format!("averaging identities differ by {diff:e}"));
    rec.require(ce <= tol, || format!("Choi–Effros product deviates by {ce:e}"));
    rec.require(non_idem == 0, || format!("Φ not idempotent on {non_idem} elements"));
    rec.require(unital, || "Φ(I) ≠ I".into());
    Ok(rec.into())
}

fn brown_halmos(s: &Scenario) -> Result<Group> {
    let p = &s.circle;
    let mut rec = Record::new("brown_halmos", s.seed, p);
    let n = p.toeplitz_trials;
    let planted = n / 4;
    let rows = trials(n, |t| {
        let mut rng = labelled_rng(s.seed, "brown_halmos", t);
        let x = if (t as usize) < planted {
            ToeplitzElement::toeplitz(random::random_symbol(&mut rng, p.max_degree)).expect("one variable")
        } else if (t as usize) < 2 * planted {
            let phi = random::random_symbol(&mut rng, p.max_degree);
            let f = random::random_correction(&mut rng, p.max_correction);
            ToeplitzElement::new(phi, f).expect("one variable")
        } else {
            random::random_element(&mut rng, p.max_degree, p.max_correction)
        };
        let expected = match t as usize {
            k if k < planted => Some(true),
            k if k < 2 * planted => Some(false),
            _ => None,
        };
        let verdict = x.is_toeplitz();
        let truth = x.is_correction_free();
        (verdict == truth && expected.is_none_or(|e| e == verdict), verdict)
    });
    let wrong = rows.iter().filter(|r| !r.0).count();
    rec.metric("elements", n);
    rec.metric("planted_toeplitz", planted);
    rec.metric("planted_finite_rank", planted);
    rec.metric("toeplitz_verdicts", rows.iter().filter(|r| r.1).count());
    rec.metric("false_verdicts", wrong);
    rec.require(wrong == 0, || format!("{wrong} false verdicts"));
    Ok(rec.into())
}

fn commutant(s: &Scenario) -> Result<Group> {
    let p = &s.circle;
    let tol = s.tolerances.bracket;
    let mut rec = Record::new("commutant", s.seed, &(p, tol));
    let n = p.commutant_trials;
    let analytic = trials(n, |t| -> Result<(bool, f64, f64, f64)> {
        let mut rng = labelled_rng(s.seed, "commutant.analytic", t);
        let psi = random::random_analytic_symbol(&mut rng, p.max_degree);
        let x = ToeplitzElement::toeplitz(psi)?;
        let r = circle::commutant_character(&x, p.max_truncation, p.grid_size)?;
        let lift = r.lift.as_ref();
        let (lo, sup, hi) = lift.map_or((0.0, 0.0, 0.0), |l| (l.truncation_lower, l.sup_bracket.0, l.sup_bracket.1));
        let ok = r.class == CommutantClass::AnalyticToeplitz && r.criteria_agree;
        let lift_ok = lift.is_some_and(|l| l.restriction_residual == 0.0 && l.bilateral_commutator == 0.0);
        let contained = sup <= hi * (1.0 + 1e-12) && lo <= hi * (1.0 + 1e-12);
        Ok((ok && lift_ok && contained, (lo - sup).abs(), lo, sup))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rejected = trials(n, |t| -> Result<bool> {
        let mut rng = labelled_rng(s.seed, "commutant.rejected", t);
        let x = if t % 2 == 0 {
            ToeplitzElement::toeplitz(random::random_non_analytic_symbol(&mut rng, p.max_degree))?
        } else {
            let psi = random::random_analytic_symbol(&mut rng, p.max_degree);
            ToeplitzElement::new(psi, random::random_correction(&mut rng, p.max_correction))?
        };
        let r = circle::commutant_character(&x, 64, p.grid_size)?;
        Ok(r.class != CommutantClass::AnalyticToeplitz && r.criteria_agree && r.lift.is_none())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let bad_analytic = analytic.iter().filter(|r| !r.0).count();
    let max_gap = analytic.iter().map(|r| r.1).fold(0.0, f64::max);
    let bad_rejected = rejected.iter().filter(|r| !**r).count();
    rec.metric("analytic_trials", n);
    rec.metric("rejection_trials", n);
    rec.metric("truncation", p.max_truncation);
    rec.metric("analytic_misclassified", bad_analytic);
    rec.metric("rejection_failures", bad_rejected);
    rec.metric("max_bracket_gap", max_gap);
    rec.metric(
        "brackets",
        analytic.iter().map(|r| [r.2, r.3]).collect::<Vec<_>>(),
    );
    rec.require(bad_analytic == 0, || format!("{bad_analytic} analytic symbols misclassified"));
    rec.require(bad_rejected == 0, || format!("{bad_rejected} elements wrongly accepted"));
    rec.require(max_gap <= tol, || format!("norm bracket gap {max_gap:e}"));
    Ok(rec.into())
}

fn cross_section(s: &Scenario) -> Result<Group> {
    let p = &s.circle;
    let tol = s.tolerances.bracket;
    let mut rec = Record::new("cross_section", s.seed, &(p, tol));
    let zz = LaurentPoly::parse("z + zbar")?;
    let r1 = circle::cross_section_isometry(&[vec![zz]], p.max_truncation, p.grid_size, tol)?;
    let formula = r1
        .truncation_norms
        .iter()
        .map(|&(n, v)| (v - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos()).abs())
        .fold(0.0, f64::max);
    let last = r1.truncation_norms.last().map_or(0.0, |t| t.1);
    let z = LaurentPoly::var(1, 0);
    let zero = LaurentPoly::zero(1);
    let diag = vec![vec![z.clone(), zero.clone()], vec![zero, z.conj()]];
    let r2 = circle::cross_section_isometry(&diag, 256, p.grid_size, 1e-8)?;
    let level2_max = r2.truncation_norms.iter().map(|t| (t.1 - 1.0).abs()).fold(0.0, f64::max);
    rec.metric("level1_truncation_norms", &r1.truncation_norms);
    rec.metric("level1_formula_residual", formula);
    rec.metric("level1_gap_to_sup", (last - 2.0).abs());
    rec.metric("level1_bracket", [last, r1.sup_lower, r1.l1_upper]);
    rec.metric("level2_truncation_deviation", level2_max);
    rec.metric("level2_sup_lower", r2.sup_lower);
    rec.require(formula <= 1e-10, || format!("2cos(π/(N+1)) mismatch {formula:e}"));
    rec.require((last - 2.0).abs() <= tol, || format!("N = {} norm {last} not within {tol} of 2", p.max_truncation));
    rec.require(r1.monotone, || "truncation norms not monotone".into());
    rec.require(level2_max <= 1e-8 && (r2.sup_lower - 1.0).abs() <= 1e-8, || {
        format!("level-2 block norms {level2_max:e} / sup {}", r2.sup_lower)
    });
    let csv: String = std::iter::once("n,norm,formula\n".to_string())
        .chain(r1.truncation_norms.iter().map(|&(n, v)| {
            format!("{n},{v:?},{:?}\n", 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos())
        }))
        .collect();
    Ok(Group {
        records: vec![rec],
        artifacts: vec![Artifact {
            file: "cross_section.csv".into(),
            contents: csv,
        }],
    })
}

fn exact_sequence(s: &Scenario) -> Result<Group> {
    let p = &s.circle;
    let tol = s.tolerances.exact;
    let mut rec = Record::new("exact_sequence", s.seed, &(p, tol));
    let n = p.trials.min(10);
    let rows = trials(n, |t| -> Result<(f64, f64, bool, usize)> {
        let mut rng = labelled_rng(s.seed, "exact_sequence", t);
        let x = random::random_element(&mut rng, p.max_degree.min(3), p.max_correction);
        let y = random::random_element(&mut rng, p.max_degree.min(3), p.max_correction);
        let r = circle::exact_sequence_report(&x, &y, 128, p.grid_size)?;
        Ok((r.multiplicativity_residual, r.star_residual, r.kernel_membership, r.correction_rank))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let hom = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let star = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let kernel_bad = rows.iter().filter(|r| !r.2).count();
    rec.metric("trials", n);
    rec.metric("max_multiplicativity_residual", hom);
    rec.metric("max_star_residual", star);
    rec.metric("correction_ranks", rows.iter().map(|r| r.3).collect::<Vec<_>>());
    rec.require(hom <= tol && star <= tol, || format!("homomorphism residuals {hom:e}, {star:e}"));
    rec.require(kernel_bad == 0, || format!("{kernel_bad} products outside the kernel"));
    Ok(rec.into())
}

struct SymbolSpectrum {
    symbol: String,
    report: spectra::SpectrumReport,
    support_ok: bool,
    support_violations: usize,
    stability_violations: usize,
}

fn spectra_symbols(s: &Scenario) -> Result<Vec<LaurentPoly>> {
    let p = &s.spectra;
    let mut out: Vec<LaurentPoly> = (0..p.symbols as u64)
        .map(|k| random::random_symbol(&mut labelled_rng(s.seed, "spectra.symbol", k), p.max_degree))
        .collect();
    for e in &p.extra {
        out.push(LaurentPoly::parse(e)?);
    }
    Ok(out)
}

fn analyse_symbol(s: &Scenario, k: usize, phi: &LaurentPoly) -> Result<SymbolSpectrum> {
    let p = &s.spectra;
    let mut rng = labelled_rng(s.seed, "spectra.probe", k as u64);
    let report = spectra::spectrum_report(phi, p.grid_size, p.lambda_grid, &mut rng)?;
    let x = ToeplitzElement::toeplitz(phi.clone())?;
    let trunc = p.truncation.max(4 * (phi.band() + 1));
    let support = spectra::numerical_range_support(&x, &spectra::theta_grid(p.thetas), trunc, p.grid_size)?;
    let support_violations = report
        .lambdas
        .iter()
        .filter(|l| l.status == Membership::WindingNonzero && !support.contains(l.lambda, s.tolerances.support))
        .count();
    // stability on every fourth grid row and column
    let coarse: Vec<C64> = report
        .lambdas
        .iter()
        .enumerate()
        .filter(|(i, _)| (i / p.lambda_grid).is_multiple_of(4) && (i % p.lambda_grid).is_multiple_of(4))
        .map(|(_, l)| l.lambda)
        .collect();
    let stability_violations = spectra::winding_stability_violations(phi, &coarse, p.grid_size)?;
    Ok(SymbolSpectrum {
        symbol: phi.to_text(),
        report,
        support_ok: support.within_bounds,
        support_violations,
        stability_violations,
    })
}

fn spectra_suite(s: &Scenario) -> Result<Group> {
    let p = &s.spectra;
    let symbols = spectra_symbols(s)?;
    let results = symbols
        .par_iter()
        .enumerate()
        .map(|(k, phi)| analyse_symbol(s, k, phi))
        .collect::<Result<Vec<_>>>()?;

    let mut hw = Record::new("hartman_wintner", s.seed, p);
    let hw_cx: usize = results.iter().map(|r| r.report.hartman_wintner_counterexamples.len()).sum();
    hw.metric("symbols", results.iter().map(|r| &r.symbol).collect::<Vec<_>>());
    hw.metric("probes_tested", results.iter().map(|r| r.report.probes_tested).collect::<Vec<_>>());
    hw.metric("counterexamples", hw_cx);
    hw.require(results.iter().all(|r| r.report.hartman_wintner), || {
        format!("{hw_cx} Hartman–Wintner counterexamples")
    });

    let mut cb = Record::new("convex_bound", s.seed, p);
    let cb_cx: usize = results.iter().map(|r| r.report.convex_bound_counterexamples.len()).sum();
    let stab: usize = results.iter().map(|r| r.stability_violations).sum();
    let count = |m: Membership| -> Vec<usize> {
        results
            .iter()
            .map(|r| r.report.lambdas.iter().filter(|l| l.status == m).count())
            .collect()
    };
    cb.metric("lambda_grid", [p.lambda_grid, p.lambda_grid]);
    cb.metric("winding_nonzero", count(Membership::WindingNonzero));
    cb.metric("on_curve", count(Membership::OnCurve));
    cb.metric("counterexamples", cb_cx);
    cb.metric("stability_violations", stab);
    cb.require(cb_cx == 0, || format!("{cb_cx} convex-hull counterexamples"));
    cb.require(stab == 0, || format!("{stab} verdicts changed under grid doubling"));

    let mut nr = Record::new("numerical_range", s.seed, &(p, s.tolerances.support));
    let above = results.iter().filter(|r| !r.support_ok).count();
    let outside: usize = results.iter().map(|r| r.support_violations).sum();
    nr.metric("thetas", p.thetas);
    nr.metric("symbols_above_bound", above);
    nr.metric("winding_points_outside_support", outside);
    nr.require(above == 0, || format!("{above} symbols exceed the support bound"));
    nr.require(outside == 0, || format!("{outside} WINDING_NONZERO points outside the support region"));

    let artifacts = results
        .iter()
        .enumerate()
        .map(|(k, r)| Artifact {
            file: format!("spectrum_{k:02}.csv"),
            contents: r.report.to_csv(),
        })
        .collect();
    Ok(Group {
        records: vec![hw, cb, nr],
        artifacts,
    })
}

fn szego_row_isometry(s: &Scenario) -> Result<Group> {
    let p = &s.szego;
    let tol = s.tolerances.exact;
    let mut rec = Record::new("szego_row_isometry", s.seed, &(p, tol));
    for &n in &p.n {
        let tuple = szego::szego_tuple(n, p.d)?;
        let defect = szego::defect_report(&tuple)?;
        let comm = szego::commutator_residual(&tuple)?;
        rec.metric(&format!("n{n}.interior_defect"), defect.interior_max);
        rec.metric(&format!("n{n}.top_shell_size"), defect.top_shell_size);
        rec.metric(&format!("n{n}.top_shell_deviation"), defect.top_shell_deviation);
        rec.metric(&format!("n{n}.commutator_residual"), comm);
        rec.require(defect.interior_max <= tol, || format!("n = {n}: defect {:e} below the top shell", defect.interior_max));
        rec.require(defect.supported_on_top_shell && defect.top_shell_deviation == 0.0, || {
            format!("n = {n}: defect not −1 exactly on the top shell")
        });
        rec.require(comm <= tol, || format!("n = {n}: commutator {comm:e}"));
    }
    Ok(rec.into())
}

fn sphere_moment_mc(s: &Scenario) -> Result<Group> {
    let p = &s.szego;
    let sig = s.tolerances.mc_sigmas;
    let mut rec = Record::new("sphere_moment_mc", s.seed, &(p, sig));
    let rows = trials(p.mc_alphas, |t| -> Result<(usize, Vec<u32>, f64, f64, f64)> {
        let mut rng = labelled_rng(s.seed, "sphere_moment_mc", t);
        let n = p.n[t as usize % p.n.len()];
        let mut alpha = vec![0u32; n];
        for _ in 0..rng.random_range(1..=p.max_alpha_degree) {
            alpha[rng.random_range(0..n)] += 1;
        }
        let exact = szego::sphere_moment(n, &alpha)?;
        let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN);
        let (mean, se) = szego::monte_carlo_moment(n, &alpha, p.mc_samples, &mut rng);
        Ok((n, alpha, exact, mean, se))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (n, alpha, exact, mean, se) in &rows {
        let z = (mean - exact).abs() / se.max(f64::MIN_POSITIVE);
        worst = worst.max(z);
        rec.require((mean - exact).abs() <= sig * se + 1e-12, || {
            format!("n = {n}, α = {alpha:?}: exact {exact:e}, sampled {mean:e} ± {se:e}")
        });
    }
    rec.metric("samples", p.mc_samples);
    rec.metric(
        "moments",
        rows.iter()
            .map(|(n, a, e, m, se)| json!({"n": n, "alpha": a, "exact": e, "mean": m, "stderr": se}))
            .collect::<Vec<_>>(),
    );
    rec.metric("max_z_score", worst);
    Ok(rec.into())
}

fn szego_fixed_point(s: &Scenario) -> Result<Group> {
    let p = &s.szego;
    let tol = s.tolerances.fixed_point;
    let mut rec = Record::new("szego_fixed_point", s.seed, &(p, tol));
    let tuples = p
        .n
        .iter()
        .map(|&n| szego::szego_tuple(n, p.d).map(|t| (n, t)))
        .collect::<Result<Vec<_>>>()?;
    let tuple_for = |n: usize| &tuples.iter().find(|t| t.0 == n).expect("listed dimension").1;
    let rows = trials(p.symbols, |t| -> Result<(String, f64, f64)> {
        let mut rng = labelled_rng(s.seed, "szego_fixed_point", t);
        let n = p.n[t as usize % p.n.len()];
        let phi = random::random_sphere_poly(&mut rng, n, (p.d / 4).max(1));
        let x = szego::toeplitz_graded(&phi, n, p.d)?;
        let r = szego::fixed_point_residual(&x, tuple_for(n))?;
        Ok((format!("n{n}:{:?}", phi.terms.len()), r.interior, r.boundary))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    rec.metric("symbols", p.symbols);
    rec.metric("max_interior_residual", worst);
    rec.metric("boundary_residuals", rows.iter().map(|r| r.2).collect::<Vec<_>>());
    rec.require(worst <= tol, || format!("interior residual {worst:e}"));
    for (n, tuple) in &tuples {
        let mut rng = labelled_rng(s.seed, "szego_rank_one", *n as u64);
        let phi = random::random_sphere_poly(&mut rng, *n, (p.d / 4).max(1));
        let x = szego::toeplitz_graded(&phi, *n, p.d)?;
        let zero = vec![0u32; *n];
        let e = GradedOperator::unit(tuple.basis(), &zero, &zero)?;
        let planted = szego::fixed_point_residual(&x.add(&e)?, tuple)?.interior;
        rec.metric(&format!("n{n}.rank_one_interior_residual"), planted);
        rec.require(planted >= 0.4, || format!("n = {n}: planted perturbation residual {planted}"));
    }
    Ok(rec.into())
}

fn normal_extension(s: &Scenario) -> Result<Group> {
    let tol = s.tolerances.exact;
    let mut rec = Record::new("normal_extension", s.seed, &tol);
    let mut rng = labelled_rng(s.seed, "normal_extension", 0);
    let phi = random::random_sphere_poly(&mut rng, 2, 2);
    let r = szego::normal_extension_check(2, 4, &phi)?;
    rec.metric("report", &r);
    let worst = r
        .shift_compression_residual
        .max(r.symbol_compression_residual)
        .max(r.normality_residual)
        .max(r.spherical_residual);
    rec.require(worst <= tol, || format!("normal-extension residual {worst:e}"));
    Ok(rec.into())
}

fn gamma_equation(s: &Scenario) -> Result<Group> {
    let p = &s.polydisc;
    let mut rec = Record::new("gamma_equation", s.seed, p);
    let rows = trials(p.trials, |t| -> Result<(bool, f64)> {
        let mut rng = labelled_rng(s.seed, "gamma_equation", t);
        let x = random::random_pure_tensor(&mut rng, p.max_degree);
        let r = polydisc::gamma_equation_residual(&x, p.truncation)?;
        Ok((r.residual.is_zero() && r.verdict == GammaVerdict::Toeplitz, r.norm_upper))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let nonzero = rows.iter().filter(|r| !r.0).count();
    let e = TensorElement::simple(ToeplitzElement::unit(0, 0), ToeplitzElement::identity());
    let re = polydisc::gamma_equation_residual(&e, p.truncation)?;
    let contains_one = re.norm_lower <= 1.0 + 1e-12 && 1.0 <= re.norm_upper + 1e-12;
    let id = polydisc::gamma_residual(&TensorElement::identity()).is_zero();
    rec.metric("pure_sums", p.trials);
    rec.metric("nonzero_residuals", nonzero);
    rec.metric("max_residual_upper", rows.iter().map(|r| r.1).fold(0.0, f64::max));
    rec.metric("e00_bracket", [re.norm_lower, re.norm_upper]);
    rec.metric("e00_verdict", re.verdict);
    rec.metric("identity_residual_zero", id);
    rec.require(nonzero == 0, || format!("{nonzero} pure sums with nonzero residual"));
    rec.require(contains_one && re.verdict == GammaVerdict::NotToeplitz, || {
        format!("E00 ⊗ I bracket [{}, {}]", re.norm_lower, re.norm_upper)
    });
    rec.require(id, || "I ⊗ I has nonzero residual".into());
    Ok(rec.into())
}

fn scaled_isometry(s: &Scenario) -> Result<Group> {
    let mut rec = Record::new("scaled_isometry", s.seed, &());
    let scaled = polydisc::scaled_isometry_check(true)?;
    let unscaled = polydisc::scaled_isometry_check(false)?;
    rec.metric("gamma", polydisc::gamma(2)?);
    rec.metric("residual", scaled.residual);
    rec.metric("per_factor_residual", scaled.per_factor_residual);
    rec.metric("unscaled_residual", unscaled.residual);
    rec.require(scaled.residual == 0.0 && scaled.per_factor_residual == 0.0, || {
        format!("scaled residual {}", scaled.residual)
    });
    rec.require(unscaled.residual == 1.0, || format!("unscaled control gave {}", unscaled.residual));
    Ok(rec.into())
}

fn scaling_equivalence(s: &Scenario) -> Result<Group> {
    let p = &s.polydisc;
    let tol = s.tolerances.exact;
    let mut rec = Record::new("scaling_equivalence", s.seed, &(p, tol));
    let n = p.truncation.min(16);
    let rows = trials(p.trials, |t| {
        let mut rng = labelled_rng(s.seed, "scaling_equivalence", t);
        let x = if t % 2 == 0 {
            random::random_pure_tensor(&mut rng, p.max_degree)
        } else {
            random::random_tensor(&mut rng, p.max_degree.min(3), 3)
        };
        polydisc::scaling_equivalence(&x, n)
    });
    let inconsistent = rows.iter().filter(|r| !r.consistent(tol)).count();
    let worst = rows.iter().map(|r| r.max_difference).fold(0.0, f64::max);
    let assoc = trials(p.associativity_trials, |t| -> Result<f64> {
        let mut rng = labelled_rng(s.seed, "tensor_associativity", t);
        let x = random::random_tensor(&mut rng, 2, 3);
        let y = random::random_tensor(&mut rng, 2, 3);
        let z = random::random_tensor(&mut rng, 2, 3);
        let left = polydisc::tensor_mul(&polydisc::tensor_mul(&x, &y)?, &z)?;
        let right = polydisc::tensor_mul(&x, &polydisc::tensor_mul(&y, &z)?)?;
        let m = left.matricization(p.truncation);
        let scale = m.max_abs().max(1.0);
        Ok(m.sub(&right.matricization(p.truncation))?.max_abs() / scale)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let assoc_worst = assoc.iter().copied().fold(0.0, f64::max);
    rec.metric("elements", p.trials);
    rec.metric("max_difference", worst);
    rec.metric("inconsistent", inconsistent);
    rec.metric("associativity_relative_residual", assoc_worst);
    rec.require(inconsistent == 0, || format!("{inconsistent} elements disagree (max {worst:e})"));
    rec.require(assoc_worst <= tol, || format!("associativity residual {assoc_worst:e}"));
    Ok(rec.into())
}

fn weighted_isometry(s: &Scenario) -> Result<Group> {
    let p = &s.measures;
    let tol = s.tolerances.isometry;
    let mut rec = Record::new("weighted_isometry", s.seed, &(p, tol));
    let rows = p
        .degrees
        .par_iter()
        .map(|&d| hardy::interior_isometry_residual(&p.measure, d).map(|r| (d, r)))
        .collect::<Result<Vec<_>>>()?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    rec.metric("residuals", &rows);
    rec.require(worst <= tol, || format!("T_z deviates from an isometry by {worst:e}"));
    Ok(rec.into())
}

fn weighted_brown_halmos(s: &Scenario) -> Result<Group> {
    let p = &s.measures;
    let mut rec = Record::new("weighted_brown_halmos", s.seed, p);
    let phi = LaurentPoly::parse(&p.symbol)?;
    let r = hardy::brown_halmos_residual(&phi, &p.measure, p.window, &p.degrees)?;
    let e00 = CMatrix::from_fn(1, 1, |_, _| C64::new(1.0, 0.0));
    let planted = hardy::brown_halmos_residual_matrix(&e00, &p.measure, p.window, &p.degrees[..1])?;
    rec.metric("residuals", &r.residuals);
    rec.metric("nonincreasing", r.nonincreasing);
    rec.metric("planted_e00_residual", planted.residuals[0].1);
    rec.require(r.nonincreasing, || "residual sequence increases".into());
    rec.require(!r.flagged, || "T_φ flagged as non-Toeplitz".into());
    rec.require(planted.flagged, || "planted E00 not flagged".into());
    let csv: String = std::iter::once("d,residual\n".to_string())
        .chain(r.residuals.iter().map(|(d, v)| format!("{d},{v:?}\n")))
        .collect();
    Ok(Group {
        records: vec![rec],
        artifacts: vec![Artifact {
            file: "brown_halmos.csv".into(),
            contents: csv,
        }],
    })
}

fn weighted_uniform_reproduction(s: &Scenario) -> Result<Group> {
    let p = &s.measures;
    let tol = s.tolerances.exact;
    let mut rec = Record::new("weighted_uniform_reproduction", s.seed, &(p, tol));
    let d = *p.degrees.iter().min().expect("validated");
    let uniform = CircleMeasure::uniform();
    let measure = Arc::new(p.measure.clone());
    let rows = trials(p.uniform_trials, |t| -> Result<(f64, f64)> {
        let mut rng = labelled_rng(s.seed, "weighted_uniform_reproduction", t);
        let phi = random::random_symbol(&mut rng, (d / 2).min(6) as i32);
        let w1 = hardy::truncated_toeplitz(&phi, &uniform, d)?;
        let circle = ToeplitzElement::toeplitz(phi.clone())?.truncation(d + 1);
        let gap = w1.sub(&circle)?.max_abs();
        let herm = phi.add(&phi.conj());
        let h = hardy::truncated_toeplitz(&herm, &measure, d)?.hermitian_deviation();
        Ok((gap, h))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let gap = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let herm = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    rec.metric("degree", d);
    rec.metric("max_entry_gap", gap);
    rec.metric("max_hermitian_deviation", herm);
    rec.require(gap == 0.0, || format!("w = 1 differs from the circle truncation by {gap:e}"));
    rec.require(herm <= tol, || format!("hermitian symbol gave deviation {herm:e}"));
    Ok(rec.into())
}

/// Reruns a reduced circle and spectra workload on one thread and on the
/// default pool and compares the serialized records.
pub fn determinism(s: &Scenario) -> Result<Record> {
    let mut small = s.clone();
    small.circle.trials = small.circle.trials.min(20);
    small.spectra.symbols = small.spectra.symbols.clamp(1, 3);
    small.spectra.extra.clear();
    small.spectra.lambda_grid = small.spectra.lambda_grid.min(40);
    let work = |sc: &Scenario| -> Result<String> {
        let mut recs = algebra_closure(sc)?.records;
        recs.extend(spectra_suite(sc)?.records);
        Ok(serde_json::to_string(&recs)?)
    };
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| crate::error::Error::Precondition(e.to_string()))?
        .install(|| work(&small))?;
    let many = work(&small)?;
    let mut rec = Record::new("determinism", s.seed, &(small.circle.trials, small.spectra.symbols));
    rec.metric("bytes", one.len());
    rec.require(one == many, || "records differ between thread counts".into());
    Ok(rec)
}
