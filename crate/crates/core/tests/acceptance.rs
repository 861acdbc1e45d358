//! Acceptance criteria 1 to 10, one line each.

use std::process::ExitCode;

use serde_json::Value;
use sphiso::scenario::{self, Execution, Record, Scenario, Suite};

const SEED: u64 = 20240601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&Runs) -> Outcome);

struct Runs {
    circle: Execution,
    spectra: Execution,
    szego: Execution,
    polydisc: Execution,
    measures: Execution,
}

fn execute(suite: Suite) -> Execution {
    scenario::execute(&Scenario::new("acceptance", SEED, suite)).expect("default scenario runs")
}

fn record<'a>(e: &'a Execution, id: &str) -> &'a Record {
    e.report.records.iter().find(|r| r.id == id).unwrap_or_else(|| panic!("no record {id}"))
}

fn metric<'a>(r: &'a Record, key: &str) -> &'a Value {
    r.metrics.get(key).unwrap_or_else(|| panic!("{} has no metric {key}", r.id))
}

fn num(r: &Record, key: &str) -> f64 {
    metric(r, key).as_f64().unwrap_or_else(|| panic!("{}.{key} not numeric", r.id))
}

fn seconds(e: &Execution, group: &str) -> f64 {
    e.timings.iter().find(|t| t.0 == group).map(|t| t.1).expect("timed group")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(r: &Record) -> Result<(), String> {
    ensure(r.passed(), || format!("{}: {}", r.id, r.failures.join("; ")))
}

fn c1(runs: &Runs) -> Outcome {
    let r = record(&runs.circle, "algebra_closure");
    passed(r)?;
    let (hom, star) = (num(r, "max_multiplicativity_residual"), num(r, "max_star_residual"));
    let secs = seconds(&runs.circle, "algebra_closure");
    ensure(num(r, "trials") == 100.0, || "expected 100 pairs".into())?;
    ensure(hom <= 1e-12 && star <= 1e-12, || format!("residuals {hom:e} {star:e}"))?;
    ensure(num(r, "semicommutator_violations") == 0.0, || "semicommutator outside box".into())?;
    ensure(secs < 5.0, || format!("runtime {secs:.2} s"))?;
    Ok(format!("hom {hom:.1e}, star {star:.1e}, {secs:.2} s"))
}

fn c2(runs: &Runs) -> Outcome {
    let r = record(&runs.circle, "thm2_1_identities");
    passed(r)?;
    let d = num(r, "max_averaging_difference");
    let ce = num(r, "max_choi_effros_deviation");
    ensure(d <= 1e-12, || format!("averaging {d:e}"))?;
    ensure(ce == 0.0, || format!("Choi–Effros {ce:e}"))?;
    ensure(num(r, "idempotence_failures") == 0.0 && metric(r, "unital") == true, || "Φ not a unital idempotent".into())?;
    Ok(format!("averaging {d:.1e}, Choi–Effros exact"))
}

fn c3(runs: &Runs) -> Outcome {
    let r = record(&runs.circle, "brown_halmos");
    passed(r)?;
    ensure(num(r, "elements") == 200.0 && num(r, "planted_toeplitz") == 50.0 && num(r, "planted_finite_rank") == 50.0, || {
        "wrong element counts".into()
    })?;
    ensure(num(r, "false_verdicts") == 0.0, || "false verdicts".into())?;
    Ok("200 elements, 0 false verdicts".into())
}

fn c4(runs: &Runs) -> Outcome {
    let r = record(&runs.circle, "commutant");
    passed(r)?;
    let gap = num(r, "max_bracket_gap");
    ensure(num(r, "analytic_trials") == 50.0 && num(r, "rejection_trials") == 50.0, || "trial counts".into())?;
    ensure(num(r, "truncation") == 1024.0, || "truncation".into())?;
    ensure(gap <= 1e-3, || format!("gap {gap:e}"))?;
    Ok(format!("50 accepted, 50 rejected, max gap {gap:.1e}"))
}

fn c5(runs: &Runs) -> Outcome {
    let r = record(&runs.circle, "cross_section");
    passed(r)?;
    let f = num(r, "level1_formula_residual");
    let gap = num(r, "level1_gap_to_sup");
    let l2 = num(r, "level2_truncation_deviation");
    let last = metric(r, "level1_truncation_norms").as_array().and_then(|a| a.last()).and_then(|p| p[0].as_u64());
    ensure(last == Some(1024), || format!("last truncation {last:?}"))?;
    ensure(f <= 1e-10 && gap <= 1e-3, || format!("formula {f:e}, gap {gap:e}"))?;
    ensure(l2 <= 1e-8 && (num(r, "level2_sup_lower") - 1.0).abs() <= 1e-8, || format!("level 2 {l2:e}"))?;
    Ok(format!("formula {f:.1e}, gap at 1024 {gap:.1e}, level 2 {l2:.1e}"))
}

fn c6(runs: &Runs) -> Outcome {
    let hw = record(&runs.spectra, "hartman_wintner");
    let cb = record(&runs.spectra, "convex_bound");
    passed(hw)?;
    passed(cb)?;
    let symbols = metric(hw, "symbols").as_array().map_or(0, |a| a.len());
    ensure(symbols == 20, || format!("{symbols} symbols"))?;
    ensure(metric(cb, "lambda_grid") == &serde_json::json!([200, 200]), || "λ grid".into())?;
    ensure(num(hw, "counterexamples") == 0.0 && num(cb, "counterexamples") == 0.0, || "counterexamples".into())?;
    let secs = seconds(&runs.spectra, "hartman_wintner+convex_bound+numerical_range");
    ensure(secs < 30.0, || format!("runtime {secs:.2} s"))?;
    Ok(format!("20 symbols, 0 counterexamples, {secs:.2} s"))
}

fn c7(runs: &Runs) -> Outcome {
    let iso = record(&runs.szego, "szego_row_isometry");
    let mc = record(&runs.szego, "sphere_moment_mc");
    let fp = record(&runs.szego, "szego_fixed_point");
    for r in [iso, mc, fp] {
        passed(r)?;
    }
    for n in [2, 3] {
        let d = num(iso, &format!("n{n}.interior_defect"));
        ensure(d <= 1e-12, || format!("n = {n} defect {d:e}"))?;
        let p = num(fp, &format!("n{n}.rank_one_interior_residual"));
        ensure(p >= 0.4, || format!("n = {n} planted {p}"))?;
    }
    let moments = metric(mc, "moments").as_array().cloned().unwrap_or_default();
    ensure(moments.len() == 10 && num(mc, "samples") == 1e5, || "Monte Carlo configuration".into())?;
    for m in &moments {
        let (e, x, se) = (m["exact"].as_f64().unwrap(), m["mean"].as_f64().unwrap(), m["stderr"].as_f64().unwrap());
        ensure((x - e).abs() <= 3.0 * se + 1e-12, || format!("moment {m}"))?;
    }
    let res = num(fp, "max_interior_residual");
    ensure(num(fp, "symbols") == 10.0 && res <= 1e-10, || format!("fixed point {res:e}"))?;
    Ok(format!("max z-score {:.2}, fixed point {res:.1e}", num(mc, "max_z_score")))
}

fn c8(runs: &Runs) -> Outcome {
    let g = record(&runs.polydisc, "gamma_equation");
    let s = record(&runs.polydisc, "scaled_isometry");
    passed(g)?;
    passed(s)?;
    ensure(num(g, "pure_sums") == 20.0 && num(g, "nonzero_residuals") == 0.0, || "pure sums".into())?;
    let b = metric(g, "e00_bracket");
    let (lo, hi) = (b[0].as_f64().unwrap(), b[1].as_f64().unwrap());
    ensure(lo <= 1.0 + 1e-12 && 1.0 <= hi + 1e-12, || format!("bracket [{lo}, {hi}]"))?;
    ensure(num(s, "residual") == 0.0, || "scaled residual".into())?;
    Ok(format!("20 sums exact, E00⊗I bracket [{lo:.3}, {hi:.3}]"))
}

fn c9(runs: &Runs) -> Outcome {
    let iso = record(&runs.measures, "weighted_isometry");
    let bh = record(&runs.measures, "weighted_brown_halmos");
    let uni = record(&runs.measures, "weighted_uniform_reproduction");
    for r in [iso, bh, uni] {
        passed(r)?;
    }
    let m = &runs.measures.report.scenario.measures;
    let density = serde_json::to_value(&m.measure).unwrap();
    ensure(m.window == 8 && m.degrees == [32, 64, 128], || "window or degrees".into())?;
    ensure(density["density"]["1"] == serde_json::json!(0.4), || format!("density {density}"))?;
    let worst = metric(iso, "residuals")
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[1].as_f64().unwrap())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-10, || format!("isometry {worst:e}"))?;
    ensure(metric(bh, "nonincreasing") == true, || "residuals increase".into())?;
    ensure(num(uni, "max_entry_gap") == 0.0, || "w = 1 not entry-exact".into())?;
    Ok(format!("isometry {worst:.1e}, residuals nonincreasing, w = 1 exact"))
}

fn c10(runs: &Runs) -> Outcome {
    let again = execute(Suite::Circle);
    let a = scenario::report_json(&runs.circle.report).unwrap();
    ensure(a == scenario::report_json(&again.report).unwrap(), || "circle rerun differs".into())?;

    let mut s = Scenario::new("determinism", SEED, Suite::All);
    s.circle.trials = 20;
    s.circle.toeplitz_trials = 40;
    s.circle.commutant_trials = 6;
    s.spectra.symbols = 3;
    s.spectra.lambda_grid = 60;
    s.szego.mc_samples = 5000;
    let bytes = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| scenario::report_json(&scenario::execute(&s).unwrap().report).unwrap())
    };
    let one = bytes(1);
    let four = bytes(4);
    ensure(one == four, || "report differs between 1 and 4 threads".into())?;
    let report: Value = serde_json::from_str(&one).unwrap();
    let det = report["records"].as_array().unwrap().iter().find(|r| r["id"] == "determinism").cloned();
    ensure(det.is_some_and(|d| d["verdict"] == "PASS"), || "determinism record failed".into())?;
    Ok(format!("{} report bytes identical across reruns and thread counts", one.len()))
}

fn main() -> ExitCode {
    let runs = Runs {
        circle: execute(Suite::Circle),
        spectra: execute(Suite::Spectra),
        szego: execute(Suite::Szego),
        polydisc: execute(Suite::Polydisc),
        measures: execute(Suite::Measures),
    };
    let criteria: [Criterion; 10] = [
        ("exact algebra closure", c1),
        ("averaging identities", c2),
        ("Brown–Halmos characterization", c3),
        ("commutant and lifting", c4),
        ("cross-section isometry", c5),
        ("spectral inclusions", c6),
        ("Szegő model", c7),
        ("polydisc γ²-equation", c8),
        ("weighted Hardy spaces", c9),
        ("determinism", c10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f(&runs) {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
