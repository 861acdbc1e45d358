//! Scenario files, check registry, run reports and artifacts on disk.
//!
//! A run writes `<out>/<name>-<timestamp>/` containing `report.json` (fully
//! determined by the scenario), `manifest.json` (timing and environment)
//! and CSV plot data.

mod checks;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hardy::CircleMeasure;
use crate::symbols::LaurentPoly;

pub use checks::CHECKS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Circle,
    Szego,
    Polydisc,
    Measures,
    Spectra,
    #[default]
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["circle", "szego", "polydisc", "measures", "spectra", "all"];

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string())).map_err(|_| Error::Usage {
            field: "suite".into(),
            msg: format!("unknown suite {s:?}; expected one of {}", Self::NAMES.join(", ")),
        })
    }

    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircleParams {
    pub trials: usize,
    pub max_degree: i32,
    pub max_correction: usize,
    pub toeplitz_trials: usize,
    pub commutant_trials: usize,
    pub max_truncation: usize,
    pub grid_size: usize,
}

impl Default for CircleParams {
    fn default() -> Self {
        CircleParams {
            trials: 100,
            max_degree: 6,
            max_correction: 5,
            toeplitz_trials: 200,
            commutant_trials: 50,
            max_truncation: 1024,
            grid_size: 512,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectraParams {
    /// Number of random symbols.
    pub symbols: usize,
    pub max_degree: i32,
    /// Additional symbols in text form.
    pub extra: Vec<String>,
    pub lambda_grid: usize,
    pub grid_size: usize,
    pub thetas: usize,
    pub truncation: usize,
}

impl Default for SpectraParams {
    fn default() -> Self {
        SpectraParams {
            symbols: 20,
            max_degree: 5,
            extra: Vec::new(),
            lambda_grid: 200,
            grid_size: 512,
            thetas: 32,
            truncation: 256,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SzegoParams {
    pub n: Vec<usize>,
    pub d: u32,
    pub mc_samples: usize,
    pub mc_alphas: usize,
    pub max_alpha_degree: u32,
    pub symbols: usize,
}

impl Default for SzegoParams {
    fn default() -> Self {
        SzegoParams {
            n: vec![2, 3],
            d: 10,
            mc_samples: 100_000,
            mc_alphas: 10,
            max_alpha_degree: 4,
            symbols: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolydiscParams {
    pub trials: usize,
    pub max_degree: i32,
    pub truncation: usize,
    pub associativity_trials: usize,
}

impl Default for PolydiscParams {
    fn default() -> Self {
        PolydiscParams {
            trials: 20,
            max_degree: 4,
            truncation: 32,
            associativity_trials: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureParams {
    pub measure: CircleMeasure,
    pub symbol: String,
    pub window: usize,
    pub degrees: Vec<usize>,
    pub uniform_trials: usize,
}

impl Default for MeasureParams {
    fn default() -> Self {
        MeasureParams {
            measure: CircleMeasure::cosine(0.8).expect("positive density"),
            symbol: "z + zbar".into(),
            window: 8,
            degrees: vec![32, 64, 128],
            uniform_trials: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Coefficient-exact identities, up to accumulated rounding.
    pub exact: f64,
    pub fixed_point: f64,
    pub isometry: f64,
    /// Gap allowed in norm brackets.
    pub bracket: f64,
    pub support: f64,
    /// Monte Carlo acceptance width in standard errors.
    pub mc_sigmas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact: 1e-12,
            fixed_point: 1e-10,
            isometry: 1e-10,
            bracket: 1e-3,
            support: 1e-6,
            mc_sigmas: 3.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub suite: Suite,
    #[serde(default)]
    pub circle: CircleParams,
    #[serde(default)]
    pub spectra: SpectraParams,
    #[serde(default)]
    pub szego: SzegoParams,
    #[serde(default)]
    pub polydisc: PolydiscParams,
    #[serde(default)]
    pub measures: MeasureParams,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn usage(field: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Usage {
        field: field.into(),
        msg: msg.into(),
    }
}

impl Scenario {
    /// Scenario with defaults for every parameter.
    pub fn new(name: &str, seed: u64, suite: Suite) -> Self {
        Scenario {
            name: name.into(),
            seed,
            suite,
            circle: CircleParams::default(),
            spectra: SpectraParams::default(),
            szego: SzegoParams::default(),
            polydisc: PolydiscParams::default(),
            measures: MeasureParams::default(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| usage("scenario", e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| usage("scenario", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
        {
            return Err(usage("name", "must be nonempty ASCII letters, digits, '-', '_' or '.'"));
        }
        let t = &self.tolerances;
        for (k, v) in [
            ("exact", t.exact),
            ("fixed_point", t.fixed_point),
            ("isometry", t.isometry),
            ("bracket", t.bracket),
            ("support", t.support),
            ("mc_sigmas", t.mc_sigmas),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(usage(format!("tolerances.{k}"), format!("must be positive and finite, got {v}")));
            }
        }
        let c = &self.circle;
        for (k, v) in [
            ("circle.trials", c.trials),
            ("circle.toeplitz_trials", c.toeplitz_trials),
            ("circle.commutant_trials", c.commutant_trials),
            ("spectra.lambda_grid", self.spectra.lambda_grid),
            ("spectra.thetas", self.spectra.thetas),
            ("szego.mc_samples", self.szego.mc_samples),
            ("szego.mc_alphas", self.szego.mc_alphas),
            ("szego.symbols", self.szego.symbols),
            ("polydisc.trials", self.polydisc.trials),
            ("polydisc.associativity_trials", self.polydisc.associativity_trials),
            ("measures.uniform_trials", self.measures.uniform_trials),
        ] {
            if v == 0 {
                return Err(usage(k, "must be at least 1"));
            }
        }
        if self.spectra.symbols == 0 && self.spectra.extra.is_empty() {
            return Err(usage("spectra.symbols", "no symbols to test"));
        }
        for (k, v) in [
            ("circle.max_degree", c.max_degree),
            ("spectra.max_degree", self.spectra.max_degree),
            ("polydisc.max_degree", self.polydisc.max_degree),
        ] {
            if !(1..=16).contains(&v) {
                return Err(usage(k, format!("must be in 1..=16, got {v}")));
            }
        }
        if c.max_correction == 0 || c.max_correction > 16 {
            return Err(usage("circle.max_correction", "must be in 1..=16"));
        }
        if c.max_truncation < 64 {
            return Err(usage("circle.max_truncation", "must be at least 64"));
        }
        for (k, g) in [("circle.grid_size", c.grid_size), ("spectra.grid_size", self.spectra.grid_size)] {
            if g < 64 {
                return Err(usage(k, "must be at least 64"));
            }
        }
        for (i, s) in self.spectra.extra.iter().enumerate() {
            let p = LaurentPoly::parse(s).map_err(|e| usage(format!("spectra.extra[{i}]"), e.to_string()))?;
            if p.nvars() != 1 {
                return Err(usage(format!("spectra.extra[{i}]"), "must be a one-variable symbol"));
            }
        }
        let min_trunc = 4 * (self.spectra.max_degree as usize + 1);
        if self.spectra.truncation < min_trunc {
            return Err(usage("spectra.truncation", format!("must be at least {min_trunc}")));
        }
        let z = &self.szego;
        if z.n.is_empty() || z.n.iter().any(|&n| !(1..=4).contains(&n)) {
            return Err(usage("szego.n", "must list dimensions in 1..=4"));
        }
        if !(4..=14).contains(&z.d) {
            return Err(usage("szego.d", "must be in 4..=14"));
        }
        if z.max_alpha_degree == 0 || z.max_alpha_degree > 20 {
            return Err(usage("szego.max_alpha_degree", "must be in 1..=20"));
        }
        if self.polydisc.truncation == 0 || self.polydisc.truncation > 48 {
            return Err(usage("polydisc.truncation", "must be in 1..=48"));
        }
        let m = &self.measures;
        let phi = LaurentPoly::parse(&m.symbol).map_err(|e| usage("measures.symbol", e.to_string()))?;
        if phi.nvars() != 1 {
            return Err(usage("measures.symbol", "must be a one-variable symbol"));
        }
        if m.degrees.is_empty() || m.degrees.iter().any(|&d| d > 512) {
            return Err(usage("measures.degrees", "must be a nonempty list of degrees ≤ 512"));
        }
        let min = *m.degrees.iter().min().expect("nonempty");
        if m.window == 0 || m.window + phi.max_abs_exp() >= min {
            return Err(usage("measures.window", format!("window + band must be below the smallest degree {min}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Result of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub tag: String,
    /// SHA-256 of the check id, seed and parameters.
    pub inputs_digest: String,
    pub metrics: BTreeMap<String, Value>,
    pub verdict: Verdict,
    /// Human-readable reasons for a `FAIL`.
    pub failures: Vec<String>,
}

impl Record {
    pub(crate) fn new(id: &str, seed: u64, inputs: &impl Serialize) -> Self {
        let info = check_info(id).expect("registered check");
        let mut h = Sha256::new();
        h.update(id.as_bytes());
        h.update(seed.to_le_bytes());
        h.update(serde_json::to_vec(inputs).expect("serializable inputs"));
        Record {
            id: id.into(),
            tag: info.tag.into(),
            inputs_digest: format!("{:x}", h.finalize()),
            metrics: BTreeMap::new(),
            verdict: Verdict::Pass,
            failures: Vec::new(),
        }
    }

    pub(crate) fn metric(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("serializable metric");
        self.metrics.insert(key.into(), v);
    }

    pub(crate) fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.verdict = Verdict::Fail;
            self.failures.push(msg());
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Registry entry for a named check.
#[derive(Debug, Clone, Copy)]
pub struct CheckInfo {
    pub id: &'static str,
    pub suite: Suite,
    /// Reference tag, or `"plumbing"`.
    pub tag: &'static str,
    pub model: &'static str,
    pub criterion: &'static str,
}

pub fn check_info(id: &str) -> Option<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.id == id)
}

fn tag_long_form(tag: &str) -> String {
    tag.split(',')
        .map(|t| {
            let t = t.trim();
            for (short, long) in [("Thm", "Theorem "), ("Def", "Definition "), ("Ex", "Example "), ("Sec", "Section ")] {
                if let Some(rest) = t.strip_prefix(short) {
                    return format!("{long}{}", rest.replacen('(', " (", 1));
                }
            }
            t.to_string()
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Description of a check: reference tag, model and pass criterion.
pub fn explain(id: &str) -> Result<String> {
    let info = check_info(id).ok_or_else(|| Error::UnknownCheck {
        id: id.into(),
        available: CHECKS.iter().map(|c| c.id.to_string()).collect(),
    })?;
    let suite = serde_json::to_value(info.suite).expect("suite name");
    Ok(format!(
        "{id}\n  cites:     {} [{}]\n  suite:     {}\n  model:     {}\n  passes if: {}\n",
        tag_long_form(info.tag),
        info.tag,
        suite.as_str().unwrap_or("?"),
        info.model,
        info.criterion
    ))
}

/// Plot data written next to the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub scenario: Scenario,
    pub records: Vec<Record>,
    pub passed: bool,
    pub failing_checks: Vec<String>,
}

/// Checks, artifacts and per-check wall time for a scenario.
pub struct Execution {
    pub report: RunReport,
    pub artifacts: Vec<Artifact>,
    pub timings: Vec<(String, f64)>,
}

/// Runs the selected suites without touching the filesystem.
pub fn execute(scenario: &Scenario) -> Result<Execution> {
    scenario.validate()?;
    let mut records = Vec::new();
    let mut artifacts = Vec::new();
    let mut timings = Vec::new();
    for suite in checks::SUITE_ORDER {
        if !scenario.suite.includes(suite) {
            continue;
        }
        for group in checks::suite_groups(suite) {
            let start = Instant::now();
            let g = group(scenario)?;
            let ids: Vec<&str> = g.records.iter().map(|r| r.id.as_str()).collect();
            timings.push((ids.join("+"), start.elapsed().as_secs_f64()));
            records.extend(g.records);
            artifacts.extend(g.artifacts);
        }
    }
    if scenario.suite == Suite::All {
        let start = Instant::now();
        records.push(checks::determinism(scenario)?);
        timings.push(("determinism".into(), start.elapsed().as_secs_f64()));
    }
    let failing_checks: Vec<String> = records.iter().filter(|r| !r.passed()).map(|r| r.id.clone()).collect();
    Ok(Execution {
        report: RunReport {
            version: env!("CARGO_PKG_VERSION").into(),
            scenario: scenario.clone(),
            passed: failing_checks.is_empty(),
            records,
            failing_checks,
        },
        artifacts,
        timings,
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    scenario: &'a str,
    seed: u64,
    created: String,
    threads: usize,
    elapsed_seconds: f64,
    check_seconds: BTreeMap<&'a str, f64>,
    files: Vec<&'a str>,
}

/// Outcome of [`run`]: the report and the directory it was written to.
pub struct RunOutcome {
    pub dir: PathBuf,
    pub report: RunReport,
}

/// Executes the scenario and writes `<out>/<name>-<timestamp>/`.
pub fn run(scenario: &Scenario, out: &Path) -> Result<RunOutcome> {
    let start = Instant::now();
    let exec = execute(scenario)?;
    let now = chrono::Utc::now();
    let stamp = now.format("%Y%m%dT%H%M%SZ").to_string();
    let mut dir = out.join(format!("{}-{stamp}", scenario.name));
    let mut k = 1;
    while dir.exists() {
        dir = out.join(format!("{}-{stamp}-{k}", scenario.name));
        k += 1;
    }
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("report.json"), report_json(&exec.report)?)?;
    for a in &exec.artifacts {
        fs::write(dir.join(&a.file), &a.contents)?;
    }
    let mut files = vec!["report.json", "manifest.json"];
    files.extend(exec.artifacts.iter().map(|a| a.file.as_str()));
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        scenario: &scenario.name,
        seed: scenario.seed,
        created: now.to_rfc3339(),
        threads: rayon::current_num_threads(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        check_seconds: exec.timings.iter().map(|(k, v)| (k.as_str(), *v)).collect(),
        files,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(RunOutcome { dir, report: exec.report })
}

/// Canonical `report.json` bytes.
pub fn report_json(report: &RunReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Scenario::new("x", 0, Suite::All).validate().unwrap();
        let s = Scenario::from_json(r#"{"name": "smoke", "seed": 3, "suite": "circle"}"#).unwrap();
        assert_eq!(s.suite, Suite::Circle);
        assert_eq!(s.circle.trials, 100);
    }

    #[test]
    fn zero_tolerance_names_field() {
        let err = Scenario::from_json(r#"{"name": "t", "tolerances": {"exact": 0}}"#).unwrap_err();
        match err {
            Error::Usage { field, .. } => assert!(field.starts_with("tolerances"), "{field}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn bad_fields_rejected() {
        for (json, field) in [
            (r#"{"name": "t", "circle": {"trials": 0}}"#, "circle.trials"),
            (r#"{"name": "a b"}"#, "name"),
            (r#"{"name": "t", "spectra": {"extra": ["z +"]}}"#, "spectra.extra[0]"),
            (r#"{"name": "t", "measures": {"window": 40}}"#, "measures.window"),
            (r#"{"name": "t", "bogus": 1}"#, "scenario"),
        ] {
            match Scenario::from_json(json).unwrap_err() {
                Error::Usage { field: f, .. } => assert_eq!(f, field),
                e => panic!("{e}"),
            }
        }
        assert!(Suite::parse("torus").is_err());
        assert_eq!(Suite::parse("spectra").unwrap(), Suite::Spectra);
    }

    #[test]
    fn explain_known_and_unknown() {
        let t = explain("thm2_1_identities").unwrap();
        assert!(t.contains("Theorem 2.1"));
        assert!(explain("hartman_wintner").unwrap().contains("Theorem 3.1 (3)"));
        assert!(explain("gamma_equation").unwrap().contains("Example 4.3"));
        match explain("nope").unwrap_err() {
            Error::UnknownCheck { available, .. } => assert!(available.len() == CHECKS.len()),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn every_check_has_a_tag() {
        assert!(CHECKS.iter().all(|c| !c.tag.is_empty()));
        let mut ids: Vec<_> = CHECKS.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), CHECKS.len());
    }
}
