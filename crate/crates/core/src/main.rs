use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use sphiso::error::{Error, Result};
use sphiso::scenario::{self, Scenario, Suite};
use sphiso::symbols::{self, LaurentPoly, Winding};

#[derive(Parser)]
#[command(name = "sphiso", version, about = "Toeplitz-operator verification runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write a report directory.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Describe a named check.
    Explain { check: String },
    /// Sample a symbol on the torus grid and print bounds as JSON.
    SymbolEval {
        expr: String,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Also print every grid sample.
        #[arg(long)]
        samples: bool,
    },
}

fn symbol_eval(expr: &str, grid: usize, samples: bool) -> Result<serde_json::Value> {
    let phi = LaurentPoly::parse(expr)?;
    if grid == 0 || grid.saturating_pow(phi.nvars() as u32) > 1 << 24 {
        return Err(Error::Usage {
            field: "grid".into(),
            msg: format!("grid {grid} out of range for {} variables", phi.nvars()),
        });
    }
    let range = symbols::eval_grid(&phi, grid);
    let (lower, upper) = symbols::sup_norm(&phi, grid);
    let mut out = json!({
        "symbol": phi.to_text(),
        "nvars": phi.nvars(),
        "grid_size": grid,
        "min_grid": phi.min_grid(),
        "sup_norm_bracket": [lower, upper],
        "analytic": phi.is_analytic(),
    });
    if phi.nvars() == 1 {
        let w = match symbols::winding(&phi, sphiso::C64::new(0.0, 0.0), grid)? {
            Winding::Number(n) => json!(n),
            Winding::OnCurve { .. } => json!("ON_CURVE"),
        };
        out["winding_about_zero"] = w;
        let hull = symbols::conv_hull(&range.samples)?;
        out["hull_vertices"] = serde_json::to_value(hull.vertices())?;
    }
    if samples {
        out["samples"] = serde_json::to_value(&range.samples)?;
    }
    Ok(out)
}

fn exec(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { scenario, seed, suite, out } => {
            let mut s = Scenario::load(&scenario)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(suite) = suite {
                s.suite = Suite::parse(&suite)?;
            }
            let outcome = scenario::run(&s, &out)?;
            for r in &outcome.report.records {
                println!("{:<32} {:<24} {:?}", r.id, r.tag, r.verdict);
            }
            println!("report: {}", outcome.dir.join("report.json").display());
            if !outcome.report.passed {
                eprintln!("failing checks: {}", outcome.report.failing_checks.join(", "));
            }
            Ok(outcome.report.passed)
        }
        Command::Explain { check } => {
            print!("{}", scenario::explain(&check)?);
            Ok(true)
        }
        Command::SymbolEval { expr, grid, samples } => {
            let v = symbol_eval(&expr, grid, samples)?;
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match exec(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
