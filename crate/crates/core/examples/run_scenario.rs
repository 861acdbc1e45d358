//! Build a scenario in code, run the polydisc and measures suites, and
//! write the report directory under the system temp dir.

use sphiso::scenario::{self, Scenario, Suite};
use sphiso::Result;

pub fn main() -> Result<()> {
    let mut s = Scenario::new("example", 42, Suite::Measures);
    s.measures.degrees = vec![32, 64];
    let exec = scenario::execute(&s)?;
    for r in &exec.report.records {
        println!("{:<30} {:<10} {:?}", r.id, r.tag, r.verdict);
    }

    s.suite = Suite::Polydisc;
    let out = std::env::temp_dir().join("sphiso-example-runs");
    let outcome = scenario::run(&s, &out)?;
    println!("wrote {}", outcome.dir.display());
    println!("passed: {}", outcome.report.passed);
    print!("{}", scenario::explain("gamma_equation")?);
    Ok(())
}
