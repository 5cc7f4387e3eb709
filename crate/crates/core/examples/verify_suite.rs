//! Running a property suite from code and reading its records.

use dpcalc::verify::{run_suite, Suite};
use dpcalc::Result;

pub fn run_example() -> Result<()> {
    let report = run_suite(Suite::Counterexample, 0)?;
    print!("{}", report.to_table());
    let line = report.to_jsonl_string()?;
    println!(
        "{} JSONL lines, all pass: {}",
        line.lines().count(),
        report.passed()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
