//! Loads a scenario file and runs it exactly as `dplap verify` does.
//!
//! cargo run --example verify_scenario -- scenarios/radial_sums_n3_p4.json

use dominative::scenario::{run, RunOptions, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/crandall_zhang_n3_p4.json").to_string());
    let raw = std::fs::read_to_string(&path)?;
    let scenario = Scenario::from_json(&raw)?;
    let report = run(&scenario, raw.as_bytes(), RunOptions::default())?;

    println!("{} (sha256 {}...)", report.scenario, &report.scenario_sha256[..12]);
    for suite in &report.suites {
        let mark = if suite.as_expected { "ok  " } else { "FAIL" };
        println!(
            "  {mark} {:<20} passed={:<5} evaluated={:<6} skipped={}",
            format!("{:?}", suite.suite),
            suite.passed,
            suite.evaluated,
            suite.skipped
        );
        for r in &suite.residuals {
            println!("       {:<16} {:+.3e} (tol {:.0e})", r.name, r.value, r.tolerance);
        }
    }
    println!("all as expected: {}", report.all_as_expected);
    Ok(())
}
