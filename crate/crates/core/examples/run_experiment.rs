//! Runs a builtin experiment configuration and prints its criteria and CSV.

use cylres::experiments::{csv_string, run_with_threads, Experiment, ExperimentConfig};

fn main() -> cylres::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "example-threshold".into());
    let experiment: Experiment = name.parse()?;
    let cfg = ExperimentConfig::default_for(experiment);
    println!("{}", cfg.to_json()?);
    let outcome = run_with_threads(&cfg, 2)?;
    for c in &outcome.criteria {
        println!("{} {:24} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    print!("{}", csv_string(&outcome.rows)?);
    Ok(())
}
