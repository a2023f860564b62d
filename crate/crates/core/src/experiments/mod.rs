//! Named experiments, their configuration and their output files.

mod config;
mod output;
mod runners;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use config::{ExperimentConfig, PotentialSpec};
pub use output::{csv_string, failure_summary, summary_value, write_outputs, write_summary, ResultRow, CSV_HEADER};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FreeBaseline,
    DecoupledCheck,
    NearThreshold,
    ThresholdZero,
    LeadingCorrection,
    Polesequence,
    ExampleThreshold,
    ExampleLogl,
    ResonanceFreeScan,
    IdentitySuite,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::FreeBaseline,
        Experiment::DecoupledCheck,
        Experiment::NearThreshold,
        Experiment::ThresholdZero,
        Experiment::LeadingCorrection,
        Experiment::Polesequence,
        Experiment::ExampleThreshold,
        Experiment::ExampleLogl,
        Experiment::ResonanceFreeScan,
        Experiment::IdentitySuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::FreeBaseline => "free-baseline",
            Experiment::DecoupledCheck => "decoupled-check",
            Experiment::NearThreshold => "near-threshold",
            Experiment::ThresholdZero => "threshold-zero",
            Experiment::LeadingCorrection => "leading-correction",
            Experiment::Polesequence => "polesequence",
            Experiment::ExampleThreshold => "example-threshold",
            Experiment::ExampleLogl => "example-logl",
            Experiment::ResonanceFreeScan => "resonance-free-scan",
            Experiment::IdentitySuite => "identity-suite",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::FreeBaseline => "zero potential: no resonances off the threshold",
            Experiment::DecoupledCheck => "theta-independent potential: D factors into 1-D Wronskians",
            Experiment::NearThreshold => "pole counts near the images of 1-D resonances",
            Experiment::ThresholdZero => "resonances shrinking onto the threshold when V_0 has a zero resonance",
            Experiment::LeadingCorrection => "second-order correction, error O(l^-3)",
            Experiment::Polesequence => "Re z decay for real smooth potentials",
            Experiment::ExampleThreshold => "closed form near threshold for 2 chi cos(theta)",
            Experiment::ExampleLogl => "Lambert-W pole at depth ~ log l for 2 chi cos(theta)",
            Experiment::ResonanceFreeScan => "empty annulus around the threshold when V_0 = 0",
            Experiment::IdentitySuite => "algebraic identities, zero-engine oracles, resolvent decay",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// One pass/fail check of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Criterion {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub experiment: Experiment,
    pub rows: Vec<ResultRow>,
    pub criteria: Vec<Criterion>,
    pub tables: Value,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }
}

/// Runs the configured experiment on the current rayon pool.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    runners::dispatch(cfg)
}

/// Runs on a dedicated pool of `threads` workers.
pub fn run_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            let j = serde_json::to_string(&e).unwrap();
            assert_eq!(j, format!("\"{}\"", e.name()));
        }
        assert!("nope".parse::<Experiment>().is_err());
    }
}
