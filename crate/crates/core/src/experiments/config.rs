use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Experiment;
use crate::error::{Error, Result};
use crate::potential::{builtin, load_potential, CylinderPotential, PotentialDoc, BUILTINS};
use crate::surface::RegionSpec;

/// Where the potential of a run comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Builtin {
        builtin: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Inline {
        inline: PotentialDoc,
    },
    File {
        file: PathBuf,
    },
}

impl PotentialSpec {
    pub fn builtin(name: &str) -> Self {
        Self::Builtin {
            builtin: name.to_string(),
            params: BTreeMap::new(),
        }
    }

    /// Relative file paths resolve against `base`.
    pub fn load(&self, base: Option<&Path>) -> Result<CylinderPotential> {
        match self {
            Self::Builtin { builtin: name, params } => builtin(name, params),
            Self::Inline { inline } => inline.clone().into_potential(),
            Self::File { file } => {
                let path = match base {
                    Some(b) if file.is_relative() => b.join(file),
                    _ => file.clone(),
                };
                load_potential(&path)
            }
        }
    }
}

fn default_slabs() -> usize {
    256
}

fn default_tol() -> f64 {
    1e-10
}

fn default_pole_radius() -> f64 {
    0.2
}

/// One experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub potential: PotentialSpec,
    pub l: Vec<u32>,
    /// Search regions; the experiments read the `disk` radius from here.
    #[serde(default)]
    pub regions: Vec<RegionSpec>,
    /// Truncation half-widths `K`. Most experiments use the first entry; the
    /// pole count sweeps all of them.
    pub k: Vec<u32>,
    #[serde(default = "default_slabs")]
    pub slabs: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Radius of the disks `D_l(λ_j, r)`.
    #[serde(default = "default_pole_radius")]
    pub pole_radius: f64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Record wall times in `results.csv` (makes the file run-dependent).
    #[serde(default)]
    pub timing: bool,
    /// Experiment-specific knobs; see the README for the keys each one reads.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Directory that relative potential files resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: Self = serde_json::from_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load_potential(&self) -> Result<CylinderPotential> {
        self.potential.load(self.base_dir.as_deref())
    }

    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    /// The `disk` radius of the first disk region, else `default`.
    pub fn disk_radius(&self, default: f64) -> f64 {
        self.regions
            .iter()
            .find_map(|r| match r {
                RegionSpec::Disk { rho } => Some(*rho),
                _ => None,
            })
            .unwrap_or(default)
    }

    pub fn first_k(&self) -> u32 {
        self.k[0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.l.is_empty() {
            return Err(Error::Config("`l` must list at least one threshold".into()));
        }
        if self.k.is_empty() {
            return Err(Error::Config("`k` must list at least one truncation".into()));
        }
        let k_max = *self.k.iter().max().unwrap();
        if let Some(&l) = self.l.iter().find(|&&l| l <= k_max) {
            return Err(Error::Config(format!("l = {l} must exceed K = {k_max}")));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config("`tol` must be positive".into()));
        }
        if !(self.pole_radius > 0.0 && self.pole_radius.is_finite()) {
            return Err(Error::Config("`pole_radius` must be positive".into()));
        }
        if self.slabs == 0 {
            return Err(Error::Config("`slabs` must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("`threads` must be positive".into()));
        }
        if let PotentialSpec::Builtin { builtin: name, .. } = &self.potential {
            if !BUILTINS.contains(&name.as_str()) {
                return Err(Error::Config(format!("unknown builtin potential `{name}`")));
            }
        }
        for r in &self.regions {
            r.validate()?;
        }
        Ok(())
    }

    /// Built-in configuration of an experiment, used by `--config default`.
    pub fn default_for(experiment: Experiment) -> Self {
        use Experiment::*;
        let (potential, l, k, regions): (&str, Vec<u32>, Vec<u32>, Vec<f64>) = match experiment {
            FreeBaseline => ("zero", vec![10], vec![4], vec![2.0]),
            DecoupledCheck => ("square_well", vec![10, 20], vec![2], vec![2.5]),
            NearThreshold => ("well_bump", vec![16, 32, 64], vec![3, 4, 5], vec![3.0]),
            ThresholdZero => ("well_bump", vec![16, 32, 64], vec![4], vec![0.5]),
            LeadingCorrection | Polesequence => ("well_bump", vec![16, 32, 64], vec![4], vec![3.0]),
            ExampleThreshold => ("example10", vec![8, 16, 32, 64], vec![4], vec![1.0]),
            ExampleLogl => ("example10", vec![32, 64], vec![4], vec![]),
            ResonanceFreeScan => ("example10", vec![16, 32], vec![4], vec![]),
            IdentitySuite => ("well_bump", vec![16], vec![4], vec![]),
        };
        let mut potential = PotentialSpec::builtin(potential);
        if experiment == ThresholdZero {
            potential = PotentialSpec::Builtin {
                builtin: "well_bump".into(),
                params: BTreeMap::from([("depth".to_string(), 0.0), ("bumpscale".to_string(), 1.0)]),
            };
        }
        let params = match experiment {
            ExampleLogl => BTreeMap::from([("log_factor".to_string(), 0.9), ("exponent".to_string(), 0.4)]),
            ResonanceFreeScan => BTreeMap::from([("log_factor".to_string(), 0.5), ("inner_factor".to_string(), 3.0)]),
            ThresholdZero | ExampleThreshold => BTreeMap::from([("growth".to_string(), 3.0)]),
            _ => BTreeMap::new(),
        };
        Self {
            experiment,
            potential,
            l,
            regions: regions.into_iter().map(|rho| RegionSpec::Disk { rho }).collect(),
            k,
            slabs: default_slabs(),
            tol: default_tol(),
            pole_radius: default_pole_radius(),
            threads: None,
            out: None,
            seed: 0,
            timing: false,
            params,
            base_dir: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for e in Experiment::ALL {
            let cfg = ExperimentConfig::default_for(e);
            cfg.validate().unwrap();
            let back: ExperimentConfig = serde_json::from_str(&cfg.to_json().unwrap()).unwrap();
            assert_eq!(back, cfg);
            cfg.load_potential().unwrap();
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ExperimentConfig::default_for(Experiment::ExampleThreshold);
        cfg.l = vec![8];
        cfg.k = vec![4];
        cfg.validate().unwrap();
        cfg.l = vec![5];
        cfg.k = vec![5];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default_for(Experiment::FreeBaseline);
        cfg.tol = 0.0;
        assert!(cfg.validate().is_err());
        cfg.tol = 1e-10;
        cfg.potential = PotentialSpec::builtin("nope");
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn parses_minimal_json() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"experiment":"example-threshold","potential":{"builtin":"example10"},"l":[8,16],"k":[4]}"#,
        )
        .unwrap();
        assert_eq!(cfg.slabs, 256);
        assert_eq!(cfg.experiment, Experiment::ExampleThreshold);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"experiment":"nope","potential":{"builtin":"zero"},"l":[8],"k":[1]}"#).is_err());
    }
}
