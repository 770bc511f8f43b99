use std::path::PathBuf;

use msqi::{Mode, SchemeChoice, TestFunction};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Exp1,
    Exp2,
    Exp3,
    Exp4,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Exp1 => "exp1",
            Experiment::Exp2 => "exp2",
            Experiment::Exp3 => "exp3",
            Experiment::Exp4 => "exp4",
        }
    }
}

/// Fully resolved parameters of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub functions: Vec<TestFunction>,
    /// Grid sizes; each grid has `n + 1` nodes on `[-1, 1]`.
    pub n: Vec<usize>,
    pub d: Vec<usize>,
    pub mu: u32,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    pub n_e: Vec<usize>,
    pub amplitude: f64,
    pub seeds: Vec<u64>,
    pub scheme: SchemeChoice,
    pub mode: Mode,
    pub out_dir: PathBuf,
}

/// Partial configuration from a JSON file or command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub experiment: Option<Experiment>,
    pub functions: Option<Vec<TestFunction>>,
    pub n: Option<Vec<usize>>,
    pub d: Option<Vec<usize>>,
    pub mu: Option<u32>,
    #[serde(rename = "K")]
    pub k: Option<Vec<usize>>,
    pub n_e: Option<Vec<usize>>,
    pub amplitude: Option<f64>,
    pub seeds: Option<Vec<u64>>,
    pub scheme: Option<SchemeChoice>,
    pub mode: Option<Mode>,
    pub out_dir: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `other` wins wherever it is set.
    pub fn merge(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            experiment: other.experiment.or(self.experiment),
            functions: other.functions.or(self.functions),
            n: other.n.or(self.n),
            d: other.d.or(self.d),
            mu: other.mu.or(self.mu),
            k: other.k.or(self.k),
            n_e: other.n_e.or(self.n_e),
            amplitude: other.amplitude.or(self.amplitude),
            seeds: other.seeds.or(self.seeds),
            scheme: other.scheme.or(self.scheme),
            mode: other.mode.or(self.mode),
            out_dir: other.out_dir.or(self.out_dir),
        }
    }
}

impl ExperimentConfig {
    /// Parameters of the published runs.
    pub fn defaults(experiment: Experiment) -> Self {
        use TestFunction::*;
        let base = ExperimentConfig {
            experiment,
            functions: vec![F1, F2, F3, F4],
            n: vec![1024],
            d: vec![3],
            mu: 4,
            k: vec![10],
            n_e: vec![500, 1000, 2000, 3000, 4000],
            amplitude: 0.0,
            seeds: vec![42],
            scheme: SchemeChoice::Auto,
            mode: Mode::Interpolating,
            out_dir: PathBuf::from("results").join(experiment.name()),
        };
        match experiment {
            Experiment::Exp1 => base,
            Experiment::Exp2 => ExperimentConfig {
                n: (100..=1500).step_by(200).collect(),
                d: vec![0, 1, 3, 5],
                n_e: vec![],
                ..base
            },
            Experiment::Exp3 => ExperimentConfig {
                functions: vec![F1],
                d: vec![6],
                n_e: vec![2000],
                amplitude: 0.5,
                mode: Mode::LeastSquares { degree: 3 },
                ..base
            },
            Experiment::Exp4 => ExperimentConfig {
                functions: vec![F5, F6],
                n: (200..=2000).step_by(200).collect(),
                d: vec![1, 3, 5],
                n_e: vec![4000],
                ..base
            },
        }
    }

    pub fn resolve(overrides: ConfigOverrides) -> Result<Self> {
        let experiment = overrides
            .experiment
            .ok_or_else(|| CliError::Config("no experiment given".into()))?;
        let d = Self::defaults(experiment);
        let cfg = ExperimentConfig {
            experiment,
            functions: overrides.functions.unwrap_or(d.functions),
            n: overrides.n.unwrap_or(d.n),
            d: overrides.d.unwrap_or(d.d),
            mu: overrides.mu.unwrap_or(d.mu),
            k: overrides.k.unwrap_or(d.k),
            n_e: overrides.n_e.unwrap_or(d.n_e),
            amplitude: overrides.amplitude.unwrap_or(d.amplitude),
            seeds: overrides.seeds.unwrap_or(d.seeds),
            scheme: overrides.scheme.unwrap_or(d.scheme),
            mode: overrides.mode.unwrap_or(d.mode),
            out_dir: overrides.out_dir.unwrap_or(d.out_dir),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |name: &str, len: usize| {
            if len == 0 {
                Err(CliError::Config(format!("'{name}' must not be empty")))
            } else {
                Ok(())
            }
        };
        empty("functions", self.functions.len())?;
        empty("n", self.n.len())?;
        empty("d", self.d.len())?;
        empty("K", self.k.len())?;
        if matches!(self.experiment, Experiment::Exp1 | Experiment::Exp3 | Experiment::Exp4) {
            empty("n_e", self.n_e.len())?;
        }
        if self.experiment == Experiment::Exp3 {
            empty("seeds", self.seeds.len())?;
        }
        if self.n_e.contains(&0) {
            return Err(CliError::Config("n_e values must be >= 1".into()));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(CliError::Config("amplitude must be finite and >= 0".into()));
        }
        Ok(())
    }
}
