//! TOML simulation configs.
//!
//! ```toml
//! n = 500
//! alpha = 0.05
//! replications = 2000
//! seed = 1
//! choices = [1, 2]
//! measures = ["f_beta(0.5)", "accuracy"]
//! joint = "all"            # or "per-rule", or [["t03:accuracy", "t05:accuracy"]]
//!
//! [process]
//! kind = "mixture"         # or "bootstrap" with population = "file.csv"
//!
//! [[rules]]
//! name = "t03"
//! kind = "threshold"
//! theta = 0.3
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use perfci::quantile::DEFAULT_DRAWS;
use perfci::sim::OneNn;
use perfci::{
    BinaryDataset, Choice, DataProcess, GaussianMixture, NamedRule, RuleSpec, SimConfig,
    TruthMethod,
};
use serde::Deserialize;

use crate::targets::{resolve_sets, JointSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default = "default_choices")]
    pub choices: Vec<u8>,
    pub measures: Vec<String>,
    #[serde(default)]
    pub joint: Option<JointField>,
    /// Monte-Carlo size for true values; analytic when absent.
    #[serde(default)]
    pub truth_mc_size: Option<usize>,
    #[serde(default)]
    pub truth_seed: u64,
    pub process: ProcessField,
    pub rules: Vec<RuleField>,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_replications() -> usize {
    2000
}

fn default_draws() -> usize {
    DEFAULT_DRAWS
}

fn default_choices() -> Vec<u8> {
    vec![2]
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum JointField {
    Keyword(String),
    Sets(Vec<Vec<String>>),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessField {
    Mixture {
        #[serde(default = "half")]
        prior: f64,
        #[serde(default)]
        mean0: f64,
        #[serde(default = "one")]
        mean1: f64,
    },
    Bootstrap {
        population: String,
        #[serde(default = "yes")]
        with_replacement: bool,
    },
}

fn half() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleField {
    Threshold {
        name: Option<String>,
        theta: f64,
    },
    OneNn {
        name: String,
        train_size: usize,
        #[serde(default)]
        train_seed: u64,
    },
    Column {
        name: String,
        column: Option<String>,
    },
}

impl FileConfig {
    pub fn from_path(path: &Path) -> Result<SimConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let parsed: FileConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        parsed.into_sim(path.parent().unwrap_or(Path::new(".")))
    }

    /// Relative population paths resolve against `base`.
    pub fn into_sim(self, base: &Path) -> Result<SimConfig> {
        let process = match self.process {
            ProcessField::Mixture {
                prior,
                mean0,
                mean1,
            } => {
                if !(prior > 0.0 && prior < 1.0) {
                    bail!("mixture prior {prior} is outside (0, 1)");
                }
                DataProcess::GaussianMixture(GaussianMixture {
                    prior,
                    mean0,
                    mean1,
                })
            }
            ProcessField::Bootstrap {
                population,
                with_replacement,
            } => {
                let path = base.join(population);
                let file = std::fs::File::open(&path)
                    .with_context(|| format!("opening population {}", path.display()))?;
                let population = BinaryDataset::from_csv(file)
                    .with_context(|| format!("reading population {}", path.display()))?;
                DataProcess::EmpiricalBootstrap {
                    population,
                    with_replacement,
                }
            }
        };
        let mixture = match &process {
            DataProcess::GaussianMixture(m) => Some(*m),
            _ => None,
        };
        let rules = self
            .rules
            .into_iter()
            .map(|r| {
                Ok(match r {
                    RuleField::Threshold { name, theta } => {
                        let rule = NamedRule::threshold(theta);
                        match name {
                            Some(name) => NamedRule::new(name, rule.spec),
                            None => rule,
                        }
                    }
                    RuleField::OneNn {
                        name,
                        train_size,
                        train_seed,
                    } => {
                        let Some(mixture) = mixture else {
                            bail!("1-NN rule `{name}` needs the mixture process");
                        };
                        NamedRule::new(
                            name,
                            RuleSpec::OneNn(OneNn::sample(&mixture, train_size, train_seed)?),
                        )
                    }
                    RuleField::Column { name, column } => {
                        let column = column.unwrap_or_else(|| name.clone());
                        NamedRule::new(name, RuleSpec::FixedPredictions { column })
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let choices = self
            .choices
            .iter()
            .map(|&c| {
                Choice::from_number(c).with_context(|| format!("choice must be 1 or 2, got {c}"))
            })
            .collect::<Result<Vec<_>>>()?;
        let truth = match self.truth_mc_size {
            Some(size) => TruthMethod::MonteCarlo {
                size,
                seed: self.truth_seed,
            },
            None => TruthMethod::Analytic,
        };
        let mut sim = SimConfig {
            process,
            rules,
            measures: self.measures,
            n: self.n,
            alpha: self.alpha,
            replications: self.replications,
            choices,
            joint_sets: Vec::new(),
            draws: self.draws,
            seed: self.seed,
            truth,
        };
        let joint = match self.joint {
            None => JointSpec::PerRule,
            Some(JointField::Keyword(k)) => JointSpec::parse(&k)?,
            Some(JointField::Sets(sets)) => JointSpec::Sets(sets),
        };
        let rule_names: Vec<&str> = sim.rules.iter().map(|r| r.name.as_str()).collect();
        sim.joint_sets = resolve_sets(&joint, &rule_names, &sim.measures)?.unwrap_or_default();
        Ok(sim)
    }
}
