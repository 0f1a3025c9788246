//! Run configuration: a flat JSON file overlaid by command-line flags.

use std::path::Path;

use adjmech::model::{AdjustmentRule, InitialDistribution};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_BETA: f64 = 2.0;
pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_AGENTS: usize = 2;
pub const DEFAULT_SEED: u64 = 0;
pub const SEED_ENV: &str = "ADJMECH_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    pub family: String,
    pub low: f64,
    pub high: f64,
}

/// Values read from a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub agents: Option<usize>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub distribution: Option<DistributionConfig>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub cost: Option<f64>,
    pub reserve: Option<f64>,
    pub threads: Option<usize>,
    pub method: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Overrides taken from flags; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlagOverrides {
    pub agents: Option<usize>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub cost: Option<f64>,
    pub reserve: Option<f64>,
    pub threads: Option<usize>,
    pub method: Option<String>,
}

/// Fully resolved configuration, echoed into every output header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub agents: usize,
    pub beta: f64,
    pub gamma: f64,
    pub distribution: DistributionConfig,
    pub seed: u64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reserve: Option<f64>,
    pub method: String,
    /// Worker threads; kept out of the echoed config since results do not
    /// depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Flags win over the file; the seed falls back to `ADJMECH_SEED`, then 0.
    pub fn resolve(
        file: FileConfig,
        flags: FlagOverrides,
        env_seed: Option<String>,
        default_samples: usize,
    ) -> Result<Self, CliError> {
        let env_seed = match env_seed {
            Some(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{s}`")))?,
            ),
            None => None,
        };
        let distribution =
            file.distribution.unwrap_or(DistributionConfig { family: "uniform".into(), low: 0.0, high: 1.0 });
        Ok(Self {
            agents: flags.agents.or(file.agents).unwrap_or(DEFAULT_AGENTS),
            beta: flags.beta.or(file.beta).unwrap_or(DEFAULT_BETA),
            gamma: flags.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA),
            distribution,
            seed: flags.seed.or(file.seed).or(env_seed).unwrap_or(DEFAULT_SEED),
            samples: flags.samples.or(file.samples).unwrap_or(default_samples),
            cost: flags.cost.or(file.cost),
            reserve: flags.reserve.or(file.reserve),
            method: flags.method.or(file.method).unwrap_or_else(|| "closed-form".into()),
            threads: flags.threads.or(file.threads),
        })
    }

    pub fn rule(&self) -> Result<AdjustmentRule, CliError> {
        Ok(AdjustmentRule::new(self.beta, self.gamma)?)
    }

    /// The analyses are defined for uniform[0,1] initial types only.
    pub fn distribution(&self) -> Result<InitialDistribution, CliError> {
        self.distribution.family.parse::<adjmech::model::DistributionFamily>()?;
        let d = InitialDistribution::uniform(self.distribution.low, self.distribution.high)?;
        if !d.is_unit_uniform() {
            return Err(adjmech::Error::UnsupportedDistribution(format!(
                "uniform[{}, {}] (only uniform[0, 1] is supported)",
                d.low, d.high
            ))
            .into());
        }
        Ok(d)
    }

    pub fn method(&self) -> Result<adjmech::profit::Method, CliError> {
        self.method.parse().map_err(CliError::Usage)
    }

    /// Checks every field against the library preconditions.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.agents < 2 {
            return Err(adjmech::Error::TooFewAgents(self.agents).into());
        }
        self.rule()?;
        self.distribution()?;
        self.method()?;
        if self.threads == Some(0) {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        if let Some(c) = self.cost {
            if !(c.is_finite() && c >= 0.0) {
                return Err(adjmech::Error::InvalidCost(c).into());
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
