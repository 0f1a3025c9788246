//! Types, the type-adjustment map and the social choice function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a profile holds the agents' original valuations or valuations
/// after the designer spent `cost` on adjustment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProfileKind {
    Initial,
    Adjusted { cost: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeProfile {
    values: Vec<f64>,
    kind: ProfileKind,
}

impl TypeProfile {
    pub fn initial(values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::NegativeValuation(bad));
        }
        Ok(Self { values, kind: ProfileKind::Initial })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Valuation scaling `theta -> (1 + beta * c^gamma) * theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentRule {
    beta: f64,
    gamma: f64,
}

impl AdjustmentRule {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidRule(format!("beta must be >= 0, got {beta}")));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidRule(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        Ok(Self { beta, gamma })
    }

    /// The square-root rule, `gamma = 1/2`.
    pub fn square_root(beta: f64) -> Result<Self> {
        Self::new(beta, 0.5)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Multiplier `1 + beta * c^gamma` applied to every valuation.
    pub fn scale(&self, cost: f64) -> Result<f64> {
        check_cost(cost)?;
        Ok(1.0 + self.beta * cost.powf(self.gamma))
    }
}

pub(crate) fn check_cost(cost: f64) -> Result<()> {
    if cost.is_finite() && cost >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidCost(cost))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionFamily {
    Uniform,
}

impl std::str::FromStr for DistributionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(DistributionFamily::Uniform),
            other => Err(Error::UnsupportedDistribution(other.to_string())),
        }
    }
}

/// Distribution of each agent's initial valuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialDistribution {
    pub family: DistributionFamily,
    pub low: f64,
    pub high: f64,
}

impl InitialDistribution {
    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && low < high) {
            return Err(Error::BadSupport { low, high });
        }
        Ok(Self { family: DistributionFamily::Uniform, low, high })
    }

    pub fn unit_uniform() -> Self {
        Self { family: DistributionFamily::Uniform, low: 0.0, high: 1.0 }
    }

    pub fn is_unit_uniform(&self) -> bool {
        self.family == DistributionFamily::Uniform && self.low == 0.0 && self.high == 1.0
    }
}

impl Default for InitialDistribution {
    fn default() -> Self {
        Self::unit_uniform()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub agents: usize,
    pub adjustment: AdjustmentRule,
    pub distribution: InitialDistribution,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(
        agents: usize,
        adjustment: AdjustmentRule,
        distribution: InitialDistribution,
        seed: u64,
    ) -> Result<Self> {
        check_agents(agents)?;
        Ok(Self { agents, adjustment, distribution, seed })
    }
}

pub(crate) fn check_agents(agents: usize) -> Result<()> {
    if agents < 2 {
        Err(Error::TooFewAgents(agents))
    } else {
        Ok(())
    }
}

/// Allocation and transfers produced by the social choice function.
///
/// `transfers[i] <= 0` is what agent `i` pays; `designer_receipt` is the sum
/// of those payments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub allocation: Vec<bool>,
    pub designer_keeps: bool,
    pub transfers: Vec<f64>,
    pub designer_receipt: f64,
}

impl Outcome {
    pub fn winner(&self) -> Option<usize> {
        self.allocation.iter().position(|&won| won)
    }
}

/// Scales every valuation of an initial profile by the rule's multiplier.
pub fn adjust_types(profile: &TypeProfile, rule: &AdjustmentRule, cost: f64) -> Result<TypeProfile> {
    if profile.kind != ProfileKind::Initial {
        return Err(Error::WrongProfileKind);
    }
    let scale = rule.scale(cost)?;
    Ok(TypeProfile {
        values: profile.values.iter().map(|v| scale * v).collect(),
        kind: ProfileKind::Adjusted { cost },
    })
}

/// Highest valuation wins (ties to the lowest index) and pays half its
/// valuation to the designer.
pub fn scf_outcome(profile: &TypeProfile) -> Result<Outcome> {
    let values = profile.values();
    if values.is_empty() {
        return Err(Error::EmptyProfile);
    }
    if values.len() < 2 {
        return Err(Error::TooFewAgents(values.len()));
    }
    let mut winner = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[winner] {
            winner = i;
        }
    }
    let mut transfers = vec![0.0; values.len()];
    transfers[winner] = -values[winner] / 2.0;
    let mut allocation = vec![false; values.len()];
    allocation[winner] = true;
    Ok(Outcome {
        allocation,
        designer_keeps: false,
        designer_receipt: -transfers.iter().sum::<f64>(),
        transfers,
    })
}

/// Quasi-linear utility `theta * y_i + t_i`.
pub fn agent_utility(outcome: &Outcome, agent: usize, theta: f64) -> Result<f64> {
    let len = outcome.allocation.len();
    if agent >= len || agent >= outcome.transfers.len() {
        return Err(Error::BadIndex { index: agent, len });
    }
    let won = if outcome.allocation[agent] { 1.0 } else { 0.0 };
    Ok(theta * won + outcome.transfers[agent])
}

/// Expected maximum of `draws` i.i.d. valuations.
pub fn max_order_statistic_mean(draws: usize, distribution: &InitialDistribution) -> Result<f64> {
    if draws == 0 {
        return Err(Error::TooFewAgents(0));
    }
    match distribution.family {
        DistributionFamily::Uniform => {
            let n = draws as f64;
            Ok(distribution.low + (distribution.high - distribution.low) * n / (n + 1.0))
        }
    }
}

/// Density of an adjusted valuation when initial valuations are uniform[0,1].
pub fn adjusted_density(rule: &AdjustmentRule, cost: f64, x: f64) -> Result<f64> {
    let support = rule.scale(cost)?;
    Ok(if (0.0..=support).contains(&x) { 1.0 / support } else { 0.0 })
}
