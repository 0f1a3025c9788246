//! Optimal-auction benchmark for i.i.d. uniform[0,1] bidders.
//!
//! The revenue-maximizing mechanism is run as a second-price auction with
//! the optimal reserve. Expected payments use the standard reserve-auction
//! formula `r(1-F(r))G(r) + ∫_r^1 y(1-F(y))g(y) dy` with `G(y) = y^(I-1)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{self, EstimateWithCI};
use crate::model::{check_agents, AdjustmentRule, DistributionFamily, InitialDistribution};
use crate::profit::{optimize_cost, Method};

pub const MIN_ORACLE_SAMPLES: usize = 100_000;

/// Reserve solving `r = (1 - F(r)) / f(r)`, i.e. where the virtual value
/// `2r - high` crosses zero, clamped into the support.
pub fn optimal_reserve(distribution: &InitialDistribution) -> Result<f64> {
    match distribution.family {
        DistributionFamily::Uniform => {
            if !(distribution.low < distribution.high) {
                return Err(Error::BadSupport { low: distribution.low, high: distribution.high });
            }
            Ok((distribution.high / 2.0).max(distribution.low))
        }
    }
}

fn check_reserve(reserve: f64) -> Result<()> {
    if (0.0..=1.0).contains(&reserve) {
        Ok(())
    } else {
        Err(Error::InvalidReserve(reserve))
    }
}

/// Ex-ante expected payment of one bidder, integrated in closed form.
pub fn expected_payment_per_bidder(reserve: f64, agents: usize) -> Result<f64> {
    check_reserve(reserve)?;
    if agents == 0 {
        return Err(Error::TooFewAgents(0));
    }
    let n = agents as i32;
    let r = reserve;
    let boundary = r * (1.0 - r) * r.powi(n - 1);
    // ∫_r^1 y (1 - y) (n-1) y^(n-2) dy
    let interior = (n - 1) as f64 * ((1.0 - r.powi(n)) / n as f64 - (1.0 - r.powi(n + 1)) / (n + 1) as f64);
    Ok(boundary + interior)
}

pub fn seller_revenue(reserve: f64, agents: usize) -> Result<f64> {
    Ok(agents as f64 * expected_payment_per_bidder(reserve, agents)?)
}

/// Expected valuation taken as the midpoint of `[reserve, 1]`, minus the
/// expected payment. Reproduces the published two-bidder figure 13/24 at
/// `reserve = 1/2`; it is not the bidder's true expected surplus (see
/// [`agent_surplus_closed_form`]).
pub fn paper_agent_profit(reserve: f64, agents: usize) -> Result<f64> {
    if agents != 2 {
        return Err(Error::UnsupportedCase(format!("agent-profit figure is defined for 2 bidders, got {agents}")));
    }
    check_reserve(reserve)?;
    Ok((reserve + 1.0) / 2.0 - expected_payment_per_bidder(reserve, agents)?)
}

/// True ex-ante surplus of one bidder in the reserve auction:
/// `E[x 1{win}] - payment`, with `E[x 1{win}] = (1 - r^(I+1)) / (I+1)`.
pub fn agent_surplus_closed_form(reserve: f64, agents: usize) -> Result<f64> {
    check_reserve(reserve)?;
    check_agents(agents)?;
    let n = agents as i32;
    let value_when_winning = (1.0 - reserve.powi(n + 1)) / (n + 1) as f64;
    Ok(value_when_winning - expected_payment_per_bidder(reserve, agents)?)
}

/// Highest valuation above the reserve wins and pays the larger of the
/// reserve and the second-highest valuation. Returns `(payment, surplus of
/// bidder 0)` for one draw of valuations.
fn reserve_auction_draw<R: Rng>(rng: &mut R, reserve: f64, agents: usize) -> (f64, f64) {
    let own = rng.gen::<f64>();
    let mut highest_other = 0.0_f64;
    let mut second_other = 0.0_f64;
    for _ in 1..agents {
        let x = rng.gen::<f64>();
        if x > highest_other {
            second_other = highest_other;
            highest_other = x;
        } else if x > second_other {
            second_other = x;
        }
    }
    let (top, runner_up) = if own > highest_other { (own, highest_other) } else { (highest_other, own.max(second_other)) };
    if top < reserve {
        return (0.0, 0.0);
    }
    let price = runner_up.max(reserve);
    let surplus = if own > highest_other { own - price } else { 0.0 };
    (price, surplus)
}

/// Simulated ex-ante surplus of a fixed bidder in the reserve auction.
pub fn agent_profit_oracle_montecarlo(reserve: f64, agents: usize, samples: usize, seed: u64) -> Result<EstimateWithCI> {
    check_reserve(reserve)?;
    check_agents(agents)?;
    mc::require_samples(samples, MIN_ORACLE_SAMPLES)?;
    mc::simulate_mean(seed, samples, |rng| reserve_auction_draw(rng, reserve, agents).1)
}

/// Simulated seller revenue of the reserve auction.
pub fn seller_revenue_montecarlo(reserve: f64, agents: usize, samples: usize, seed: u64) -> Result<EstimateWithCI> {
    check_reserve(reserve)?;
    check_agents(agents)?;
    mc::require_samples(samples, MIN_ORACLE_SAMPLES)?;
    mc::simulate_mean(seed, samples, |rng| reserve_auction_draw(rng, reserve, agents).0)
}

/// Ex-ante expected profit of each bidder when the designer adjusts types at
/// the optimal cost: the winner keeps `theta_c / I`, and each bidder wins
/// with probability `1/I`.
pub fn agent_ex_ante_profit(rule: &AdjustmentRule, agents: usize) -> Result<f64> {
    let opt = optimize_cost(rule, agents, Method::ClosedForm)?;
    let scale = rule.scale(opt.c_star)?;
    let n = agents as f64;
    let mean_top = crate::model::max_order_statistic_mean(agents, &InitialDistribution::unit_uniform())?;
    Ok(scale * mean_top / n / n)
}

/// Two-bidder, square-root-rule agent profit `1/6 + beta^2/36`.
pub fn adjusted_agent_profit(rule: &AdjustmentRule, agents: usize) -> Result<f64> {
    if agents != 2 || rule.gamma() != 0.5 {
        return Err(Error::UnsupportedCase(format!(
            "closed form needs 2 bidders and gamma = 0.5, got {agents} and {}",
            rule.gamma()
        )));
    }
    agent_ex_ante_profit(rule, agents)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub reserve: f64,
    pub payment_per_bidder: f64,
    pub seller_revenue: f64,
    pub paper_agent_profit: f64,
    pub oracle_agent_profit: EstimateWithCI,
}

/// Closed-form benchmark numbers plus the simulated agent surplus.
pub fn baseline_report(reserve: f64, agents: usize, samples: usize, seed: u64) -> Result<BaselineReport> {
    let payment_per_bidder = expected_payment_per_bidder(reserve, agents)?;
    Ok(BaselineReport {
        reserve,
        payment_per_bidder,
        seller_revenue: agents as f64 * payment_per_bidder,
        paper_agent_profit: paper_agent_profit(reserve, agents)?,
        oracle_agent_profit: agent_profit_oracle_montecarlo(reserve, agents, samples, seed)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserves() {
        assert_eq!(optimal_reserve(&InitialDistribution::unit_uniform()).unwrap(), 0.5);
        assert_eq!(optimal_reserve(&InitialDistribution::uniform(0.0, 2.0).unwrap()).unwrap(), 1.0);
        assert_eq!(optimal_reserve(&InitialDistribution::uniform(0.8, 1.0).unwrap()).unwrap(), 0.8);
    }

    #[test]
    fn payments() {
        assert!((expected_payment_per_bidder(0.5, 2).unwrap() - 5.0 / 24.0).abs() < 1e-15);
        assert!((expected_payment_per_bidder(0.0, 2).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(expected_payment_per_bidder(1.0, 2).unwrap(), 0.0);
        assert_eq!(expected_payment_per_bidder(1.5, 2), Err(Error::InvalidReserve(1.5)));
    }

    #[test]
    fn revenues() {
        assert!((seller_revenue(0.5, 2).unwrap() - 5.0 / 12.0).abs() < 1e-15);
        assert!((seller_revenue(0.0, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(seller_revenue(1.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn agent_profit_figures() {
        assert!((paper_agent_profit(0.5, 2).unwrap() - 13.0 / 24.0).abs() < 1e-15);
        assert!(paper_agent_profit(0.5, 3).is_err());
        assert!((agent_surplus_closed_form(0.5, 2).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((agent_surplus_closed_form(0.0, 2).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn adjusted_profit_examples() {
        let at = |beta: f64| adjusted_agent_profit(&AdjustmentRule::square_root(beta).unwrap(), 2).unwrap();
        assert!((at(2.0) - 5.0 / 18.0).abs() < 1e-15);
        assert!((at(0.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((at(13.5f64.sqrt()) - 13.0 / 24.0).abs() < 1e-14);
        assert!(adjusted_agent_profit(&AdjustmentRule::new(2.0, 1.0).unwrap(), 2).is_err());
    }

    #[test]
    fn oracle_at_full_reserve_is_zero() {
        let e = agent_profit_oracle_montecarlo(1.0, 2, MIN_ORACLE_SAMPLES, 5).unwrap();
        assert_eq!(e.mean, 0.0);
        assert!(agent_profit_oracle_montecarlo(0.5, 2, 10, 5).is_err());
    }
}
