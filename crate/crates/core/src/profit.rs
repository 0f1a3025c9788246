//! Designer expected utility and profit as functions of the adjustment cost.
//!
//! With `I` bidders playing the symmetric first-price equilibrium the designer
//! collects `(I-1)/I` of the highest adjusted valuation, so
//! `u(c) = (1 + beta * c^gamma) * R0` with `R0 = (I-1)/(I+1)`, and the profit
//! is `u(c) - c`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{symmetric_bid_fraction, verify_linear_fixed_point};
use crate::error::{Error, Result};
use crate::mc::{self, EstimateWithCI};
use crate::model::{check_agents, check_cost, AdjustmentRule};
use crate::optimize::{brent_root, golden_section_max};

pub const MIN_UTILITY_SAMPLES: usize = 10_000;

/// Absolute tolerance on the optimal cost for the iterative methods.
pub const COST_TOLERANCE: f64 = 1e-9;

pub const MAX_ITERATIONS: usize = 10_000;

/// Lower end of the derivative-root bracket; the derivative blows up at 0.
pub const ROOT_BRACKET_FLOOR: f64 = 1e-12;

/// Probe types for the equilibrium half of the implementability check.
const FIXED_POINT_PROBES: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Expected designer revenue without adjustment, uniform[0,1] types.
pub fn base_revenue(agents: usize) -> Result<f64> {
    check_agents(agents)?;
    let n = agents as f64;
    Ok((n - 1.0) / (n + 1.0))
}

pub fn expected_utility_closed_form(rule: &AdjustmentRule, cost: f64, agents: usize) -> Result<f64> {
    Ok(rule.scale(cost)? * base_revenue(agents)?)
}

/// Simulated designer receipts: draw a profile, adjust it, and collect the
/// winner's equilibrium bid.
pub fn expected_utility_montecarlo(
    rule: &AdjustmentRule,
    cost: f64,
    agents: usize,
    samples: usize,
    seed: u64,
) -> Result<EstimateWithCI> {
    mc::require_samples(samples, MIN_UTILITY_SAMPLES)?;
    let fraction = symmetric_bid_fraction(agents)?;
    let scale = rule.scale(cost)?;
    mc::simulate_mean(seed, samples, |rng| {
        let highest = (0..agents).map(|_| rng.gen::<f64>()).fold(0.0, f64::max);
        fraction * scale * highest
    })
}

pub fn expected_profit(rule: &AdjustmentRule, cost: f64, agents: usize) -> Result<f64> {
    Ok(expected_utility_closed_form(rule, cost, agents)? - cost)
}

/// `d/dc [u(c) - c] = R0 * beta * gamma * c^(gamma-1) - 1`.
pub fn profit_derivative(rule: &AdjustmentRule, cost: f64, agents: usize) -> Result<f64> {
    check_cost(cost)?;
    let r0 = base_revenue(agents)?;
    let (beta, gamma) = (rule.beta(), rule.gamma());
    if gamma == 1.0 {
        return Ok(r0 * beta - 1.0);
    }
    if cost == 0.0 {
        return if beta == 0.0 { Ok(-1.0) } else { Err(Error::SingularDerivative) };
    }
    Ok(r0 * beta * gamma * cost.powf(gamma - 1.0) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfitCurvePoint {
    pub c: f64,
    pub expected_utility: f64,
    pub expected_profit: f64,
    /// `+inf` at `c = 0` when `gamma < 1`.
    pub derivative: f64,
}

pub fn profit_curve_point(rule: &AdjustmentRule, cost: f64, agents: usize) -> Result<ProfitCurvePoint> {
    let expected_utility = expected_utility_closed_form(rule, cost, agents)?;
    let derivative = match profit_derivative(rule, cost, agents) {
        Err(Error::SingularDerivative) => f64::INFINITY,
        other => other?,
    };
    Ok(ProfitCurvePoint { c: cost, expected_utility, expected_profit: expected_utility - cost, derivative })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    GoldenSection,
    DerivativeRoot,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::GoldenSection => "golden-section",
            Method::DerivativeRoot => "derivative-root",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "closed-form" | "closed_form" => Ok(Method::ClosedForm),
            "golden-section" | "golden_section" => Ok(Method::GoldenSection),
            "derivative-root" | "derivative_root" => Ok(Method::DerivativeRoot),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub c_star: f64,
    pub profit_at_star: f64,
    pub profit_at_zero: f64,
    pub method: Method,
    pub profitable: bool,
    pub iterations: usize,
}

/// Stationary point `(R0 * beta * gamma)^(1 / (1 - gamma))` for `gamma < 1`.
fn closed_form_cost(rule: &AdjustmentRule, r0: f64) -> f64 {
    (r0 * rule.beta() * rule.gamma()).powf(1.0 / (1.0 - rule.gamma()))
}

/// Profit-maximizing adjustment cost.
///
/// For `gamma = 1` the profit is affine in `c`: a slope `R0 * beta` below one
/// keeps the optimum at `c = 0`, equal to one leaves the designer indifferent
/// (reported as `c = 0`), and above one the profit is unbounded.
pub fn optimize_cost(rule: &AdjustmentRule, agents: usize, method: Method) -> Result<OptimizationResult> {
    let r0 = base_revenue(agents)?;
    let profit = |c: f64| rule.scale(c).map(|s| s * r0 - c).unwrap_or(f64::NEG_INFINITY);
    let profit_at_zero = r0;

    let (candidate, iterations) = if rule.gamma() == 1.0 {
        let slope = r0 * rule.beta();
        if slope > 1.0 {
            return Err(Error::UnboundedProfit);
        }
        match method {
            Method::GoldenSection if slope > 0.0 => {
                let s = golden_section_max(profit, 0.0, 4.0 * slope, COST_TOLERANCE, MAX_ITERATIONS)?;
                (s.x, s.iterations)
            }
            // constant-sign derivative: the maximum sits on the c = 0 boundary
            _ => (0.0, 0),
        }
    } else if rule.beta() == 0.0 {
        (0.0, 0)
    } else {
        let exact = closed_form_cost(rule, r0);
        let upper = 2.0 * exact;
        match method {
            Method::ClosedForm => (exact, 0),
            Method::GoldenSection => {
                let s = golden_section_max(profit, 0.0, upper, COST_TOLERANCE, MAX_ITERATIONS)?;
                (s.x, s.iterations)
            }
            Method::DerivativeRoot => {
                let derivative = |c: f64| r0 * rule.beta() * rule.gamma() * c.powf(rule.gamma() - 1.0) - 1.0;
                let s = brent_root(derivative, ROOT_BRACKET_FLOOR, upper, COST_TOLERANCE * 1e-3, MAX_ITERATIONS)?;
                (s.x, s.iterations)
            }
        }
    };

    let candidate_profit = profit(candidate);
    let (c_star, profit_at_star) =
        if candidate_profit > profit_at_zero { (candidate, candidate_profit) } else { (0.0, profit_at_zero) };
    Ok(OptimizationResult {
        c_star,
        profit_at_star,
        profit_at_zero,
        method,
        profitable: c_star > 0.0 && profit_at_star > profit_at_zero,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImplementabilityWitness {
    pub c_star: f64,
    pub profit_at_star: f64,
    pub profit_at_zero: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Implementability {
    pub implementable: bool,
    pub witness: ImplementabilityWitness,
}

/// A positive optimal cost that strictly raises profit, with the half-bid
/// first-price equilibrium still holding at that cost.
///
/// The equilibrium half is the two-bidder fixed-point check; for more bidders
/// the analogous `(I-1)/I` fixed point is checked.
pub fn is_profitable_bayesian_implementable(rule: &AdjustmentRule, agents: usize) -> Result<Implementability> {
    let opt = optimize_cost(rule, agents, Method::ClosedForm)?;
    let equilibrium_holds = if agents == 2 {
        verify_linear_fixed_point(rule, opt.c_star, &FIXED_POINT_PROBES)
    } else {
        symmetric_fixed_point_holds(rule, opt.c_star, agents)?
    };
    Ok(Implementability {
        implementable: opt.c_star > 0.0 && opt.profitable && equilibrium_holds,
        witness: ImplementabilityWitness {
            c_star: opt.c_star,
            profit_at_star: opt.profit_at_star,
            profit_at_zero: opt.profit_at_zero,
        },
    })
}

fn symmetric_fixed_point_holds(rule: &AdjustmentRule, cost: f64, agents: usize) -> Result<bool> {
    let fraction = symmetric_bid_fraction(agents)?;
    let scale = rule.scale(cost)?;
    for &theta0 in &FIXED_POINT_PROBES {
        let bid = crate::equilibrium::best_response_linear(theta0, rule, cost, fraction, agents)?;
        if (bid - fraction * scale * theta0).abs() > 1e-12 * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weak concavity of `u(c)` on an ascending positive grid: successive slopes
/// must not increase by more than `1e-12`.
pub fn concavity_check(rule: &AdjustmentRule, agents: usize, c_grid: &[f64]) -> Result<bool> {
    if c_grid.len() < 3 {
        return Err(Error::InvalidGrid(format!("{} points, at least 3 required", c_grid.len())));
    }
    if c_grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) || c_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid("costs must be positive and strictly ascending".into()));
    }
    let utilities = c_grid
        .iter()
        .map(|&c| expected_utility_closed_form(rule, c, agents))
        .collect::<Result<Vec<_>>>()?;
    let slopes: Vec<f64> = c_grid
        .windows(2)
        .zip(utilities.windows(2))
        .map(|(c, u)| (u[1] - u[0]) / (c[1] - c[0]))
        .collect();
    Ok(slopes.windows(2).all(|s| s[1] - s[0] <= 1e-12))
}

/// Total-variation distance between uniform[0,1] and the adjusted
/// uniform[0,s]: `1 - 1/s`.
pub fn revelation_divergence(rule: &AdjustmentRule, cost: f64) -> Result<f64> {
    Ok(1.0 - 1.0 / rule.scale(cost)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_rule(beta: f64) -> AdjustmentRule {
        AdjustmentRule::square_root(beta).unwrap()
    }

    #[test]
    fn utility_examples() {
        assert!((expected_utility_closed_form(&sqrt_rule(2.0), 0.0, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((expected_utility_closed_form(&sqrt_rule(2.0), 0.25, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((expected_utility_closed_form(&sqrt_rule(0.0), 0.7, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(expected_utility_closed_form(&sqrt_rule(2.0), -1.0, 2), Err(Error::InvalidCost(-1.0)));
    }

    #[test]
    fn profit_examples() {
        assert!((expected_profit(&sqrt_rule(2.0), 1.0 / 9.0, 2).unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert!((expected_profit(&sqrt_rule(2.0), 0.25, 2).unwrap() - 5.0 / 12.0).abs() < 1e-15);
        assert!((expected_profit(&sqrt_rule(0.0), 0.1, 2).unwrap() - (1.0 / 3.0 - 0.1)).abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        assert!(profit_derivative(&sqrt_rule(2.0), 1.0 / 9.0, 2).unwrap().abs() < 1e-14);
        assert!((profit_derivative(&sqrt_rule(2.0), 1.0, 2).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        let linear = AdjustmentRule::new(3.0, 1.0).unwrap();
        assert!(profit_derivative(&linear, 0.4, 2).unwrap().abs() < 1e-15);
        assert_eq!(profit_derivative(&sqrt_rule(2.0), 0.0, 2), Err(Error::SingularDerivative));
    }

    #[test]
    fn curve_point_at_zero_has_infinite_slope() {
        let p = profit_curve_point(&sqrt_rule(2.0), 0.0, 2).unwrap();
        assert_eq!(p.derivative, f64::INFINITY);
        assert_eq!(p.expected_profit, p.expected_utility - p.c);
    }

    #[test]
    fn optimum_at_beta_two() {
        let r = optimize_cost(&sqrt_rule(2.0), 2, Method::ClosedForm).unwrap();
        assert!((r.c_star - 1.0 / 9.0).abs() < 1e-15);
        assert!((r.profit_at_star - 4.0 / 9.0).abs() < 1e-15);
        assert!(r.profitable);
    }

    #[test]
    fn optimum_at_sqrt_three_matches_reserve_benchmark() {
        let r = optimize_cost(&sqrt_rule(3f64.sqrt()), 2, Method::ClosedForm).unwrap();
        assert!((r.c_star - 1.0 / 12.0).abs() < 1e-15);
        assert!((r.profit_at_star - 5.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn linear_rule_branches() {
        let r = optimize_cost(&AdjustmentRule::new(2.0, 1.0).unwrap(), 2, Method::ClosedForm).unwrap();
        assert_eq!(r.c_star, 0.0);
        assert!(!r.profitable);
        for m in [Method::GoldenSection, Method::DerivativeRoot] {
            let r = optimize_cost(&AdjustmentRule::new(2.0, 1.0).unwrap(), 2, m).unwrap();
            assert_eq!(r.c_star, 0.0);
        }
        assert_eq!(
            optimize_cost(&AdjustmentRule::new(4.0, 1.0).unwrap(), 2, Method::ClosedForm),
            Err(Error::UnboundedProfit)
        );
        let tie = optimize_cost(&AdjustmentRule::new(3.0, 1.0).unwrap(), 2, Method::GoldenSection).unwrap();
        assert_eq!(tie.c_star, 0.0);
        assert!(!tie.profitable);
    }

    #[test]
    fn zero_beta_never_spends() {
        for m in [Method::ClosedForm, Method::GoldenSection, Method::DerivativeRoot] {
            let r = optimize_cost(&sqrt_rule(0.0), 2, m).unwrap();
            assert_eq!(r.c_star, 0.0);
            assert!(!r.profitable);
        }
    }

    #[test]
    fn implementability_examples() {
        let v = is_profitable_bayesian_implementable(&sqrt_rule(2.0), 2).unwrap();
        assert!(v.implementable);
        assert!((v.witness.c_star - 1.0 / 9.0).abs() < 1e-15);
        assert!((v.witness.profit_at_star - 4.0 / 9.0).abs() < 1e-15);
        assert!((v.witness.profit_at_zero - 1.0 / 3.0).abs() < 1e-15);
        assert!(!is_profitable_bayesian_implementable(&sqrt_rule(0.0), 2).unwrap().implementable);
        let linear = AdjustmentRule::new(2.0, 1.0).unwrap();
        assert!(!is_profitable_bayesian_implementable(&linear, 2).unwrap().implementable);
        assert!(is_profitable_bayesian_implementable(&sqrt_rule(2.0), 4).unwrap().implementable);
    }

    #[test]
    fn concavity_examples() {
        let grid: Vec<f64> = (1..=100).map(|k| k as f64 / 100.0).collect();
        assert!(concavity_check(&sqrt_rule(2.0), 2, &grid).unwrap());
        assert!(concavity_check(&AdjustmentRule::new(1.0, 1.0).unwrap(), 2, &grid).unwrap());
        assert!(concavity_check(&sqrt_rule(2.0), 2, &[0.04, 0.16, 0.36]).unwrap());
        assert!(concavity_check(&sqrt_rule(2.0), 2, &[0.04, 0.16]).is_err());
        assert!(concavity_check(&sqrt_rule(2.0), 2, &[0.0, 0.16, 0.36]).is_err());
    }

    #[test]
    fn divergence_examples() {
        assert_eq!(revelation_divergence(&sqrt_rule(2.0), 0.0).unwrap(), 0.0);
        assert!((revelation_divergence(&sqrt_rule(2.0), 1.0 / 9.0).unwrap() - 0.4).abs() < 1e-15);
        assert!((revelation_divergence(&sqrt_rule(1.0), 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(revelation_divergence(&sqrt_rule(1.0), -0.5).is_err());
    }

    #[test]
    fn montecarlo_rejects_small_runs() {
        assert_eq!(
            expected_utility_montecarlo(&sqrt_rule(2.0), 0.1, 2, 10, 0),
            Err(Error::InsufficientSamples { got: 10, min: MIN_UTILITY_SAMPLES })
        );
    }
}
