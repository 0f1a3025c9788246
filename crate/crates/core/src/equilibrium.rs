//! First-price equilibrium under adjusted types.
//!
//! Bidders see the adjustment cost, so an agent with initial type `theta0`
//! values the good at `s * theta0` with `s = 1 + beta * c^gamma`. Against an
//! opponent bidding `alpha * s * theta0'` with `theta0'` uniform on `[0, 1]`,
//! a bid `b <= alpha * s` wins with probability `b / (alpha * s)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{self, EstimateWithCI, MeanAccumulator, RngStream};
use crate::model::{check_agents, AdjustmentRule, Outcome};

/// Minimum sample count for the Monte Carlo deviation check.
pub const MIN_DEVIATION_SAMPLES: usize = 10_000;

/// Minimum number of points in the best-response grid oracle.
pub const MIN_ORACLE_POINTS: usize = 100;

const EXACT_TOL: f64 = 1e-12;

/// Bid `alpha * theta_c` as a function of the adjusted type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearStrategy {
    alpha: f64,
}

impl LinearStrategy {
    pub const HALF: LinearStrategy = LinearStrategy { alpha: 0.5 };

    pub fn new(alpha: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(Self { alpha })
        } else {
            Err(Error::InvalidStrategy(format!("slope {alpha} outside [0, 1]")))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn bid(&self, adjusted_type: f64) -> f64 {
        self.alpha * adjusted_type
    }
}

/// Symmetric equilibrium bid fraction `(I - 1) / I` of the adjusted type.
pub fn symmetric_bid_fraction(agents: usize) -> Result<f64> {
    check_agents(agents)?;
    Ok((agents as f64 - 1.0) / agents as f64)
}

fn check_initial_type(theta0: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta0) {
        Ok(())
    } else {
        Err(Error::InvalidType(theta0))
    }
}

fn check_opponent_alpha(alpha: f64) -> Result<()> {
    if alpha == 0.0 {
        return Err(Error::DegenerateOpponent(alpha));
    }
    LinearStrategy::new(alpha).map(|_| ())
}

/// Best response of a type-`theta0` bidder against two-agent linear play.
///
/// Interior optimum `theta_c / 2` unless it would exceed the opponent's
/// highest bid `alpha * s`, in which case the bid is capped there.
pub fn best_response_closed_form(theta0: f64, rule: &AdjustmentRule, cost: f64, opponent_alpha: f64) -> Result<f64> {
    best_response_linear(theta0, rule, cost, opponent_alpha, 2)
}

/// Best response against `agents - 1` opponents who all bid
/// `opponent_alpha * theta_c`. Maximizes `(v - b) * (b / (alpha * s))^(I-1)`.
pub fn best_response_linear(
    theta0: f64,
    rule: &AdjustmentRule,
    cost: f64,
    opponent_alpha: f64,
    agents: usize,
) -> Result<f64> {
    check_initial_type(theta0)?;
    check_opponent_alpha(opponent_alpha)?;
    let fraction = symmetric_bid_fraction(agents)?;
    let scale = rule.scale(cost)?;
    if fraction * theta0 <= opponent_alpha {
        Ok(fraction * scale * theta0)
    } else {
        Ok(opponent_alpha * scale)
    }
}

/// Exhaustive grid search over bids in `[0, alpha * s]`; independent check on
/// [`best_response_closed_form`].
pub fn best_response_grid_oracle(
    theta0: f64,
    rule: &AdjustmentRule,
    cost: f64,
    opponent_alpha: f64,
    grid_points: usize,
) -> Result<f64> {
    check_initial_type(theta0)?;
    check_opponent_alpha(opponent_alpha)?;
    if grid_points < MIN_ORACLE_POINTS {
        return Err(Error::InvalidGrid(format!(
            "{grid_points} points, at least {MIN_ORACLE_POINTS} required"
        )));
    }
    let scale = rule.scale(cost)?;
    let value = scale * theta0;
    let top = opponent_alpha * scale;
    let step = top / (grid_points - 1) as f64;

    let mut best_bid = 0.0;
    let mut best_payoff = f64::NEG_INFINITY;
    for k in 0..grid_points {
        let bid = step * k as f64;
        let payoff = (value - bid) * (bid / top).min(1.0);
        if payoff > best_payoff {
            best_payoff = payoff;
            best_bid = bid;
        }
    }
    Ok(best_bid)
}

/// True iff bidding `theta_c / 2` is the best response at every probe type
/// when the opponent bids `opponent_alpha * theta_c`.
pub fn half_bid_is_best_response(rule: &AdjustmentRule, cost: f64, opponent_alpha: f64, probes: &[f64]) -> bool {
    let Ok(scale) = rule.scale(cost) else {
        return false;
    };
    probes.iter().all(|&theta0| {
        match best_response_closed_form(theta0, rule, cost, opponent_alpha) {
            Ok(bid) => {
                let target = LinearStrategy::HALF.bid(scale * theta0);
                (bid - target).abs() <= EXACT_TOL * scale.max(1.0)
            }
            Err(_) => false,
        }
    })
}

/// Checks that `b(theta_c) = theta_c / 2` for both agents is a fixed point of
/// the best-response map at every probe type.
pub fn verify_linear_fixed_point(rule: &AdjustmentRule, cost: f64, probes: &[f64]) -> bool {
    half_bid_is_best_response(rule, cost, LinearStrategy::HALF.alpha(), probes)
}

/// First-price sealed-bid outcome: highest bid wins (ties to the lowest
/// index) and pays its bid.
pub fn first_price_outcome(bids: &[f64]) -> Result<Outcome> {
    if bids.is_empty() {
        return Err(Error::EmptyProfile);
    }
    check_agents(bids.len())?;
    let mut winner = 0;
    for (i, &b) in bids.iter().enumerate().skip(1) {
        if b > bids[winner] {
            winner = i;
        }
    }
    let mut allocation = vec![false; bids.len()];
    allocation[winner] = true;
    let mut transfers = vec![0.0; bids.len()];
    transfers[winner] = -bids[winner];
    Ok(Outcome { allocation, designer_keeps: false, transfers, designer_receipt: bids[winner] })
}

/// Bid schedule over initial types, linear between breakpoints.
///
/// Bids are money amounts (already in adjusted units); the breakpoints cover
/// the initial-type support `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseStrategy {
    grid: Vec<f64>,
    bids: Vec<f64>,
}

impl PiecewiseStrategy {
    pub fn new(grid: Vec<f64>, bids: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != bids.len() {
            return Err(Error::InvalidStrategy(format!(
                "need matching grid and bids with at least 2 points, got {} and {}",
                grid.len(),
                bids.len()
            )));
        }
        if grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidStrategy("breakpoints must ascend strictly from 0 to 1".into()));
        }
        if bids.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(Error::InvalidStrategy("bids must be finite and non-negative".into()));
        }
        if bids.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidStrategy("bids must be non-decreasing".into()));
        }
        Ok(Self { grid, bids })
    }

    /// `bid = slope * theta0` on `breakpoints` evenly spaced types.
    pub fn linear(slope: f64, breakpoints: usize) -> Result<Self> {
        let grid = even_grid(breakpoints.max(2));
        let bids = grid.iter().map(|t| slope * t).collect();
        Self::new(grid, bids)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn bids(&self) -> &[f64] {
        &self.bids
    }

    pub fn bid_at(&self, theta0: f64) -> f64 {
        let t = theta0.clamp(0.0, 1.0);
        let k = self.grid.partition_point(|&g| g <= t).clamp(1, self.grid.len() - 1);
        let (g0, g1) = (self.grid[k - 1], self.grid[k]);
        let (b0, b1) = (self.bids[k - 1], self.bids[k]);
        b0 + (b1 - b0) * (t - g0) / (g1 - g0)
    }

    /// Probability that an opponent with a uniform[0,1] initial type playing
    /// this schedule bids at most `bid`.
    pub fn win_probability(&self, bid: f64) -> f64 {
        let last = self.bids.len() - 1;
        if bid < self.bids[0] {
            return 0.0;
        }
        if bid >= self.bids[last] {
            return 1.0;
        }
        // largest k with bids[k] <= bid; k < last here
        let k = self.bids.partition_point(|&b| b <= bid) - 1;
        let (b0, b1) = (self.bids[k], self.bids[k + 1]);
        let (g0, g1) = (self.grid[k], self.grid[k + 1]);
        g0 + (g1 - g0) * (bid - b0) / (b1 - b0)
    }

    /// Largest absolute bid difference at shared breakpoints.
    pub fn max_bid_gap(&self, target: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .iter()
            .zip(&self.bids)
            .map(|(&t, &b)| (b - target(t)).abs())
            .fold(0.0, f64::max)
    }
}

fn even_grid(points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points).map(|k| k as f64 / last).collect()
}

/// Grid best response to `opponent` at each of its breakpoints.
///
/// Candidate bids are `grid_points` evenly spaced values in `[0, theta_c]`;
/// win probability follows the opponent's schedule exactly, with ties counted
/// as wins. The result is made non-decreasing by a running maximum.
fn grid_best_response(opponent: &PiecewiseStrategy, scale: f64, grid_points: usize) -> PiecewiseStrategy {
    let step_count = (grid_points - 1) as f64;
    let mut running = 0.0_f64;
    let bids = opponent
        .grid
        .iter()
        .map(|&theta0| {
            let value = scale * theta0;
            let mut best_bid = 0.0;
            let mut best_payoff = f64::NEG_INFINITY;
            for k in 0..grid_points {
                let bid = value * k as f64 / step_count;
                let payoff = (value - bid) * opponent.win_probability(bid);
                if payoff > best_payoff {
                    best_payoff = payoff;
                    best_bid = bid;
                }
            }
            running = running.max(best_bid);
            running
        })
        .collect();
    PiecewiseStrategy { grid: opponent.grid.clone(), bids }
}

/// Alternating best-response iteration between two agents who both start
/// from `initial`. Each round updates agent 1 against agent 2, then agent 2
/// against the new agent 1; agent 2's final schedule is returned.
pub fn iterated_best_response(
    rule: &AdjustmentRule,
    cost: f64,
    initial: &PiecewiseStrategy,
    rounds: usize,
    grid_points: usize,
) -> Result<PiecewiseStrategy> {
    let (_, second) = iterate_best_response_pair(rule, cost, initial, rounds, grid_points)?;
    Ok(second)
}

pub(crate) fn iterate_best_response_pair(
    rule: &AdjustmentRule,
    cost: f64,
    initial: &PiecewiseStrategy,
    rounds: usize,
    grid_points: usize,
) -> Result<(PiecewiseStrategy, PiecewiseStrategy)> {
    // deserialized strategies bypass `new`
    let initial = PiecewiseStrategy::new(initial.grid.clone(), initial.bids.clone())?;
    if rounds == 0 {
        return Err(Error::InvalidStrategy("at least one round is required".into()));
    }
    if grid_points < 2 {
        return Err(Error::InvalidGrid(format!("{grid_points} bid points, at least 2 required")));
    }
    let scale = rule.scale(cost)?;
    let mut first = initial.clone();
    let mut second = initial;
    for _ in 0..rounds {
        first = grid_best_response(&second, scale, grid_points);
        second = grid_best_response(&first, scale, grid_points);
    }
    Ok((first, second))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub equilibrium_bid: f64,
    pub equilibrium_utility: EstimateWithCI,
    pub best_deviation_bid: f64,
    pub best_deviation_utility: EstimateWithCI,
    pub passes: bool,
}

/// Monte Carlo check that no deviation beats the `theta_c / 2` bid for an
/// agent of initial type `theta0` when the opponent plays `theta_c / 2`.
pub fn verify_bne_montecarlo(
    rule: &AdjustmentRule,
    cost: f64,
    theta0: f64,
    deviation_grid: usize,
    samples: usize,
    seed: u64,
) -> Result<DeviationReport> {
    let scale = rule.scale(cost)?;
    let bid = LinearStrategy::HALF.bid(scale * theta0);
    verify_bid_montecarlo(rule, cost, theta0, bid, deviation_grid, samples, seed)
}

/// Same check as [`verify_bne_montecarlo`] for an arbitrary candidate bid.
///
/// All bids are scored on the same opponent draws. Deviations are evenly
/// spaced on `[0, s/2]`, the opponent's bid range.
pub fn verify_bid_montecarlo(
    rule: &AdjustmentRule,
    cost: f64,
    theta0: f64,
    candidate_bid: f64,
    deviation_grid: usize,
    samples: usize,
    seed: u64,
) -> Result<DeviationReport> {
    check_initial_type(theta0)?;
    mc::require_samples(samples, MIN_DEVIATION_SAMPLES)?;
    if deviation_grid < 2 {
        return Err(Error::InvalidGrid(format!("{deviation_grid} deviation bids, at least 2 required")));
    }
    let scale = rule.scale(cost)?;
    let value = scale * theta0;
    let top = LinearStrategy::HALF.bid(scale);
    let mut bids = Vec::with_capacity(deviation_grid + 1);
    bids.push(candidate_bid);
    bids.extend((0..deviation_grid).map(|k| top * k as f64 / (deviation_grid - 1) as f64));

    let totals = mc::simulate_blocks(seed, samples, |rng, len| {
        let mut accs = vec![MeanAccumulator::new(); bids.len()];
        for _ in 0..len {
            let opponent_bid = LinearStrategy::HALF.bid(scale * rng.gen::<f64>());
            for (acc, &b) in accs.iter_mut().zip(&bids) {
                acc.push(if opponent_bid <= b { value - b } else { 0.0 });
            }
        }
        accs
    });

    let meta = RngStream::new(seed, 0);
    let equilibrium_utility = totals[0].finish(meta)?;
    let (best_index, best_acc) = totals[1..]
        .iter()
        .enumerate()
        .fold((0, &totals[1]), |best, (i, acc)| if acc.mean() > best.1.mean() { (i, acc) } else { best });
    let best_deviation_utility = best_acc.finish(meta)?;
    let combined_se = (equilibrium_utility.std_error.powi(2) + best_deviation_utility.std_error.powi(2)).sqrt();
    Ok(DeviationReport {
        equilibrium_bid: candidate_bid,
        equilibrium_utility,
        best_deviation_bid: bids[best_index + 1],
        best_deviation_utility,
        passes: best_deviation_utility.mean <= equilibrium_utility.mean + 3.0 * combined_se,
    })
}
