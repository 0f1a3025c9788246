use adjmech::equilibrium::{
    best_response_closed_form, best_response_grid_oracle, first_price_outcome, iterated_best_response,
    verify_bid_montecarlo, verify_bne_montecarlo, verify_linear_fixed_point, PiecewiseStrategy,
};
use adjmech::model::{agent_utility, AdjustmentRule};
use proptest::prelude::*;

fn rule(beta: f64) -> AdjustmentRule {
    AdjustmentRule::square_root(beta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn grid_oracle_matches_closed_form(
        theta0 in 0.0..=1.0f64,
        beta in 0.0..5.0f64,
        c in 0.0..1.0f64,
        alpha in 0.05..=1.0f64,
    ) {
        let r = rule(beta);
        let points = 10_001;
        let step = alpha * r.scale(c).unwrap() / (points - 1) as f64;
        let exact = best_response_closed_form(theta0, &r, c, alpha).unwrap();
        let grid = best_response_grid_oracle(theta0, &r, c, alpha, points).unwrap();
        prop_assert!((exact - grid).abs() <= step * (1.0 + 1e-9), "exact {} grid {} step {}", exact, grid, step);
    }

    #[test]
    fn half_bids_are_a_fixed_point(beta in 0.0..=5.0f64, c in 0.0..=1.0f64, probes in prop::collection::vec(0.0..=1.0f64, 1..12)) {
        prop_assert!(verify_linear_fixed_point(&rule(beta), c, &probes));
    }

    #[test]
    fn agent_labels_do_not_matter(v1 in 0.0..2.0f64, v2 in 0.0..2.0f64, b1 in 0.0..1.0f64, b2 in 0.0..1.0f64) {
        prop_assume!(b1 != b2);
        let forward = first_price_outcome(&[b1, b2]).unwrap();
        let swapped = first_price_outcome(&[b2, b1]).unwrap();
        prop_assert_eq!(agent_utility(&forward, 0, v1).unwrap(), agent_utility(&swapped, 1, v1).unwrap());
        prop_assert_eq!(agent_utility(&forward, 1, v2).unwrap(), agent_utility(&swapped, 0, v2).unwrap());
    }
}

#[test]
fn fixed_point_on_parameter_grid() {
    let probes = [0.0, 0.25, 0.5, 0.75, 1.0];
    for beta in [0.0, 0.5, 1.0, 2.0, 4.0] {
        for c in [0.0, 0.01, 0.1, 1.0 / 9.0, 1.0] {
            assert!(verify_linear_fixed_point(&rule(beta), c, &probes), "beta={beta} c={c}");
        }
    }
}

#[test]
fn deviation_check_passes_at_equilibrium() {
    let r = verify_bne_montecarlo(&rule(2.0), 1.0 / 9.0, 0.7, 201, 100_000, 17).unwrap();
    assert!(r.passes, "{r:?}");
    assert!((r.equilibrium_bid - 0.7 * 5.0 / 3.0 / 2.0).abs() < 1e-12);
}

#[test]
fn interim_utility_matches_analytic_value() {
    for (theta0, seed) in [(0.2, 1), (0.7, 2), (1.0, 3)] {
        let r = verify_bne_montecarlo(&rule(2.0), 1.0 / 9.0, theta0, 11, 200_000, seed).unwrap();
        let adjusted = 5.0 / 3.0 * theta0;
        let analytic = adjusted / 2.0 * theta0;
        assert!(r.equilibrium_utility.within_sigmas(analytic, 4.0), "theta0={theta0}: {:?}", r.equilibrium_utility);
    }
}

#[test]
fn overbidding_fails_deviation_check() {
    let adjusted = 5.0 / 3.0 * 0.7;
    let r = verify_bid_montecarlo(&rule(2.0), 1.0 / 9.0, 0.7, 0.9 * adjusted, 201, 100_000, 17).unwrap();
    assert!(!r.passes, "{r:?}");
}

#[test]
fn deviation_report_is_reproducible() {
    let a = verify_bne_montecarlo(&rule(1.0), 0.3, 0.4, 21, 50_000, 99).unwrap();
    let b = verify_bne_montecarlo(&rule(1.0), 0.3, 0.4, 21, 50_000, 99).unwrap();
    assert_eq!(a, b);
}

const BREAKPOINTS: usize = 21;
const BID_POINTS: usize = 2001;

fn gap_in_steps(result: &PiecewiseStrategy, scale: f64) -> f64 {
    let step = scale / (BID_POINTS - 1) as f64;
    result.max_bid_gap(|t| scale * t / 2.0) / step
}

#[test]
fn truthful_start_converges_to_half_bids() {
    let r = rule(0.0);
    let start = PiecewiseStrategy::linear(1.0, BREAKPOINTS).unwrap();
    let end = iterated_best_response(&r, 0.0, &start, 20, BID_POINTS).unwrap();
    assert!(gap_in_steps(&end, 1.0) <= 2.0);
}

#[test]
fn equilibrium_schedule_is_kept_by_one_round() {
    for (beta, c) in [(2.0, 1.0 / 9.0), (1.0, 0.5), (0.0, 0.0)] {
        let r = rule(beta);
        let s = r.scale(c).unwrap();
        let start = PiecewiseStrategy::linear(s / 2.0, BREAKPOINTS).unwrap();
        let end = iterated_best_response(&r, c, &start, 1, BID_POINTS).unwrap();
        assert!(gap_in_steps(&end, s) <= 1.0, "beta={beta} c={c}");
    }
}

#[test]
fn linear_starts_at_or_above_half_converge() {
    let params = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0 / 9.0), (1.0, 0.25), (4.0, 0.5)];
    for (beta, c) in params {
        let r = rule(beta);
        let s = r.scale(c).unwrap();
        for slope in [0.5, 0.6, 0.75, 0.9, 1.0] {
            let start = PiecewiseStrategy::linear(slope * s, BREAKPOINTS).unwrap();
            let end = iterated_best_response(&r, c, &start, 20, BID_POINTS).unwrap();
            assert!(gap_in_steps(&end, s) <= 2.0, "beta={beta} c={c} slope={slope}");
        }
    }
}

/// Exact best-response dynamics cannot lift a schedule whose top bid sits
/// below s/2: high types never bid above the opponent's maximum and ties at
/// a pooled top bid count as wins, so the iteration stalls at a capped
/// profile.
#[test]
fn low_start_stalls_below_equilibrium() {
    let r = rule(2.0);
    let start = PiecewiseStrategy::linear(0.1, BREAKPOINTS).unwrap();
    let end = iterated_best_response(&r, 0.0, &start, 20, BID_POINTS).unwrap();
    let top = *end.bids().last().unwrap();
    assert!(top < 0.25, "top bid {top}");
    let again = iterated_best_response(&r, 0.0, &end, 1, BID_POINTS).unwrap();
    assert!((again.bids().last().unwrap() - top).abs() < 0.01);
}

#[test]
#[ignore = "best-response dynamics stall from a 0.1*theta start; see low_start_stalls_below_equilibrium"]
fn low_start_converges_to_half_bids() {
    let r = rule(2.0);
    let start = PiecewiseStrategy::linear(0.1, BREAKPOINTS).unwrap();
    let end = iterated_best_response(&r, 0.0, &start, 20, BID_POINTS).unwrap();
    assert!(gap_in_steps(&end, 1.0) <= 2.0);
}
