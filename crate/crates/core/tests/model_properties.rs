use adjmech::mc::{sample_uniform, RngStream};
use adjmech::model::{
    adjust_types, adjusted_density, max_order_statistic_mean, scf_outcome, AdjustmentRule, InitialDistribution,
    TypeProfile,
};
use proptest::prelude::*;

/// Composite Simpson rule on [a, b] with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * k as f64);
    }
    sum * h / 3.0
}

fn rule_strategy() -> impl Strategy<Value = AdjustmentRule> {
    (0.0..5.0f64, 0.05..=1.0f64).prop_map(|(b, g)| AdjustmentRule::new(b, g).unwrap())
}

proptest! {
    #[test]
    fn zero_cost_leaves_profile_unchanged(values in prop::collection::vec(0.0..10.0f64, 2..6), rule in rule_strategy()) {
        let p = TypeProfile::initial(values.clone()).unwrap();
        let q = adjust_types(&p, &rule, 0.0).unwrap();
        prop_assert_eq!(q.values(), &values[..]);
    }

    #[test]
    fn adjustment_increases_with_cost(theta in 0.01..1.0f64, c in 0.0..2.0f64, dc in 0.001..1.0f64, beta in 0.01..5.0f64) {
        let rule = AdjustmentRule::square_root(beta).unwrap();
        let p = TypeProfile::initial(vec![theta]).unwrap();
        let lo = adjust_types(&p, &rule, c).unwrap().values()[0];
        let hi = adjust_types(&p, &rule, c + dc).unwrap().values()[0];
        prop_assert!(hi > lo);
    }

    #[test]
    fn adjustment_increases_with_type(theta in 0.0..1.0f64, dt in 0.001..1.0f64, c in 0.0..2.0f64, rule in rule_strategy()) {
        let p = TypeProfile::initial(vec![theta, theta + dt]).unwrap();
        let q = adjust_types(&p, &rule, c).unwrap();
        prop_assert!(q.values()[1] > q.values()[0]);
    }

    #[test]
    fn allocation_is_scale_invariant(values in prop::collection::vec(0.0..1.0f64, 2..6), c in 0.0..3.0f64, rule in rule_strategy()) {
        let p = TypeProfile::initial(values).unwrap();
        let q = adjust_types(&p, &rule, c).unwrap();
        prop_assert_eq!(scf_outcome(&p).unwrap().allocation, scf_outcome(&q).unwrap().allocation);
    }

    #[test]
    fn outcomes_balance_budget(values in prop::collection::vec(0.0..10.0f64, 2..8)) {
        let o = scf_outcome(&TypeProfile::initial(values).unwrap()).unwrap();
        let paid: f64 = o.transfers.iter().sum();
        prop_assert!((o.designer_receipt + paid).abs() < 1e-12);
        prop_assert_eq!(o.allocation.iter().filter(|&&w| w).count(), 1);
        prop_assert!(!o.designer_keeps);
        for (won, t) in o.allocation.iter().zip(&o.transfers) {
            if !won {
                prop_assert_eq!(*t, 0.0);
            }
        }
    }
}

#[test]
fn adjusted_density_integrates_to_one() {
    for (beta, c) in [(2.0, 0.0), (2.0, 1.0 / 9.0), (1.0, 1.0), (4.0, 0.3)] {
        let rule = AdjustmentRule::square_root(beta).unwrap();
        let s = rule.scale(c).unwrap();
        let mass = simpson(|x| adjusted_density(&rule, c, x).unwrap(), 0.0, s, 1000);
        assert!((mass - 1.0).abs() < 1e-9, "beta={beta} c={c} mass={mass}");
    }
}

#[test]
fn max_of_three_matches_cdf_integration() {
    // E[Z] = ∫ (1 - z^3) dz over [0, 1]
    let oracle = simpson(|z| 1.0 - z.powi(3), 0.0, 1.0, 1000);
    assert!((oracle - 0.75).abs() < 1e-12);
    let got = max_order_statistic_mean(3, &InitialDistribution::unit_uniform()).unwrap();
    assert!((got - oracle).abs() < 1e-12);
}

#[test]
fn max_of_two_matches_monte_carlo() {
    let n = 1_000_000;
    let a = sample_uniform(RngStream::new(2024, 0), n, 0.0, 1.0).unwrap();
    let b = sample_uniform(RngStream::new(2024, 1), n, 0.0, 1.0).unwrap();
    let maxes: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
    let est = adjmech::mc::estimate_mean(&maxes, RngStream::new(2024, 0)).unwrap();
    let closed = max_order_statistic_mean(2, &InitialDistribution::unit_uniform()).unwrap();
    assert!(est.within_sigmas(closed, 4.0), "mc {} vs {closed}", est.mean);
}

#[test]
fn shifted_support_order_statistic() {
    let d = InitialDistribution::uniform(1.0, 3.0).unwrap();
    assert!((max_order_statistic_mean(2, &d).unwrap() - (1.0 + 2.0 * 2.0 / 3.0)).abs() < 1e-15);
}
