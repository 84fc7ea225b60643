//! Estimators run end to end at reduced replica counts.

use greedy_server::chain::Mode;
use greedy_server::experiments::{
    estimate_turning, lil_scaling, martingale_audit, nt_scaling, poisson_differences, recurrence_stats,
    reference_correlated_walk, tau_growth_series, ChainSetup, ReferenceWalk,
};
use greedy_server::hitting_time::normal_cdf;
use greedy_server::rng::{stream, Purpose};
use greedy_server::stats::{ks_p_value, ks_statistic, sorted};
use greedy_server::Error;

#[test]
fn turning_frequency_is_flat_in_n() {
    let setup = ChainSetup::default();
    let a = estimate_turning(10, 20_000, Mode::Asymptotic, 31, &setup).unwrap();
    let b = estimate_turning(30, 20_000, Mode::Asymptotic, 32, &setup).unwrap();
    let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.point - b.point).abs() <= 3.0 * se, "{} vs {}", a.point, b.point);
}

#[test]
fn early_exact_turning_is_a_bernoulli_frequency() {
    // a single replica past the exact horizon fails the whole estimate
    let e = match estimate_turning(2, 500, Mode::Exact, 33, &ChainSetup::default()) {
        Ok(e) => e,
        Err(Error::HorizonExceeded { step, .. }) => return assert!(step <= 2),
        Err(e) => panic!("{e}"),
    };
    assert!((0.0..=1.0).contains(&e.point));
    let bernoulli = (e.point * (1.0 - e.point) / e.n_replicas as f64).sqrt();
    assert!((e.stderr - bernoulli).abs() < 0.05 * bernoulli + 1e-12);
}

#[test]
fn nt_ratio_approaches_its_limit() {
    let s = nt_scaling(40, 1000, 34, &ChainSetup::default()).unwrap();
    let target = 1.0 / std::f64::consts::LN_2;
    let dev = |n: f64| (s.at(n).unwrap().value - target).abs();
    assert!(dev(40.0) < dev(10.0), "{} vs {}", dev(40.0), dev(10.0));
}

#[test]
fn gamma_spread_is_stable_late() {
    let g = tau_growth_series(50, 1000, 35, &ChainSetup::default()).unwrap();
    let (a, b) = (g.gamma_iqr[39], g.gamma_iqr[49]);
    assert!((a - b).abs() <= 0.1 * b, "IQR {a} vs {b}");
    assert!(g.gamma_hat.iter().all(|v| v.is_finite() && *v >= 0.0));
}

#[test]
fn martingale_bound_holds_everywhere() {
    let audit = martingale_audit(40, 2000, Mode::Asymptotic, 36, &ChainSetup::default()).unwrap();
    for row in &audit.rows {
        assert!(row.max_abs_increment <= 3);
        assert!(row.second_moment >= row.mean_increment.powi(2));
        let identity = 1.0 + 8.0 * row.turn_frequency;
        assert!((row.second_moment - identity).abs() <= 3.0 * row.second_stderr + 1e-9);
    }
}

#[test]
fn uncorrelated_reference_walk_is_diffusive() {
    let n = 10_000u64;
    let finals: Vec<f64> = (0..2000u64)
        .map(|i| {
            let mut walk = ReferenceWalk::new(0.5).unwrap();
            let mut rng = stream(37, i, Purpose::Reference);
            for _ in 0..n {
                walk.step(&mut rng);
            }
            walk.x as f64 / (n as f64).sqrt()
        })
        .collect();
    let d = ks_statistic(&sorted(&finals), normal_cdf);
    // the lattice makes X_n/√n discrete; KS against Φ is still far from the
    // rejection region at this sample size
    assert!(ks_p_value(d, finals.len()) > 0.001, "KS {d}");
}

#[test]
fn reference_trajectories_use_the_reference_mode() {
    let trajs = reference_correlated_walk(50, 3, 0.25, 38).unwrap();
    assert_eq!(trajs.len(), 3);
    for t in trajs {
        assert_eq!(t.meta.mode, Mode::Reference);
        assert_eq!(t.meta.turn_prob, Some(0.25));
        assert_eq!(t.records.len(), 50);
    }
    assert!(reference_correlated_walk(10, 1, 1.0, 38).is_err());
}

#[test]
fn running_max_grows_with_horizon() {
    let setup = ChainSetup::default();
    let short = lil_scaling(1000, 50, 39, &setup).unwrap();
    let long = lil_scaling(5000, 50, 39, &setup).unwrap();
    for (a, b) in short.running_max.iter().zip(&long.running_max) {
        assert!(b >= a);
    }
}

#[test]
fn recurrence_counts_are_sane() {
    let r = recurrence_stats(1000, 200, 40, &ChainSetup::default()).unwrap();
    assert!(r.returns.point > 0.0);
    assert!((0.0..=1.0).contains(&r.sign_change.point));
    let none = recurrence_stats(1, 10, 40, &ChainSetup::default()).unwrap();
    assert_eq!(none.returns.point, 0.0);
}

#[test]
fn poisson_difference_is_symmetric() {
    let d = poisson_differences(100.0, 200_000, 41).unwrap();
    let n = d.len() as f64;
    let below = d.iter().filter(|&&v| v < 0).count() as f64;
    let zero = d.iter().filter(|&&v| v == 0).count() as f64;
    // mid-distribution value at the atom
    let mid = (below + 0.5 * zero) / n;
    let se = (0.25 / n).sqrt();
    assert!((mid - 0.5).abs() <= 3.0 * se, "{mid}");
}
