//! Behaviour of the chain across whole runs.

use std::time::{Duration, Instant};

use greedy_server::chain::{
    continuous_oracle, run, run_with, AsymptoticOptions, ChainRunner, Mode, OracleConfig, RunOptions, SiteState,
};
use greedy_server::Error;

#[test]
fn same_seed_gives_identical_files() {
    let bytes = |seed| {
        let t = run(40, Mode::Asymptotic, 6, seed).unwrap();
        let mut buf = Vec::new();
        t.write_jsonl(&mut buf).unwrap();
        buf
    };
    assert_eq!(bytes(5), bytes(5));
    assert_ne!(bytes(5), bytes(6));
}

#[test]
fn exact_runs_terminate_quickly() {
    // the horizon stops most runs early; what matters is that every run
    // ends, either complete or with a horizon error, within the budget
    let mut fast = 0;
    for seed in 0..20 {
        let start = Instant::now();
        match run(10, Mode::Exact, 6, seed) {
            Ok(t) => assert_eq!(t.records.len(), 10),
            Err(Error::HorizonExceeded { step, .. }) => assert!(step <= 10),
            Err(e) => panic!("unexpected error {e}"),
        }
        if start.elapsed() < Duration::from_secs(10) {
            fast += 1;
        }
    }
    assert!(fast >= 18, "{fast}/20 runs under 10 s");
}

#[test]
fn unit_moves_in_every_mode() {
    for mode in [Mode::Exact, Mode::Asymptotic] {
        for seed in 0..20 {
            let t = match run(60, mode, 6, seed) {
                Ok(t) => t,
                Err(Error::HorizonExceeded { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let mut x = 0;
            for r in &t.records {
                assert_eq!((r.x - x).abs(), 1);
                assert_eq!(r.x - x, r.eta.sign());
                x = r.x;
            }
        }
    }
}

/// `Q_n(X_{n+1}) / τ_n` in `[λ(1 − τ_n^{-1/4}), 2λ]`, pooled over the exact
/// steps 5 to 8 that a replica survives.
#[test]
fn next_queue_concentrates_around_lambda_tau() {
    let lambda = 1.0;
    let (mut inside, mut total) = (0usize, 0usize);
    for replica in 0..2000 {
        let opts = RunOptions { replica, lambda, ..RunOptions::new(8, Mode::Exact, 2024) };
        let mut runner = ChainRunner::new(opts).unwrap();
        while runner.n() < 8 {
            if runner.step().is_err() {
                break;
            }
            if runner.n() < 5 {
                continue;
            }
            let dir = runner.next_direction();
            let state = runner.exact_state().unwrap();
            let SiteState::Count(q) = state.site(state.x + dir.sign()) else { panic!("uninspected neighbour") };
            let tau = state.log_tau.exp();
            let ratio = q as f64 / tau;
            total += 1;
            inside += usize::from(ratio >= lambda * (1.0 - tau.powf(-0.25)) && ratio <= 2.0 * lambda);
        }
    }
    assert!(total >= 500, "only {total} surviving steps");
    assert!(inside as f64 >= 0.99 * total as f64, "{inside}/{total}");
}

#[test]
fn growth_stays_in_doubly_exponential_brackets() {
    let (lo, hi) = (1.8f64.ln(), 2.2f64.ln());
    let mut at_20 = 0;
    let replicas = 500;
    for replica in 0..replicas {
        let t = run_with(&RunOptions { replica, ..RunOptions::new(60, Mode::Asymptotic, 77) }).unwrap();
        for r in &t.records[19..] {
            let v = r.log_tau.ln() / r.n as f64;
            let ok = v >= lo && v <= hi;
            if r.n == 20 {
                at_20 += usize::from(ok);
            }
            if r.n >= 30 {
                assert!(ok, "replica {replica} n {} ratio {v}", r.n);
            }
            assert!(r.log_t >= r.log_tau);
        }
    }
    assert!(at_20 as f64 >= 0.99 * replicas as f64, "{at_20}/{replicas} at n = 20");
}

#[test]
fn gamma_hat_settles_by_step_forty() {
    for replica in 0..200 {
        let t = run_with(&RunOptions { replica, ..RunOptions::new(50, Mode::Asymptotic, 78) }).unwrap();
        let g = |n: usize| t.records[n - 1].log_tau / 2f64.powi(n as i32);
        let rel = (g(50) - g(40)).abs() / g(50);
        assert!(rel < 1e-2, "replica {replica}: {} vs {}", g(40), g(50));
    }
}

#[test]
fn z_correction_is_a_distinct_deterministic_variant() {
    let go = |z| {
        let opts = RunOptions { z_correction: z, ..RunOptions::new(400, Mode::Asymptotic, 9) };
        run_with(&opts).unwrap()
    };
    let (a, b, c) = (go(true), go(true), go(false));
    assert!(a.meta.z_correction && !c.meta.z_correction);
    assert_eq!(a.records, b.records);
    assert_ne!(a.records, c.records);
    let freq = a.turns() as f64 / 399.0;
    assert!((freq - 0.25).abs() < 0.07, "turn frequency {freq}");
}

#[test]
fn forced_levy_draw_doubles_log_tau() {
    let opts = RunOptions::new(20, Mode::Asymptotic, 3);
    let mut runner = ChainRunner::new(opts)
        .unwrap()
        .with_asymptotic_options(AsymptoticOptions { forced_s: Some(2.0), ..AsymptoticOptions::new(1.0) });
    let mut prev = None;
    for _ in 0..20 {
        let r = runner.step().unwrap();
        if let (Some(p), Some(_)) = (prev, runner.asymptotic_state()) {
            if r.n > runner.handoff_at().unwrap() + 1 {
                assert_eq!(r.log_tau, 2.0 * p);
            }
        }
        prev = Some(r.log_tau);
    }
}

#[test]
fn oracle_first_move_is_fair() {
    let cfg = OracleConfig { max_emptyings: Some(2), ..OracleConfig::new(1e6, 1.0, 1.0) };
    let right = (0..4000)
        .filter(|&r| continuous_oracle(&cfg, 8, r).unwrap().decisions.first().map(|d| d.sign()) == Some(1))
        .count();
    assert!((right as f64 - 2000.0).abs() < 3.0 * 1000f64.sqrt(), "{right}");
}
