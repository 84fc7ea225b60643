use serde::{Deserialize, Serialize};

use super::{replicate, try_replicate, ChainSetup};
use crate::chain::{continuous_oracle, ChainRunner, Mode, OracleConfig, RunOptions};
use crate::stats::{chi_square_homogeneity, median, ChiSquareTest};
use crate::{Error, Result};

/// Emptyings observed per replica: `X_1, …, X_4` need the decision taken
/// at the third emptying.
const SITES: usize = 4;

/// Category of a replica: the first four moves as a 4-bit pattern
/// (bit `j` set when move `j + 1` went right), or censored.
fn category(moves: Option<[bool; SITES]>) -> usize {
    match moves {
        None => 1 << SITES,
        Some(m) => m.iter().enumerate().map(|(j, &r)| (r as usize) << j).sum(),
    }
}

/// Agreement between the exact chain and the continuous-time oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub n_replicas: usize,
    pub seed: u64,
    pub lambda: f64,
    /// Replicas whose third emptying happens after this time are counted in
    /// a separate censored category by both implementations.
    pub t_cut: f64,
    /// Counts per move pattern (16 patterns, then censored).
    pub exact_counts: Vec<u64>,
    pub oracle_counts: Vec<u64>,
    /// Homogeneity test on the full pattern of the first four emptied sites.
    pub sites_test: ChiSquareTest,
    /// Homogeneity test on `X_4 ∈ {−4, −2, 0, 2, 4}` plus censored.
    pub x4_test: ChiSquareTest,
}

impl OracleCheck {
    pub fn passed(&self, alpha: f64) -> bool {
        self.sites_test.p_value > alpha && self.x4_test.p_value > alpha
    }
}

fn x4_table(counts: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; 6];
    for (cat, &c) in counts.iter().enumerate() {
        if cat == 1 << SITES {
            out[5] += c;
        } else {
            let rights = (cat as u32).count_ones() as usize;
            // X_4 = 2·rights − 4 ∈ {−4, …, 4}
            out[rights] += c;
        }
    }
    out
}

fn exact_moves(setup: &ChainSetup, seed: u64, replica: u64, log_cut: f64) -> Result<Option<[bool; SITES]>> {
    let mut r = ChainRunner::new(RunOptions {
        n_steps: SITES as u64,
        mode: Mode::Exact,
        handoff_n: setup.handoff_n,
        seed,
        replica,
        lambda: setup.lambda,
        walk_threshold: setup.walk_threshold,
        z_correction: false,
        zeta_time_budget: Some(log_cut.exp()),
    })?;
    let mut moves = [false; SITES];
    for m in moves.iter_mut().take(SITES - 1) {
        match r.step() {
            Ok(rec) => *m = rec.eta.sign() > 0,
            // either one means T_3 is beyond the cut
            Err(Error::HorizonExceeded { .. } | Error::BudgetExceeded { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    if r.exact_state().expect("exact mode").t.log() > log_cut {
        return Ok(None);
    }
    moves[SITES - 1] = r.next_direction().sign() > 0;
    Ok(Some(moves))
}

/// Compare the first four emptied sites of the exact chain (walk sampler for
/// every queue) with those of the event-driven simulation at λ = μ.
pub fn oracle_check(n_replicas: usize, seed: u64, lambda: f64, t_cut: f64) -> Result<OracleCheck> {
    if n_replicas == 0 {
        return Err(Error::invalid("need at least one replica"));
    }
    let setup = ChainSetup { lambda, walk_threshold: u64::MAX, ..ChainSetup::default() };
    let cfg =
        OracleConfig { max_emptyings: Some(SITES), log_events: false, ..OracleConfig::new(t_cut, lambda, lambda) };
    let log_cut = t_cut.ln();
    let exact = try_replicate(n_replicas, |i| exact_moves(&setup, seed, i, log_cut).map(category))?;
    let oracle = try_replicate(n_replicas, |i| {
        let log = continuous_oracle(&cfg, seed, i)?;
        if log.emptyings.len() < SITES {
            return Ok(category(None));
        }
        let mut m = [false; SITES];
        for (j, d) in log.decisions.iter().take(SITES).enumerate() {
            m[j] = d.sign() > 0;
        }
        Ok(category(Some(m)))
    })?;
    let tally = |cats: &[usize]| {
        let mut c = vec![0u64; (1 << SITES) + 1];
        for &k in cats {
            c[k] += 1;
        }
        c
    };
    let exact_counts = tally(&exact);
    let oracle_counts = tally(&oracle);
    Ok(OracleCheck {
        n_replicas,
        seed,
        lambda,
        t_cut,
        sites_test: chi_square_homogeneity(&[exact_counts.clone(), oracle_counts.clone()]),
        x4_test: chi_square_homogeneity(&[x4_table(&exact_counts), x4_table(&oracle_counts)]),
        exact_counts,
        oracle_counts,
    })
}

/// Movement statistics of the event-driven simulation for `λ ≠ μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeStats {
    pub lambda: f64,
    pub mu: f64,
    pub t_max: f64,
    pub n_replicas: usize,
    pub seed: u64,
    /// Fraction of replicas with fewer than `stuck_moves` completed moves.
    pub stuck_fraction: f64,
    pub stuck_moves: usize,
    pub mean_moves: f64,
    /// Median number of direction reversals among completed moves.
    pub median_direction_changes: f64,
}

pub fn regime_stats(lambda: f64, mu: f64, t_max: f64, n_replicas: usize, seed: u64) -> Result<RegimeStats> {
    if n_replicas == 0 {
        return Err(Error::invalid("need at least one replica"));
    }
    let cfg = OracleConfig { log_events: false, ..OracleConfig::new(t_max, lambda, mu) };
    let stuck_moves = 5;
    let logs =
        replicate(n_replicas, |i| continuous_oracle(&cfg, seed, i).map(|l| (l.moves_completed, l.direction_changes())))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
    let stuck = logs.iter().filter(|l| l.0 < stuck_moves).count();
    let changes: Vec<f64> = logs.iter().map(|l| l.1 as f64).collect();
    Ok(RegimeStats {
        lambda,
        mu,
        t_max,
        n_replicas,
        seed,
        stuck_fraction: stuck as f64 / n_replicas as f64,
        stuck_moves,
        mean_moves: logs.iter().map(|l| l.0 as f64).sum::<f64>() / n_replicas as f64,
        median_direction_changes: median(&changes),
    })
}
