use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{try_replicate, ChainSetup, EstimateResult, ScalingPoint, ScalingSeries};
use crate::chain::{ChainRunner, Direction, Mode};
use crate::stats::{quantile_sorted, sorted, Summary};
use crate::{Error, Result};

/// Beyond this many steps `log τ_n` no longer fits in a double.
const MAX_LOG_STEPS: u64 = 1000;

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(msg))
    }
}

/// `log log τ_n`, or `None` unless `log τ_n > e`.
fn log_log_tau(r: &ChainRunner, log_tau: f64) -> Option<f64> {
    let ll = match r.asymptotic_state() {
        Some(a) if a.gamma_hat > 0.0 => a.gamma_hat.ln() + a.n as f64 * std::f64::consts::LN_2,
        _ => log_tau.ln(),
    };
    (ll > 1.0).then_some(ll)
}

/// Empirical frequency of `η_{n+1} ≠ η_n` at `n = n_index`.
pub fn estimate_turning(
    n_index: u64,
    n_replicas: usize,
    mode: Mode,
    seed: u64,
    setup: &ChainSetup,
) -> Result<EstimateResult> {
    require(n_index >= 2, "n_index must be at least 2")?;
    require(n_replicas >= 1, "need at least one replica")?;
    let turns = try_replicate(n_replicas, |i| {
        let mut r = setup.runner(mode, n_index + 1, seed, i)?;
        let mut eta = Direction::Right;
        for _ in 0..n_index {
            eta = r.step()?.eta;
        }
        Ok(if r.next_direction() != eta { 1.0 } else { 0.0 })
    })?;
    Ok(EstimateResult::from_samples(
        "turning",
        &turns,
        seed,
        json!({ "n_index": n_index, "mode": mode, "setup": setup }),
    ))
}

/// Growth of `τ_n` in asymptotic mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauGrowth {
    /// Mean of `log log τ_n / n` over replicas with `log τ_n > e`.
    pub series: ScalingSeries,
    /// `γ̂ = log τ_n / 2ⁿ` per replica at `n = n_max`.
    pub gamma_hat: Vec<f64>,
    /// Interquartile range of `γ̂_n` across replicas, for `n = 1..=n_max`.
    pub gamma_iqr: Vec<f64>,
    /// Largest `log T_n − log τ_n` across replicas, for `n = 1..=n_max`.
    pub max_excess: Vec<f64>,
}

pub fn tau_growth_series(n_max: u64, n_replicas: usize, seed: u64, setup: &ChainSetup) -> Result<TauGrowth> {
    require((1..=MAX_LOG_STEPS).contains(&n_max), "n_max must be in 1..=1000")?;
    require(n_replicas >= 1, "need at least one replica")?;
    // per replica, per n: (log log τ_n or NaN, γ̂_n, excess_n)
    let paths = try_replicate(n_replicas, |i| {
        let mut r = setup.runner(Mode::Asymptotic, n_max, seed, i)?;
        let mut out = Vec::with_capacity(n_max as usize);
        for _ in 0..n_max {
            let rec = r.step()?;
            let ll = log_log_tau(&r, rec.log_tau).unwrap_or(f64::NAN);
            let gamma = rec.log_tau.max(0.0) / 2f64.powi(rec.n as i32);
            out.push((ll, gamma, rec.log_t - rec.log_tau));
        }
        Ok(out)
    })?;
    let mut grid = Vec::new();
    let mut gamma_iqr = Vec::new();
    let mut max_excess = Vec::new();
    for k in 0..n_max as usize {
        let n = (k + 1) as f64;
        let ratios: Vec<f64> = paths.iter().map(|p| p[k].0 / n).filter(|v| v.is_finite()).collect();
        let s = Summary::of(&ratios);
        grid.push(ScalingPoint { index: n, value: s.mean, stderr: s.stderr, n_used: ratios.len() });
        let g = sorted(&paths.iter().map(|p| p[k].1).collect::<Vec<_>>());
        gamma_iqr.push(quantile_sorted(&g, 0.75) - quantile_sorted(&g, 0.25));
        max_excess.push(paths.iter().map(|p| p[k].2).fold(f64::NEG_INFINITY, f64::max));
    }
    Ok(TauGrowth {
        series: ScalingSeries { label: "loglog_tau_over_n".into(), seed, n_replicas, grid },
        gamma_hat: paths.iter().map(|p| p[n_max as usize - 1].1).collect(),
        gamma_iqr,
        max_excess,
    })
}

/// `n / log log T_n` against `n` (so `N_t = n` at `t = T_n`), asymptotic mode.
/// Indices where `log T_n ≤ e` are left out for that replica.
pub fn nt_scaling(n_max: u64, n_replicas: usize, seed: u64, setup: &ChainSetup) -> Result<ScalingSeries> {
    require((2..=MAX_LOG_STEPS).contains(&n_max), "n_max must be in 2..=1000")?;
    require(n_replicas >= 1, "need at least one replica")?;
    let paths = try_replicate(n_replicas, |i| {
        let mut r = setup.runner(Mode::Asymptotic, n_max, seed, i)?;
        let mut out = Vec::with_capacity(n_max as usize);
        for _ in 0..n_max {
            let rec = r.step()?;
            let ll = rec.log_t.ln();
            out.push(if ll > 1.0 { rec.n as f64 / ll } else { f64::NAN });
        }
        Ok(out)
    })?;
    let grid = (1..n_max as usize)
        .map(|k| {
            let xs: Vec<f64> = paths.iter().map(|p| p[k]).filter(|v| v.is_finite()).collect();
            let s = Summary::of(&xs);
            ScalingPoint { index: (k + 1) as f64, value: s.mean, stderr: s.stderr, n_used: xs.len() }
        })
        .collect();
    Ok(ScalingSeries { label: "n_over_loglog_T".into(), seed, n_replicas, grid })
}

/// Moments of the increments of `Y_n = X_n + 2·1{η_n = +1}` at step `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub n: u64,
    /// Mean of `Y_{n+1} − Y_n`.
    pub mean_increment: f64,
    pub mean_stderr: f64,
    /// Mean of `(Y_{n+1} − Y_n)²`.
    pub second_moment: f64,
    pub second_stderr: f64,
    /// Frequency of `η_{n+1} ≠ η_n`.
    pub turn_frequency: f64,
    pub max_abs_increment: i64,
    pub n_replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleAudit {
    pub mode: Mode,
    pub seed: u64,
    pub rows: Vec<AuditRow>,
}

impl MartingaleAudit {
    pub fn row(&self, n: u64) -> Option<&AuditRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

fn y_of(x: i64, eta: Direction) -> i64 {
    x + if eta == Direction::Right { 2 } else { 0 }
}

pub fn martingale_audit(
    n_max: u64,
    n_replicas: usize,
    mode: Mode,
    seed: u64,
    setup: &ChainSetup,
) -> Result<MartingaleAudit> {
    require(n_max >= 3, "n_max must be at least 3")?;
    require(n_replicas >= 1, "need at least one replica")?;
    // per replica: (ΔY_n, turn at n+1) for n = 1..=n_max
    let paths = try_replicate(n_replicas, |i| {
        let mut r = setup.runner(mode, n_max + 1, seed, i)?;
        let first = r.step()?;
        let mut y = y_of(first.x, first.eta);
        let mut out = Vec::with_capacity(n_max as usize);
        for _ in 0..n_max {
            let rec = r.step()?;
            let y_next = y_of(rec.x, rec.eta);
            out.push((y_next - y, rec.turn));
            y = y_next;
        }
        Ok(out)
    })?;
    let rows = (0..n_max as usize)
        .map(|k| {
            let d: Vec<f64> = paths.iter().map(|p| p[k].0 as f64).collect();
            let d2: Vec<f64> = d.iter().map(|v| v * v).collect();
            let turns = paths.iter().filter(|p| p[k].1).count();
            let m = Summary::of(&d);
            let m2 = Summary::of(&d2);
            AuditRow {
                n: k as u64 + 1,
                mean_increment: m.mean,
                mean_stderr: m.stderr,
                second_moment: m2.mean,
                second_stderr: m2.stderr,
                turn_frequency: turns as f64 / n_replicas as f64,
                max_abs_increment: paths.iter().map(|p| p[k].0.abs()).max().unwrap_or(0),
                n_replicas,
            }
        })
        .collect();
    Ok(MartingaleAudit { mode, seed, rows })
}
