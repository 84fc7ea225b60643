//! Seeded Monte Carlo estimators for the limiting behaviour of the chain.
//!
//! Every estimator is a pure function of its parameters and seed. Replicas
//! run in parallel, each on its own random streams, and are reduced in
//! replica order so results do not depend on the thread count.

mod calibration;
mod chain_stats;
mod oracle_check;
mod poisson_diff;
mod walk;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainRunner, Mode, RunOptions, DEFAULT_HANDOFF};
use crate::hitting_time::DEFAULT_AUTO_THRESHOLD;
use crate::stats::Summary;
use crate::Result;

pub use calibration::{calibrate, Calibration, CalibrationSettings};
pub use chain_stats::{
    estimate_turning, martingale_audit, nt_scaling, tau_growth_series, AuditRow, MartingaleAudit, TauGrowth,
};
pub use oracle_check::{oracle_check, regime_stats, OracleCheck, RegimeStats};
pub use poisson_diff::{poisson_diff_distance, poisson_differences, POISSON_GRID_POINTS};
pub use walk::{
    lil_normalizer, lil_scaling, recurrence_stats, reference_correlated_walk, LilScaling, RecurrenceStats,
    ReferenceWalk, WalkSource, LIL_START,
};

/// Chain settings shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSetup {
    pub lambda: f64,
    pub handoff_n: u64,
    pub walk_threshold: u64,
    pub z_correction: bool,
}

impl Default for ChainSetup {
    fn default() -> Self {
        Self { lambda: 1.0, handoff_n: DEFAULT_HANDOFF, walk_threshold: DEFAULT_AUTO_THRESHOLD, z_correction: false }
    }
}

impl ChainSetup {
    pub(crate) fn runner(&self, mode: Mode, n_steps: u64, seed: u64, replica: u64) -> Result<ChainRunner> {
        ChainRunner::new(RunOptions {
            n_steps,
            mode,
            handoff_n: self.handoff_n,
            seed,
            replica,
            lambda: self.lambda,
            walk_threshold: self.walk_threshold,
            z_correction: self.z_correction,
            zeta_time_budget: None,
        })
    }
}

/// A Monte Carlo point estimate with its standard error and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub label: String,
    pub point: f64,
    /// Sample standard deviation over `√n_replicas`.
    pub stderr: f64,
    pub n_replicas: usize,
    pub seed: u64,
    pub parameters: serde_json::Value,
}

impl EstimateResult {
    pub(crate) fn from_samples(label: &str, xs: &[f64], seed: u64, parameters: serde_json::Value) -> Self {
        let s = Summary::of(xs);
        Self { label: label.to_string(), point: s.mean, stderr: s.stderr, n_replicas: xs.len(), seed, parameters }
    }

    /// Distance from `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.point - target) / self.stderr
    }
}

/// One grid point of a scaling series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    /// Step index `n` (or another increasing index such as `log t`).
    pub index: f64,
    pub value: f64,
    pub stderr: f64,
    /// Replicas that contributed at this index.
    pub n_used: usize,
}

/// A statistic tracked along an increasing index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeries {
    pub label: String,
    pub seed: u64,
    pub n_replicas: usize,
    pub grid: Vec<ScalingPoint>,
}

impl ScalingSeries {
    pub fn at(&self, index: f64) -> Option<&ScalingPoint> {
        self.grid.iter().find(|p| p.index == index)
    }

    /// `index,value,stderr,n_used` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value,stderr,n_used\n");
        for p in &self.grid {
            out.push_str(&format!("{},{:?},{:?},{}\n", p.index, p.value, p.stderr, p.n_used));
        }
        out
    }
}

/// Run `f` for replicas `0..n` in parallel, returning results in replica
/// order.
pub fn replicate<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Like [`replicate`], stopping at the first error in replica order.
pub fn try_replicate<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    replicate(n, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replicate_keeps_order() {
        let v = replicate(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i as u64));
    }

    #[test]
    fn try_replicate_reports_first_error() {
        let r: Result<Vec<u64>> =
            try_replicate(100, |i| if i >= 40 { Err(crate::Error::invalid(format!("{i}"))) } else { Ok(i) });
        match r {
            Err(crate::Error::InvalidParameter(m)) => assert_eq!(m, "40"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn series_csv() {
        let s = ScalingSeries {
            label: "x".into(),
            seed: 1,
            n_replicas: 2,
            grid: vec![ScalingPoint { index: 1.0, value: 0.5, stderr: 0.1, n_used: 2 }],
        };
        assert_eq!(s.to_csv(), "index,value,stderr,n_used\n1,0.5,0.1,2\n");
    }
}
