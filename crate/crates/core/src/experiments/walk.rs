use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{try_replicate, ChainSetup, EstimateResult, ScalingPoint, ScalingSeries};
use crate::chain::{ChainRunner, Direction, Mode, StepRecord, Trajectory, TrajectoryMeta};
use crate::hitting_time::normal_cdf;
use crate::rng::{stream, Purpose, StreamRng};
use crate::stats::{ks_p_value, ks_statistic, median_stderr, quantile_sorted, sorted};
use crate::{Error, Result};

/// First index included in the iterated-logarithm maximum.
pub const LIL_START: u64 = 100;

/// Nearest-neighbour walk that reverses direction with a fixed probability
/// at every step after the first (whose direction is a fair coin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceWalk {
    pub x: i64,
    pub eta: Option<Direction>,
    pub turn_prob: f64,
}

impl ReferenceWalk {
    pub fn new(turn_prob: f64) -> Result<Self> {
        if !(turn_prob > 0.0 && turn_prob < 1.0) {
            return Err(Error::invalid(format!("turn_prob must be in (0, 1), got {turn_prob}")));
        }
        Ok(Self { x: 0, eta: None, turn_prob })
    }

    /// Take one step; returns whether it reversed the previous one.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let (dir, turn) = match self.eta {
            None => (Direction::fair(rng), false),
            Some(d) if rng.random::<f64>() < self.turn_prob => (d.reversed(), true),
            Some(d) => (d, false),
        };
        self.eta = Some(dir);
        self.x += dir.sign();
        turn
    }
}

/// `n_replicas` reference-walk trajectories of `n_max` steps. Times are not
/// defined for this model, so the log fields are NaN (null in JSON).
pub fn reference_correlated_walk(n_max: u64, n_replicas: usize, turn_prob: f64, seed: u64) -> Result<Vec<Trajectory>> {
    ReferenceWalk::new(turn_prob)?;
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    try_replicate(n_replicas, |i| {
        let mut rng = stream(seed, i, Purpose::Reference);
        let mut w = ReferenceWalk::new(turn_prob)?;
        let records = (1..=n_max)
            .map(|n| {
                let turn = w.step(&mut rng);
                StepRecord { n, x: w.x, eta: w.eta.expect("moved"), turn, log_tau: f64::NAN, log_t: f64::NAN }
            })
            .collect();
        let meta = TrajectoryMeta {
            mode: Mode::Reference,
            seed,
            replica: i,
            lambda: f64::NAN,
            n_steps: n_max,
            handoff_n: None,
            handoff_at: None,
            early_handoff: false,
            flags: Default::default(),
            z_correction: false,
            turn_prob: Some(turn_prob),
            config: None,
        };
        Ok(Trajectory { meta, records })
    })
}

/// Source of server positions `X_1, X_2, …`.
pub(crate) enum Walker {
    Chain(Box<ChainRunner>),
    Reference(ReferenceWalk, Box<StreamRng>),
}

impl Walker {
    pub(crate) fn chain(setup: &ChainSetup, n_max: u64, seed: u64, replica: u64) -> Result<Self> {
        Ok(Walker::Chain(Box::new(setup.runner(Mode::Asymptotic, n_max, seed, replica)?)))
    }

    pub(crate) fn reference(turn_prob: f64, seed: u64, replica: u64) -> Result<Self> {
        Ok(Walker::Reference(ReferenceWalk::new(turn_prob)?, Box::new(stream(seed, replica, Purpose::Reference))))
    }

    #[inline]
    pub(crate) fn next_x(&mut self) -> Result<i64> {
        match self {
            Walker::Chain(r) => Ok(r.step()?.x),
            Walker::Reference(w, rng) => {
                w.step(rng.as_mut());
                Ok(w.x)
            }
        }
    }
}

/// Where positions come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WalkSource {
    /// The chain in asymptotic mode.
    Chain { setup: ChainSetup },
    /// The correlated reference walk.
    Reference { turn_prob: f64 },
}

impl WalkSource {
    pub(crate) fn walker(&self, n_max: u64, seed: u64, replica: u64) -> Result<Walker> {
        match self {
            WalkSource::Chain { setup } => Walker::chain(setup, n_max, seed, replica),
            WalkSource::Reference { turn_prob } => Walker::reference(*turn_prob, seed, replica),
        }
    }
}

/// `√(6 n log log n)`.
pub fn lil_normalizer(n: u64) -> f64 {
    let nf = n as f64;
    (6.0 * nf * nf.ln().ln()).sqrt()
}

/// Running maxima of `|X_n| / √(6 n log log n)` over `n ∈ [100, n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LilScaling {
    pub source: WalkSource,
    pub seed: u64,
    pub n_max: u64,
    /// Median (with its standard error) of the running maximum at each
    /// checkpoint.
    pub series: ScalingSeries,
    /// Per-replica running maximum over the whole range.
    pub running_max: Vec<f64>,
    pub median: f64,
    /// Index used for the normality check of `X_n / √(3n)`.
    pub normality_n: u64,
    pub normality_ks: f64,
    pub normality_p: f64,
}

fn checkpoints(n_max: u64) -> Vec<u64> {
    let mut c: Vec<u64> =
        std::iter::successors(Some(1000u64), |&v| v.checked_mul(10)).take_while(|&v| v < n_max).collect();
    c.push(n_max);
    c
}

pub(crate) fn lil_from(source: WalkSource, n_max: u64, n_replicas: usize, seed: u64) -> Result<LilScaling> {
    if n_max < 1000 {
        return Err(Error::invalid("n_max must be at least 1000"));
    }
    if n_replicas == 0 {
        return Err(Error::invalid("need at least one replica"));
    }
    let marks = checkpoints(n_max);
    let normality_n = n_max.min(10_000);
    let norm: Vec<f64> = (LIL_START..=n_max).map(|n| lil_normalizer(n).recip()).collect();
    let paths = try_replicate(n_replicas, |i| {
        let mut w = source.walker(n_max, seed, i)?;
        let mut best = 0.0f64;
        let mut at_marks = Vec::with_capacity(marks.len());
        let mut mark = 0;
        let mut x_norm = 0;
        for n in 1..=n_max {
            let x = w.next_x()?;
            if n >= LIL_START {
                best = best.max(x.unsigned_abs() as f64 * norm[(n - LIL_START) as usize]);
            }
            if n == normality_n {
                x_norm = x;
            }
            if n == marks[mark] {
                at_marks.push(best);
                mark += 1;
            }
        }
        Ok((at_marks, x_norm))
    })?;
    let grid = marks
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let v = sorted(&paths.iter().map(|p| p.0[j]).collect::<Vec<_>>());
            ScalingPoint {
                index: m as f64,
                value: quantile_sorted(&v, 0.5),
                stderr: median_stderr(&v),
                n_used: v.len(),
            }
        })
        .collect();
    let running_max: Vec<f64> = paths.iter().map(|p| *p.0.last().expect("n_max checkpoint")).collect();
    let scale = (3.0 * normality_n as f64).sqrt();
    let z = sorted(&paths.iter().map(|p| p.1 as f64 / scale).collect::<Vec<_>>());
    let normality_ks = ks_statistic(&z, normal_cdf);
    Ok(LilScaling {
        source,
        seed,
        n_max,
        series: ScalingSeries { label: "lil_running_max_median".into(), seed, n_replicas, grid },
        median: quantile_sorted(&sorted(&running_max), 0.5),
        running_max,
        normality_n,
        normality_ks,
        normality_p: ks_p_value(normality_ks, n_replicas),
    })
}

/// Iterated-logarithm scaling of the chain's positions in asymptotic mode.
pub fn lil_scaling(n_max: u64, n_replicas: usize, seed: u64, setup: &ChainSetup) -> Result<LilScaling> {
    lil_from(WalkSource::Chain { setup: *setup }, n_max, n_replicas, seed)
}

/// Returns to the origin and late sign changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceStats {
    /// Mean number of `n ∈ [1, n_max]` with `X_n = 0`.
    pub returns: EstimateResult,
    /// Fraction of replicas where `sign(X_m) ≠ sign(X_{m−1})` (signs in
    /// {−1, 0, +1}) for some `m ∈ (n_max/2, n_max]`.
    pub sign_change: EstimateResult,
}

pub(crate) fn recurrence_from(source: WalkSource, n_max: u64, n_replicas: usize, seed: u64) -> Result<RecurrenceStats> {
    if n_max == 0 || n_replicas == 0 {
        return Err(Error::invalid("n_max and n_replicas must be positive"));
    }
    let half = n_max / 2;
    let paths = try_replicate(n_replicas, |i| {
        let mut w = source.walker(n_max, seed, i)?;
        let mut returns = 0u64;
        let mut changed = false;
        let mut prev_sign = 0i64;
        for n in 1..=n_max {
            let x = w.next_x()?;
            if x == 0 {
                returns += 1;
            }
            if n > half && x.signum() != prev_sign {
                changed = true;
            }
            prev_sign = x.signum();
        }
        Ok((returns as f64, if changed { 1.0 } else { 0.0 }))
    })?;
    let params = json!({ "n_max": n_max, "source": source });
    let r: Vec<f64> = paths.iter().map(|p| p.0).collect();
    let s: Vec<f64> = paths.iter().map(|p| p.1).collect();
    Ok(RecurrenceStats {
        returns: EstimateResult::from_samples("returns_to_origin", &r, seed, params.clone()),
        sign_change: EstimateResult::from_samples("late_sign_change", &s, seed, params),
    })
}

/// Recurrence surrogates for the chain in asymptotic mode.
pub fn recurrence_stats(n_max: u64, n_replicas: usize, seed: u64, setup: &ChainSetup) -> Result<RecurrenceStats> {
    recurrence_from(WalkSource::Chain { setup: *setup }, n_max, n_replicas, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Summary;

    #[test]
    fn rejects_bad_turn_prob() {
        assert!(ReferenceWalk::new(0.0).is_err());
        assert!(ReferenceWalk::new(1.0).is_err());
        assert!(reference_correlated_walk(10, 2, 1.5, 1).is_err());
    }

    #[test]
    fn rare_turns_are_binomial() {
        let ts = reference_correlated_walk(1000, 400, 0.01, 2).unwrap();
        let counts: Vec<f64> = ts.iter().map(|t| t.turns() as f64).collect();
        let s = Summary::of(&counts);
        // 999 steps can turn, each with probability 0.01
        assert!((s.mean - 9.99).abs() < 3.0 * s.stderr, "{}", s.mean);
    }

    #[test]
    fn reference_increment_moment() {
        let ts = reference_correlated_walk(200, 500, 0.25, 3).unwrap();
        let mut sq = Vec::new();
        for t in &ts {
            let y: Vec<i64> = t.records.iter().map(|r| r.x + if r.eta == Direction::Right { 2 } else { 0 }).collect();
            sq.extend(y.windows(2).map(|w| ((w[1] - w[0]) * (w[1] - w[0])) as f64));
        }
        let s = Summary::of(&sq);
        assert!((s.mean - 3.0).abs() < 4.0 * s.stderr, "{}", s.mean);
    }

    #[test]
    fn no_time_no_return() {
        let r = recurrence_from(WalkSource::Reference { turn_prob: 0.25 }, 1, 50, 4).unwrap();
        assert_eq!(r.returns.point, 0.0);
    }

    #[test]
    fn running_max_grows_with_horizon() {
        let src = WalkSource::Reference { turn_prob: 0.25 };
        let l = lil_from(src, 100_000, 50, 5).unwrap();
        for w in l.series.grid.windows(2) {
            assert!(w[1].value >= w[0].value);
        }
        let short = lil_from(src, 10_000, 50, 5).unwrap();
        for (a, b) in short.running_max.iter().zip(&l.running_max) {
            assert!(b >= a);
        }
    }

    #[test]
    fn normalizer() {
        assert!((lil_normalizer(100) - (600.0 * 100f64.ln().ln()).sqrt()).abs() < 1e-12);
        assert_eq!(checkpoints(100_000), vec![1000, 10_000, 100_000]);
        assert_eq!(checkpoints(5000), vec![1000, 5000]);
    }
}
