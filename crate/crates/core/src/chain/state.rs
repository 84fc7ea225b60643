use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::logscalar::LogScalar;
use super::poisson::{sample_poisson, EXACT_MEAN_LIMIT};
use crate::hitting_time::{HittingSampler, SamplingMethod};
use crate::rng::ChainRng;
use crate::{Error, Result};

/// A unit move on ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn sign(self) -> i64 {
        match self {
            Direction::Left => -1,
            Direction::Right => 1,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }

    pub fn fair<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            Direction::Right
        } else {
            Direction::Left
        }
    }
}

impl From<Direction> for i8 {
    fn from(d: Direction) -> i8 {
        d.sign() as i8
    }
}

impl TryFrom<i8> for Direction {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            -1 => Ok(Direction::Left),
            1 => Ok(Direction::Right),
            other => Err(format!("direction must be ±1, got {other}")),
        }
    }
}

/// Queue at a site: not yet looked at, or an exact customer count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiteState {
    Uninspected,
    Count(u64),
}

/// Which approximations have touched a state or trajectory so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproximationFlags {
    /// Some Poisson mean exceeded the exact-sampler threshold.
    pub gaussian_poisson: bool,
    /// Some emptying time was drawn from the Lévy approximation.
    pub levy_zeta: bool,
}

impl ApproximationFlags {
    pub fn merge(&mut self, other: ApproximationFlags) {
        self.gaussian_poisson |= other.gaussian_poisson;
        self.levy_zeta |= other.levy_zeta;
    }
}

/// The configuration right after the `n`-th queue was emptied.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    /// Inspected sites only; an absent key is [`SiteState::Uninspected`].
    queues: BTreeMap<i64, u64>,
    pub x: i64,
    /// Last move; `None` before the first one.
    pub eta: Option<Direction>,
    /// Total elapsed time `T_n`.
    pub t: LogScalar,
    /// Duration `τ_n` of the last travel-plus-service period (`-∞` at n = 0).
    pub log_tau: f64,
    pub n: u64,
    /// The next move, once it has been decided from the current queues.
    pending: Option<Direction>,
    pub flags: ApproximationFlags,
}

impl ChainState {
    /// Server at 0 at time 0, queues at -1, 0, 1 empty, everything else
    /// uninspected.
    pub fn init() -> Self {
        Self {
            queues: [(-1, 0), (0, 0), (1, 0)].into_iter().collect(),
            x: 0,
            eta: None,
            t: LogScalar::ZERO,
            log_tau: f64::NEG_INFINITY,
            n: 0,
            pending: None,
            flags: ApproximationFlags::default(),
        }
    }

    pub fn site(&self, site: i64) -> SiteState {
        match self.queues.get(&site) {
            Some(&c) => SiteState::Count(c),
            None => SiteState::Uninspected,
        }
    }

    fn count(&self, site: i64) -> u64 {
        self.queues.get(&site).copied().expect("neighbours of the server are inspected")
    }

    /// Smallest and largest inspected site.
    pub fn inspected_range(&self) -> (i64, i64) {
        let lo = *self.queues.keys().next().expect("nonempty");
        let hi = *self.queues.keys().next_back().expect("nonempty");
        (lo, hi)
    }

    pub fn inspected(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.queues.iter().map(|(&k, &v)| (k, v))
    }

    /// The decided next move, if it has been drawn already.
    pub fn pending(&self) -> Option<Direction> {
        self.pending
    }

    /// Decide (once) the next move, consuming a tie draw only on equality.
    pub fn decide<R: Rng + ?Sized>(&mut self, tie_rng: &mut R) -> Direction {
        if let Some(d) = self.pending {
            return d;
        }
        let d = next_direction(self, tie_rng);
        self.pending = Some(d);
        d
    }

    /// Invariants that must hold after every step.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.site(self.x) != SiteState::Count(0) {
            return Err(format!("current site {} not empty", self.x));
        }
        let (lo, hi) = self.inspected_range();
        if self.queues.len() as i64 != hi - lo + 1 {
            return Err("inspected sites are not contiguous".into());
        }
        if lo > self.x - 1 || hi < self.x + 1 || lo > -1 || hi < 1 {
            return Err("inspected range misses a required site".into());
        }
        if self.n > 0 && self.t.log() < (self.n as f64).ln() - 1e-12 {
            return Err(format!("T_n = {} below n = {}", self.t.value(), self.n));
        }
        Ok(())
    }

    /// One exact step.
    ///
    /// Moves to the longer neighbour, draws the travel arrivals and the
    /// emptying time there, lets every other inspected queue grow by a
    /// Poisson(λτ) batch and initializes newly adjacent sites with
    /// Poisson(λT). Nothing is modified on error.
    pub fn step_exact(&self, sampler: &HittingSampler, rng: &mut ChainRng) -> Result<ChainState> {
        let lambda = sampler.params.lambda();
        let step = self.n + 1;
        let horizon = |mean: f64| -> Result<()> {
            if mean > EXACT_MEAN_LIMIT {
                Err(Error::HorizonExceeded { step, mean, limit: EXACT_MEAN_LIMIT })
            } else {
                Ok(())
            }
        };

        let mut next = self.clone();
        let dir = next.decide(&mut rng.tie);
        let x = self.x + dir.sign();

        let travel = sample_poisson(lambda, &mut rng.main);
        let k = self.count(x) + travel.value;
        if sampler.resolve(k) == SamplingMethod::LevyApprox {
            next.flags.levy_zeta = true;
        }
        let tau = 1.0 + sampler.sample(k, &mut rng.main)?;
        next.flags.gaussian_poisson |= travel.approximate;

        for (&site, count) in next.queues.iter_mut() {
            if site == x {
                continue;
            }
            let mean = lambda * tau;
            horizon(mean)?;
            let add = sample_poisson(mean, &mut rng.main);
            next.flags.gaussian_poisson |= add.approximate;
            *count += add.value;
        }

        let t = self.t + LogScalar::from_value(tau);
        for site in [x - 1, x + 1] {
            if !next.queues.contains_key(&site) {
                let mean = lambda * t.value();
                horizon(mean)?;
                let init = sample_poisson(mean, &mut rng.main);
                next.flags.gaussian_poisson |= init.approximate;
                next.queues.insert(site, init.value);
            }
        }
        next.queues.insert(x, 0);

        next.x = x;
        next.eta = Some(dir);
        next.t = t;
        next.log_tau = tau.ln();
        next.n = step;
        next.pending = None;
        Ok(next)
    }
}

/// Direction of the longer neighbouring queue; a fair draw from `tie_rng`
/// on equality.
pub fn next_direction<R: Rng + ?Sized>(state: &ChainState, tie_rng: &mut R) -> Direction {
    let right = state.count(state.x + 1);
    let left = state.count(state.x - 1);
    match right.cmp(&left) {
        std::cmp::Ordering::Greater => Direction::Right,
        std::cmp::Ordering::Less => Direction::Left,
        std::cmp::Ordering::Equal => Direction::fair(tie_rng),
    }
}
