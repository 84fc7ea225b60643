use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::state::{ChainState, Direction};
use crate::{Error, Result};

/// Switches for the renormalized recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticOptions {
    pub lambda: f64,
    /// Add the vanishing `(τ_n/τ_{n+1})^{1/2} Z''` term to the turn test.
    pub z_correction: bool,
    /// Debug hook: use this value instead of a Lévy draw for every `S'`.
    pub forced_s: Option<f64>,
}

impl AsymptoticOptions {
    pub fn new(lambda: f64) -> Self {
        Self { lambda, z_correction: false, forced_s: None }
    }
}

/// State of the renormalized recursion after `n` emptyings.
///
/// `log τ_n` is carried as `γ̂_n = log τ_n / 2ⁿ` so that it stays finite for
/// any `n`; `log T_n` is carried through the excess `log T_n − log τ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticState {
    pub n: u64,
    pub x: i64,
    pub eta: Direction,
    /// The move that will be made by the next step.
    pub pending: Direction,
    pub gamma_hat: f64,
    pub excess: f64,
}

/// What one renormalized step produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticStep {
    /// Whether the move just made reversed the previous one.
    pub turn: bool,
    /// The Lévy variate that drove this step.
    pub s: f64,
}

fn pow2(n: u64) -> f64 {
    if n > 1100 {
        f64::INFINITY
    } else {
        2f64.powi(n as i32)
    }
}

/// `a·2ⁿ − b·2^{n+1}` without forming `∞ − ∞`.
fn scaled_gap(a: f64, b: f64, n: u64) -> f64 {
    let c = a - 2.0 * b;
    if c == 0.0 {
        0.0
    } else {
        c * pow2(n)
    }
}

impl AsymptoticState {
    /// Continue from an exact state after at least one step. The next move
    /// is decided from the exact queues first, drawing on `tie_rng` if needed.
    pub fn from_exact<R: Rng + ?Sized>(state: &ChainState, tie_rng: &mut R) -> Result<Self> {
        let eta = state.eta.ok_or_else(|| Error::invalid("handoff needs at least one exact step"))?;
        let mut s = state.clone();
        let pending = s.decide(tie_rng);
        let log_tau = state.log_tau.max(0.0);
        Ok(Self {
            n: state.n,
            x: state.x,
            eta,
            pending,
            gamma_hat: log_tau / pow2(state.n),
            excess: state.t.log() - log_tau,
        })
    }

    pub fn log_tau(&self) -> f64 {
        if self.gamma_hat == 0.0 {
            0.0
        } else {
            self.gamma_hat * pow2(self.n)
        }
    }

    pub fn log_t(&self) -> f64 {
        self.log_tau() + self.excess
    }

    /// Move, draw `S'` for the next duration, then decide the following move
    /// with a fresh normal `Z`: it reverses iff `Z √S' > 1`.
    pub fn step<R: Rng + ?Sized>(&mut self, opts: &AsymptoticOptions, rng: &mut R) -> AsymptoticStep {
        let dir = self.pending;
        let turn = dir != self.eta;
        self.x += dir.sign();
        self.eta = dir;

        let s = match opts.forced_s {
            Some(s) => s,
            None => {
                let z: f64 = StandardNormal.sample(rng);
                1.0 / (z * z)
            }
        };
        let increment = (opts.lambda * s / 2.0).ln();
        let old = self.gamma_hat;
        let new = (old + increment / pow2(self.n + 1)).max(0.0);
        // log τ_n − log τ_{n+1}
        let drop = scaled_gap(old, new, self.n);
        self.excess = (self.excess + drop).exp().ln_1p();
        self.gamma_hat = new;

        let z: f64 = StandardNormal.sample(rng);
        let mut w = z * s.sqrt();
        if opts.z_correction {
            let z2: f64 = StandardNormal.sample(rng);
            w += (0.5 * drop).exp() * z2;
        }
        self.pending = if w > 1.0 { dir.reversed() } else { dir };
        self.n += 1;
        AsymptoticStep { turn, s }
    }
}
