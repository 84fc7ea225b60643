use std::io::Write;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::asymptotic::{AsymptoticOptions, AsymptoticState};
use super::state::{ApproximationFlags, ChainState, Direction};
use crate::hitting_time::{CriticalQueueParams, HittingSampler, DEFAULT_AUTO_THRESHOLD};
use crate::rng::ChainRng;
use crate::{Error, Result};

/// How a trajectory was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact steps throughout.
    Exact,
    /// Exact steps up to the handoff, renormalized recursion afterwards.
    Asymptotic,
    /// The correlated walk with a fixed turn probability (no times).
    Reference,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "asymptotic" => Ok(Mode::Asymptotic),
            "reference" => Ok(Mode::Reference),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

mod finite_or_null {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// The server's state right after its `n`-th emptying.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: u64,
    pub x: i64,
    pub eta: Direction,
    /// `η_n ≠ η_{n−1}`; false for the first move.
    pub turn: bool,
    /// Natural log of `τ_n`; `null` when it leaves double range or is undefined.
    #[serde(with = "finite_or_null")]
    pub log_tau: f64,
    /// Natural log of `T_n`; `null` when it leaves double range or is undefined.
    #[serde(rename = "log_T", with = "finite_or_null")]
    pub log_t: f64,
}

/// Everything needed to reproduce a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub mode: Mode,
    pub seed: u64,
    pub replica: u64,
    pub lambda: f64,
    pub n_steps: u64,
    pub handoff_n: Option<u64>,
    /// Step at which the renormalized recursion actually took over.
    pub handoff_at: Option<u64>,
    /// The exact horizon was hit before `handoff_n`.
    pub early_handoff: bool,
    pub flags: ApproximationFlags,
    pub z_correction: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub turn_prob: Option<f64>,
    /// Free-form echo of the invoking configuration.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub meta: TrajectoryMeta,
    pub records: Vec<StepRecord>,
}

/// Parameters of [`run_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub n_steps: u64,
    pub mode: Mode,
    pub handoff_n: u64,
    pub seed: u64,
    pub replica: u64,
    pub lambda: f64,
    /// Queues up to this length are emptied with the exact walk sampler.
    pub walk_threshold: u64,
    pub z_correction: bool,
    /// Passed to the emptying-time sampler; exceeding it is a
    /// `BudgetExceeded` error.
    #[serde(default)]
    pub zeta_time_budget: Option<f64>,
}

pub const DEFAULT_HANDOFF: u64 = 6;

impl RunOptions {
    pub fn new(n_steps: u64, mode: Mode, seed: u64) -> Self {
        Self {
            n_steps,
            mode,
            handoff_n: DEFAULT_HANDOFF,
            seed,
            replica: 0,
            lambda: 1.0,
            walk_threshold: DEFAULT_AUTO_THRESHOLD,
            z_correction: false,
            zeta_time_budget: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::invalid("n_steps must be at least 1"));
        }
        CriticalQueueParams::new(self.lambda)?;
        if self.mode == Mode::Asymptotic && self.handoff_n == 0 {
            return Err(Error::invalid("handoff_n must be at least 1"));
        }
        if self.mode == Mode::Reference {
            return Err(Error::invalid("reference walks are produced by the experiments module"));
        }
        Ok(())
    }
}

enum Phase {
    Exact(ChainState),
    Asymptotic(AsymptoticState),
}

/// Step-by-step driver for one replica: exact steps, then (in asymptotic
/// mode) the renormalized recursion from the handoff onwards.
pub struct ChainRunner {
    opts: RunOptions,
    sampler: HittingSampler,
    asym: AsymptoticOptions,
    rng: ChainRng,
    phase: Phase,
    prev_eta: Option<Direction>,
    flags: ApproximationFlags,
    handoff_at: Option<u64>,
    early_handoff: bool,
}

impl ChainRunner {
    pub fn new(opts: RunOptions) -> Result<Self> {
        opts.validate()?;
        let params = CriticalQueueParams::new(opts.lambda)?;
        let mut sampler = HittingSampler::auto(params).with_threshold(opts.walk_threshold);
        sampler.time_budget = opts.zeta_time_budget;
        Ok(Self {
            opts,
            sampler,
            asym: AsymptoticOptions { z_correction: opts.z_correction, ..AsymptoticOptions::new(opts.lambda) },
            rng: ChainRng::new(opts.seed, opts.replica),
            phase: Phase::Exact(ChainState::init()),
            prev_eta: None,
            flags: ApproximationFlags::default(),
            handoff_at: None,
            early_handoff: false,
        })
    }

    /// Override the renormalized-step switches (e.g. the forced `S` hook).
    pub fn with_asymptotic_options(mut self, asym: AsymptoticOptions) -> Self {
        self.asym = asym;
        self
    }

    pub fn n(&self) -> u64 {
        match &self.phase {
            Phase::Exact(s) => s.n,
            Phase::Asymptotic(a) => a.n,
        }
    }

    pub fn flags(&self) -> ApproximationFlags {
        self.flags
    }

    pub fn handoff_at(&self) -> Option<u64> {
        self.handoff_at
    }

    pub fn early_handoff(&self) -> bool {
        self.early_handoff
    }

    /// The exact state, while still in the exact phase.
    pub fn exact_state(&self) -> Option<&ChainState> {
        match &self.phase {
            Phase::Exact(s) => Some(s),
            Phase::Asymptotic(_) => None,
        }
    }

    pub fn asymptotic_state(&self) -> Option<&AsymptoticState> {
        match &self.phase {
            Phase::Exact(_) => None,
            Phase::Asymptotic(a) => Some(a),
        }
    }

    /// The move the next step will make. Deciding it consumes a tie draw
    /// if the neighbouring queues are equal, exactly as the next step would.
    pub fn next_direction(&mut self) -> Direction {
        match &mut self.phase {
            Phase::Exact(s) => s.decide(&mut self.rng.tie),
            Phase::Asymptotic(a) => a.pending,
        }
    }

    fn hand_off(&mut self, state: &ChainState, early: bool) -> Result<()> {
        let a = AsymptoticState::from_exact(state, &mut self.rng.tie)?;
        self.handoff_at = Some(state.n);
        self.early_handoff = early;
        self.phase = Phase::Asymptotic(a);
        Ok(())
    }

    fn record(&mut self, n: u64, x: i64, eta: Direction, log_tau: f64, log_t: f64) -> StepRecord {
        let turn = self.prev_eta.is_some_and(|p| p != eta);
        self.prev_eta = Some(eta);
        StepRecord { n, x, eta, turn, log_tau, log_t }
    }

    /// Advance one emptying.
    pub fn step(&mut self) -> Result<StepRecord> {
        if let Phase::Exact(state) = &mut self.phase {
            let handoff_due = self.opts.mode == Mode::Asymptotic && state.n >= self.opts.handoff_n;
            if !handoff_due {
                // keep the tie draw on the stored state even if the step fails
                state.decide(&mut self.rng.tie);
                match state.step_exact(&self.sampler, &mut self.rng) {
                    Ok(next) => {
                        self.flags.merge(next.flags);
                        let rec = self.record(next.n, next.x, next.eta.expect("moved"), next.log_tau, next.t.log());
                        self.phase = Phase::Exact(next);
                        return Ok(rec);
                    }
                    Err(Error::HorizonExceeded { .. }) if self.opts.mode == Mode::Asymptotic && state.n >= 1 => {
                        let state = state.clone();
                        self.hand_off(&state, true)?;
                    }
                    Err(e) => return Err(e),
                }
            } else {
                let state = state.clone();
                self.hand_off(&state, false)?;
            }
        }
        let Phase::Asymptotic(a) = &mut self.phase else { unreachable!() };
        a.step(&self.asym, &mut self.rng.main);
        let a = *a;
        Ok(self.record(a.n, a.x, a.eta, a.log_tau(), a.log_t()))
    }

    pub fn meta(&self) -> TrajectoryMeta {
        TrajectoryMeta {
            mode: self.opts.mode,
            seed: self.opts.seed,
            replica: self.opts.replica,
            lambda: self.opts.lambda,
            n_steps: self.opts.n_steps,
            handoff_n: (self.opts.mode == Mode::Asymptotic).then_some(self.opts.handoff_n),
            handoff_at: self.handoff_at,
            early_handoff: self.early_handoff,
            flags: self.flags,
            z_correction: self.asym.z_correction,
            turn_prob: None,
            config: None,
        }
    }
}

/// Simulate `n_steps` emptyings with default λ = 1 and replica 0.
pub fn run(n_steps: u64, mode: Mode, handoff_n: u64, seed: u64) -> Result<Trajectory> {
    run_with(&RunOptions { handoff_n, ..RunOptions::new(n_steps, mode, seed) })
}

pub fn run_with(opts: &RunOptions) -> Result<Trajectory> {
    let mut runner = ChainRunner::new(*opts)?;
    let mut records = Vec::with_capacity(opts.n_steps as usize);
    for _ in 0..opts.n_steps {
        records.push(runner.step()?);
    }
    Ok(Trajectory { meta: runner.meta(), records })
}

impl Trajectory {
    /// `T_n` for `n = 0, …, len`.
    fn time(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.records[n - 1].log_t.exp()
        }
    }

    fn position(&self, n: usize) -> i64 {
        if n == 0 {
            0
        } else {
            self.records[n - 1].x
        }
    }

    /// `N_t` for `t = exp(log_t_query)`: the number of emptyings by then.
    pub fn count_emptied(&self, log_t_query: f64) -> u64 {
        self.records.partition_point(|r| r.log_t <= log_t_query) as u64
    }

    /// The server's position at time `t`: at `X_{N_t}` at the emptying time,
    /// moving linearly towards `X_{N_t+1}` during the unit travel, and sitting
    /// there afterwards.
    pub fn server_position(&self, t_query: f64) -> Result<f64> {
        if self.meta.mode != Mode::Exact {
            return Err(Error::invalid("server positions are only defined for exact trajectories"));
        }
        let last = self.records.len();
        let t_end = self.time(last);
        if !(0.0..=t_end).contains(&t_query) {
            return Err(Error::OutOfRange { query: t_query, limit: t_end });
        }
        let nt = self.count_emptied(t_query.ln()) as usize;
        if nt == last {
            return Ok(self.position(last) as f64);
        }
        let from = self.position(nt) as f64;
        let to = self.position(nt + 1) as f64;
        let s = t_query - self.time(nt);
        Ok(if s >= 1.0 { to } else { from + s * (to - from) })
    }

    /// One metadata line `{"meta": …}` followed by one JSON object per step.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &serde_json::json!({ "meta": self.meta }))?;
        writeln!(w)?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// A `# {meta}` comment line, a header row, then one row per step.
    /// Undefined log values are left empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {}", serde_json::to_string(&self.meta)?)?;
        writeln!(w, "n,x,eta,turn,log_tau,log_T")?;
        let cell = |v: f64| if v.is_finite() { format!("{v:?}") } else { String::new() };
        for r in &self.records {
            writeln!(w, "{},{},{},{},{},{}", r.n, r.x, r.eta.sign(), r.turn, cell(r.log_tau), cell(r.log_t))?;
        }
        Ok(())
    }

    /// Number of direction reversals.
    pub fn turns(&self) -> usize {
        self.records.iter().filter(|r| r.turn).count()
    }
}
