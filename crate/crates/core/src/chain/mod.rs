//! The server observed at its queue-emptying times.
//!
//! Three interoperating forms are provided:
//!
//! * exact steps on a sparse map of integer queue lengths ([`ChainState`]),
//!   usable until the Poisson means leave the exact integer range;
//! * a renormalized recursion on `(log τ, log T, x, η)` driven by i.i.d.
//!   Lévy and normal variates ([`AsymptoticState`]), usable for any number
//!   of steps;
//! * an event-driven continuous-time simulation ([`continuous_oracle`]) used
//!   as an independent check of the exact steps.

mod asymptotic;
mod logscalar;
mod oracle;
mod poisson;
mod state;
mod trajectory;

pub use asymptotic::{AsymptoticOptions, AsymptoticState, AsymptoticStep};
pub use logscalar::LogScalar;
pub use oracle::{continuous_oracle, Event, EventKind, EventLog, OracleConfig};
pub use poisson::{sample_poisson, PoissonDraw, EXACT_MEAN_LIMIT, GAUSSIAN_MEAN_THRESHOLD};
pub use state::{next_direction, ApproximationFlags, ChainState, Direction, SiteState};
pub use trajectory::{
    run, run_with, ChainRunner, Mode, RunOptions, StepRecord, Trajectory, TrajectoryMeta, DEFAULT_HANDOFF,
};
