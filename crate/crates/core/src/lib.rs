//! Monte Carlo laboratory for the critical greedy server on ℤ.
//!
//! A single server walks the integer lattice. Every site hosts a queue fed by
//! a Poisson stream of rate λ; the server empties its current queue at rate
//! μ = λ and then moves to the longer of the two neighbouring queues.
//!
//! The crate is split into:
//!
//! * [`hitting_time`]: the emptying time ζ(k) of a critical M/M/1 queue, its
//!   density and tail, exact and Lévy-approximate samplers, and the standard
//!   Lévy law.
//! * [`chain`]: the process observed at queue-emptying times, in an exact
//!   form, a renormalized asymptotic form, and a continuous-time event-driven
//!   oracle.
//! * [`experiments`]: seeded Monte Carlo estimators for the limiting
//!   constants (turning probability 1/4, doubly exponential growth, iterated
//!   logarithm scaling).
//! * [`cli`]: the command line front end.

pub mod chain;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod hitting_time;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
