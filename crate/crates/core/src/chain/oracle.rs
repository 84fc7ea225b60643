use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use super::state::Direction;
use crate::rng::{stream, Purpose, StreamRng};
use crate::{Error, Result};

/// Settings of the event-driven simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub lambda: f64,
    pub mu: f64,
    pub t_max: f64,
    /// Stop after this many emptyings (counting the one at time 0).
    pub max_emptyings: Option<usize>,
    /// Queues at least this long are served in blocks of `len − 1` events.
    pub leap_threshold: u64,
    /// Keep the full event list; otherwise only departures are kept.
    pub log_events: bool,
}

impl OracleConfig {
    pub fn new(t_max: f64, lambda: f64, mu: f64) -> Self {
        Self { lambda, mu, t_max, max_emptyings: None, leap_threshold: 64, log_events: true }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda", self.lambda), ("mu", self.mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::invalid(format!("t_max must be finite and nonnegative, got {}", self.t_max)));
        }
        if self.leap_threshold < 2 {
            return Err(Error::invalid("leap_threshold must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    /// A customer joins the queue being served.
    Arrival { site: i64 },
    /// The server finishes a customer without emptying the queue.
    ServiceCompletion { site: i64 },
    /// A block of events at a long queue, stamped with the time of its last
    /// event.
    ServiceBatch { site: i64, arrivals: u64, completions: u64 },
    /// The queue at `from` is empty; the server leaves for `to`. The
    /// completion that empties a queue is recorded as this event.
    Departure { from: i64, to: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Output of [`continuous_oracle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub config: OracleConfig,
    pub seed: u64,
    pub events: Vec<Event>,
    /// `(T_n, X_n)` for every emptying, starting with `(0, 0)`.
    pub emptyings: Vec<(f64, i64)>,
    /// The move decided at each emptying (same length as `emptyings`).
    pub decisions: Vec<Direction>,
    /// Moves whose unit travel finished by `t_max`.
    pub moves_completed: usize,
}

impl EventLog {
    /// Sites emptied at steps `1, 2, …` (the start at 0 excluded).
    pub fn emptied_sites(&self) -> Vec<i64> {
        self.emptyings.iter().skip(1).map(|&(_, x)| x).collect()
    }

    /// Reversals among completed moves.
    pub fn direction_changes(&self) -> usize {
        let moves = &self.decisions[..self.moves_completed.min(self.decisions.len())];
        moves.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

struct Site {
    count: u64,
    updated: f64,
}

struct Oracle<'a> {
    cfg: &'a OracleConfig,
    rng: StreamRng,
    tie: StreamRng,
    sites: HashMap<i64, Site>,
}

impl Oracle<'_> {
    /// Bring the lazily realized arrivals at `site` up to time `t`.
    fn refresh(&mut self, site: i64, t: f64) -> u64 {
        let lambda = self.cfg.lambda;
        let s = self.sites.entry(site).or_insert(Site { count: 0, updated: 0.0 });
        let dt = t - s.updated;
        if dt > 0.0 {
            let mean = lambda * dt;
            let add: f64 = Poisson::new(mean).expect("positive mean").sample(&mut self.rng);
            s.count += add as u64;
            s.updated = t;
        }
        s.count
    }
}

/// Event-driven simulation of the greedy server with arrival rate λ at every
/// site, exponential service at rate μ, unit travel time and fair ties.
///
/// Arrivals at sites other than the one being served are realized lazily: a
/// site's backlog is drawn when it is next looked at.
pub fn continuous_oracle(cfg: &OracleConfig, seed: u64, replica: u64) -> Result<EventLog> {
    cfg.validate()?;
    let mut o = Oracle {
        cfg,
        rng: stream(seed, replica, Purpose::Oracle),
        tie: stream(seed, replica, Purpose::Tie),
        sites: HashMap::new(),
    };
    let total = cfg.lambda + cfg.mu;
    let p_arrival = cfg.lambda / total;
    let hold = Exp::new(total).expect("positive rate");
    let max_emptyings = cfg.max_emptyings.unwrap_or(usize::MAX);

    let mut events = Vec::new();
    let mut emptyings = Vec::new();
    let mut decisions = Vec::new();
    let mut moves_completed = 0;
    let mut x = 0i64;
    let mut t = 0.0f64;

    loop {
        // the queue at x is empty at time t
        emptyings.push((t, x));
        let right = o.refresh(x + 1, t);
        let left = o.refresh(x - 1, t);
        let dir = match right.cmp(&left) {
            std::cmp::Ordering::Greater => Direction::Right,
            std::cmp::Ordering::Less => Direction::Left,
            std::cmp::Ordering::Equal => Direction::fair(&mut o.tie),
        };
        decisions.push(dir);
        let to = x + dir.sign();
        events.push(Event { time: t, kind: EventKind::Departure { from: x, to } });
        if emptyings.len() >= max_emptyings || t + 1.0 > cfg.t_max {
            break;
        }
        moves_completed += 1;
        t += 1.0;
        x = to;
        let mut z = o.refresh(x, t);

        while z > 0 {
            if z >= cfg.leap_threshold {
                let block = z - 1;
                let dt: f64 = Gamma::new(block as f64, 1.0 / total).expect("valid gamma").sample(&mut o.rng);
                if t + dt > cfg.t_max {
                    break;
                }
                t += dt;
                let arrivals = Binomial::new(block, p_arrival).expect("valid binomial").sample(&mut o.rng);
                let completions = block - arrivals;
                z = z + arrivals - completions;
                if cfg.log_events {
                    events.push(Event { time: t, kind: EventKind::ServiceBatch { site: x, arrivals, completions } });
                }
            } else {
                let dt = hold.sample(&mut o.rng);
                if t + dt > cfg.t_max {
                    break;
                }
                t += dt;
                if o.rng.random::<f64>() < p_arrival {
                    z += 1;
                    if cfg.log_events {
                        events.push(Event { time: t, kind: EventKind::Arrival { site: x } });
                    }
                } else {
                    z -= 1;
                    if z > 0 && cfg.log_events {
                        events.push(Event { time: t, kind: EventKind::ServiceCompletion { site: x } });
                    }
                }
            }
        }
        let s = o.sites.get_mut(&x).expect("served site exists");
        s.count = z;
        s.updated = t;
        if z > 0 {
            break;
        }
    }

    Ok(EventLog { config: *cfg, seed, events, emptyings, decisions, moves_completed })
}
