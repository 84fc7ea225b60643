//! Command line front end.
//!
//! Every option can also come from a plain `key=value` file given with
//! `--config`; flags given on the command line win. The effective
//! configuration is echoed into every output file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::chain::{run_with, Mode, RunOptions, Trajectory, DEFAULT_HANDOFF};
use crate::experiments::{
    estimate_turning, lil_scaling, martingale_audit, nt_scaling, oracle_check, poisson_diff_distance, recurrence_stats,
    regime_stats, tau_growth_series, ChainSetup,
};
use crate::hitting_time::{
    ks_distance_to_levy, quarter_quadrature, CriticalQueueParams, HittingSampler, SamplingMethod,
};
use crate::rng::{stream, Purpose};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_STAT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_HORIZON: i32 = 3;

/// Significance level of the oracle agreement test.
const ORACLE_ALPHA: f64 = 0.001;

#[derive(Debug, Parser)]
#[command(name = "greedy-server", version, about = "Monte Carlo laboratory for the critical greedy server on ℤ")]
pub struct Cli {
    /// Plain-text `key=value` file supplying defaults for any option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed for all random streams.
    #[arg(long, global = true, env = "GSL_SEED")]
    pub seed: Option<u64>,
    /// Worker threads (default: number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Asymptotic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Asymptotic => Mode::Asymptotic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Exact,
    Levy,
    Auto,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate trajectories and write them to a file.
    Simulate(SimArgs),
    /// Run one of the estimators.
    Estimate(EstimateArgs),
    /// Compare the exact chain with the continuous-time simulation.
    OracleCheck(OracleArgs),
    /// Draw emptying times ζ(k).
    SampleZeta(ZetaArgs),
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub n_steps: Option<u64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub handoff_n: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// turning, tau-growth, martingale, lil, nt, recurrence, poisson-diff,
    /// levy-ks or quarter.
    pub name: String,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Step index or horizon, depending on the estimator.
    #[arg(long, visible_alias = "n-max")]
    pub n: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub handoff_n: Option<u64>,
    /// Initial queue length for levy-ks.
    #[arg(long)]
    pub k: Option<u64>,
    /// Poisson mean for poisson-diff.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Sample count for levy-ks and poisson-diff.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Service rate (default: equal to lambda).
    #[arg(long)]
    pub mu: Option<f64>,
    /// Horizon; at λ = μ, replicas whose third emptying comes later are
    /// counted as censored by both implementations.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub replicas: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
}

const KNOWN_KEYS: &[&str] = &[
    "lambda",
    "mu",
    "mode",
    "n_steps",
    "n",
    "n_max",
    "replicas",
    "seed",
    "handoff_n",
    "output",
    "format",
    "threads",
    "k",
    "kappa",
    "samples",
    "t_max",
    "method",
];

/// Parsed `key=value` file. Blank lines and `#` comments are ignored.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("config line {}: expected key=value", i + 1)))?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::invalid(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn get<T: std::str::FromStr>(&self, keys: &[&str]) -> Result<Option<T>> {
        for key in keys {
            if let Some(v) = self.values.get(*key) {
                return v
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::invalid(format!("config key {key}: cannot parse {v:?}")));
            }
        }
        Ok(None)
    }

    fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => T::from_str(v, true)
                .map(Some)
                .map_err(|_| Error::invalid(format!("config key {key}: unknown value {v:?}"))),
        }
    }
}

/// The effective settings of one invocation, after merging flags, the
/// config file and defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub estimator: Option<String>,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub mode: ModeArg,
    pub n: Option<u64>,
    pub n_replicas: Option<usize>,
    pub seed: u64,
    pub handoff_n: u64,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub k: Option<u64>,
    pub kappa: Option<f64>,
    pub samples: Option<usize>,
    pub t_max: Option<f64>,
    pub method: Option<MethodArg>,
}

fn positive_f(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

fn positive_u<T: PartialOrd + Default + std::fmt::Display + Copy>(name: &str, v: T) -> Result<T> {
    if v > T::default() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let mut cfg = RunConfig {
            command: String::new(),
            estimator: None,
            lambda: 1.0,
            mu: None,
            mode: ModeArg::Asymptotic,
            n: None,
            n_replicas: None,
            seed: cli.seed.or(file.get(&["seed"])?).unwrap_or(0),
            handoff_n: DEFAULT_HANDOFF,
            output_path: cli.output.clone().or(file.get(&["output"])?),
            format: cli.format.or(file.get_enum("format")?),
            threads: cli.threads.or(file.get(&["threads"])?),
            k: None,
            kappa: None,
            samples: None,
            t_max: None,
            method: None,
        };
        let lambda = |flag: Option<f64>| -> Result<f64> { Ok(flag.or(file.get(&["lambda"])?).unwrap_or(1.0)) };
        let replicas = |flag: Option<usize>| -> Result<Option<usize>> { Ok(flag.or(file.get(&["replicas"])?)) };
        let mode = |flag: Option<ModeArg>, default: ModeArg| -> Result<ModeArg> {
            Ok(flag.or(file.get_enum("mode")?).unwrap_or(default))
        };
        let handoff =
            |flag: Option<u64>| -> Result<u64> { Ok(flag.or(file.get(&["handoff_n"])?).unwrap_or(DEFAULT_HANDOFF)) };
        match &cli.command {
            Command::Simulate(a) => {
                cfg.command = "simulate".into();
                cfg.lambda = lambda(a.lambda)?;
                cfg.mode = mode(a.mode, ModeArg::Asymptotic)?;
                cfg.n = a.n_steps.or(file.get(&["n_steps", "n"])?).or(Some(20));
                cfg.n_replicas = replicas(a.replicas)?.or(Some(1));
                cfg.handoff_n = handoff(a.handoff_n)?;
            }
            Command::Estimate(a) => {
                cfg.command = "estimate".into();
                cfg.estimator = Some(a.name.clone());
                cfg.lambda = lambda(a.lambda)?;
                cfg.mode = mode(a.mode, ModeArg::Asymptotic)?;
                cfg.n = a.n.or(file.get(&["n", "n_max", "n_steps"])?);
                cfg.n_replicas = replicas(a.replicas)?;
                cfg.handoff_n = handoff(a.handoff_n)?;
                cfg.k = a.k.or(file.get(&["k"])?);
                cfg.kappa = a.kappa.or(file.get(&["kappa"])?);
                cfg.samples = a.samples.or(file.get(&["samples"])?);
            }
            Command::OracleCheck(a) => {
                cfg.command = "oracle-check".into();
                cfg.lambda = lambda(a.lambda)?;
                cfg.mu = Some(a.mu.or(file.get(&["mu"])?).unwrap_or(cfg.lambda));
                cfg.t_max = a.t_max.or(file.get(&["t_max"])?);
                cfg.n_replicas = replicas(a.replicas)?;
            }
            Command::SampleZeta(a) => {
                cfg.command = "sample-zeta".into();
                cfg.lambda = lambda(a.lambda)?;
                cfg.k = a.k.or(file.get(&["k"])?).or(Some(1));
                cfg.samples = a.samples.or(file.get(&["samples"])?).or(Some(10));
                cfg.method = a.method.or(file.get_enum("method")?).or(Some(MethodArg::Auto));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        positive_f("lambda", self.lambda)?;
        if let Some(mu) = self.mu {
            positive_f("mu", mu)?;
        }
        if let Some(n) = self.n {
            positive_u("n", n)?;
        }
        if let Some(r) = self.n_replicas {
            positive_u("replicas", r)?;
        }
        positive_u("handoff_n", self.handoff_n)?;
        if let Some(t) = self.threads {
            positive_u("threads", t)?;
        }
        if let Some(k) = self.kappa {
            positive_f("kappa", k)?;
        }
        if let Some(s) = self.samples {
            positive_u("samples", s)?;
        }
        if let Some(t) = self.t_max {
            positive_f("t_max", t)?;
        }
        Ok(())
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    fn setup(&self) -> ChainSetup {
        ChainSetup { lambda: self.lambda, handoff_n: self.handoff_n, ..ChainSetup::default() }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::HorizonExceeded { .. } | Error::BudgetExceeded { .. } => EXIT_HORIZON,
        _ => EXIT_VALIDATION,
    }
}

fn open_output(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T, cfg: &RunConfig) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("config".into(), cfg.echo());
    } else {
        v = json!({ "result": v, "config": cfg.echo() });
    }
    let mut w = open_output(path)?;
    serde_json::to_writer_pretty(&mut w, &v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig) -> Result<i32> {
    let n_steps = cfg.n.expect("resolved");
    let replicas = cfg.n_replicas.expect("resolved");
    let format = cfg.format.unwrap_or(Format::Jsonl);
    let ext = if format == Format::Csv { "csv" } else { "jsonl" };
    let path = cfg.output_path.clone().unwrap_or_else(|| PathBuf::from(format!("trajectory_seed{}.{ext}", cfg.seed)));
    let mut trajs: Vec<Trajectory> = Vec::with_capacity(replicas);
    for replica in 0..replicas as u64 {
        let opts = RunOptions {
            handoff_n: cfg.handoff_n,
            replica,
            lambda: cfg.lambda,
            ..RunOptions::new(n_steps, cfg.mode.into(), cfg.seed)
        };
        let mut t = run_with(&opts)?;
        t.meta.config = Some(cfg.echo());
        trajs.push(t);
    }
    let mut w = open_output(&path)?;
    for t in &trajs {
        match format {
            Format::Csv => t.write_csv(&mut w)?,
            Format::Json | Format::Jsonl => t.write_jsonl(&mut w)?,
        }
    }
    w.flush()?;
    for t in &trajs {
        let last = t.records.last().expect("n_steps ≥ 1");
        println!("replica {}: final x = {}, log T = {:.6}, turns = {}", t.meta.replica, last.x, last.log_t, t.turns());
    }
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}

fn need<T>(v: Option<T>, default: T) -> T {
    v.unwrap_or(default)
}

fn cmd_estimate(cfg: &RunConfig) -> Result<i32> {
    let name = cfg.estimator.as_deref().unwrap_or("");
    let setup = cfg.setup();
    let mode: Mode = cfg.mode.into();
    let seed = cfg.seed;
    let out = cfg.output_path.as_deref();
    let csv = cfg.format == Some(Format::Csv);
    let write_series = |series: &crate::experiments::ScalingSeries, full: &dyn erased::Value| -> Result<()> {
        if let Some(p) = out {
            if csv {
                let mut w = open_output(p)?;
                writeln!(w, "# {}", serde_json::to_string(&cfg.echo())?)?;
                w.write_all(series.to_csv().as_bytes())?;
                w.flush()?;
            } else {
                write_json(p, &full.json(), cfg)?;
            }
        }
        Ok(())
    };
    match name {
        "quarter" => {
            let q = quarter_quadrature();
            println!("{q:.6} (target 0.25)");
            if let Some(p) = out {
                write_json(p, &json!({ "label": "quarter", "point": q, "target": 0.25 }), cfg)?;
            }
        }
        "turning" => {
            let e = estimate_turning(need(cfg.n, 20), need(cfg.n_replicas, 10_000), mode, seed, &setup)?;
            println!(
                "turn frequency {:.6} ± {:.6} at n = {} (target 0.25, z = {:.2})",
                e.point,
                e.stderr,
                need(cfg.n, 20),
                e.z_score(0.25)
            );
            if let Some(p) = out {
                write_json(p, &e, cfg)?;
            }
        }
        "tau-growth" => {
            let n = need(cfg.n, 50);
            let g = tau_growth_series(n, need(cfg.n_replicas, 1000), seed, &setup)?;
            let last = g.series.grid.last().expect("n ≥ 1");
            println!(
                "log log tau_n / n = {:.6} ± {:.6} at n = {n} (target log 2 = {:.6})",
                last.value,
                last.stderr,
                std::f64::consts::LN_2
            );
            write_series(&g.series, &g)?;
        }
        "martingale" => {
            let n = need(cfg.n, 20);
            let a = martingale_audit(n, need(cfg.n_replicas, 10_000), mode, seed, &setup)?;
            let r = a.row(n).expect("row n");
            println!(
                "E[dY^2] = {:.6} ± {:.6}, E[dY] = {:.6} ± {:.6}, max |dY| = {} at n = {n} (target 3)",
                r.second_moment, r.second_stderr, r.mean_increment, r.mean_stderr, r.max_abs_increment
            );
            if let Some(p) = out {
                write_json(p, &a, cfg)?;
            }
        }
        "lil" => {
            let l = lil_scaling(need(cfg.n, 100_000), need(cfg.n_replicas, 1000), seed, &setup)?;
            println!(
                "median max |X_n|/sqrt(6 n log log n) = {:.6} (limsup 1; in time: sqrt(6/log 2) = {:.4})",
                l.median,
                (6.0 / std::f64::consts::LN_2).sqrt()
            );
            write_series(&l.series, &l)?;
        }
        "nt" => {
            let n = need(cfg.n, 40);
            let s = nt_scaling(n, need(cfg.n_replicas, 1000), seed, &setup)?;
            let last = s.grid.last().expect("n ≥ 2");
            println!(
                "n / log log T_n = {:.6} ± {:.6} at n = {n} (target 1/log 2 = {:.6})",
                last.value,
                last.stderr,
                1.0 / std::f64::consts::LN_2
            );
            write_series(&s, &s)?;
        }
        "recurrence" => {
            let r = recurrence_stats(need(cfg.n, 10_000), need(cfg.n_replicas, 1000), seed, &setup)?;
            println!(
                "returns to 0: {:.4} ± {:.4}; late sign change fraction {:.4} ± {:.4}",
                r.returns.point, r.returns.stderr, r.sign_change.point, r.sign_change.stderr
            );
            if let Some(p) = out {
                write_json(p, &r, cfg)?;
            }
        }
        "poisson-diff" => {
            let d = poisson_diff_distance(need(cfg.kappa, 1e4), need(cfg.samples, 1_000_000), seed)?;
            println!("sup distance {:.6} at kappa = {}", d.ks_statistic, need(cfg.kappa, 1e4));
            if let Some(p) = out {
                write_json(p, &d, cfg)?;
            }
        }
        "levy-ks" => {
            let k = need(cfg.k, 50);
            let d = ks_distance_to_levy(k, cfg.lambda, need(cfg.samples, 100_000), seed)?;
            println!("KS distance {:.6} ± {:.6} at k = {k}", d.ks_statistic, d.mc_stderr);
            if let Some(p) = out {
                write_json(p, &d, cfg)?;
            }
        }
        other => return Err(Error::invalid(format!("unknown estimator {other:?}"))),
    }
    Ok(EXIT_OK)
}

fn cmd_oracle_check(cfg: &RunConfig) -> Result<i32> {
    let mu = cfg.mu.expect("resolved");
    if (mu - cfg.lambda).abs() > 0.0 {
        let t_max = cfg.t_max.unwrap_or(1e3);
        let r = regime_stats(cfg.lambda, mu, t_max, cfg.n_replicas.unwrap_or(1000), cfg.seed)?;
        println!(
            "lambda = {}, mu = {}: stuck fraction (< {} moves by t = {t_max}) {:.4}; median direction changes {}",
            cfg.lambda, mu, r.stuck_moves, r.stuck_fraction, r.median_direction_changes
        );
        if let Some(p) = &cfg.output_path {
            write_json(p, &r, cfg)?;
        }
        return Ok(EXIT_OK);
    }
    let t_cut = cfg.t_max.unwrap_or(1e9);
    let c = oracle_check(cfg.n_replicas.unwrap_or(10_000), cfg.seed, cfg.lambda, t_cut)?;
    println!(
        "first four sites: chi2 = {:.4}, dof = {}, p = {:.6}; X_4: chi2 = {:.4}, dof = {}, p = {:.6}",
        c.sites_test.statistic,
        c.sites_test.dof,
        c.sites_test.p_value,
        c.x4_test.statistic,
        c.x4_test.dof,
        c.x4_test.p_value
    );
    if let Some(p) = &cfg.output_path {
        write_json(p, &c, cfg)?;
    }
    Ok(if c.passed(ORACLE_ALPHA) { EXIT_OK } else { EXIT_STAT_FAILURE })
}

fn cmd_sample_zeta(cfg: &RunConfig) -> Result<i32> {
    let method = match cfg.method.expect("resolved") {
        MethodArg::Exact => SamplingMethod::ExactWalk,
        MethodArg::Levy => SamplingMethod::LevyApprox,
        MethodArg::Auto => SamplingMethod::Auto,
    };
    let k = cfg.k.expect("resolved");
    let sampler = HittingSampler::new(CriticalQueueParams::new(cfg.lambda)?, method);
    let mut rng = stream(cfg.seed, k, Purpose::Sampler);
    let draws =
        (0..cfg.samples.expect("resolved")).map(|_| sampler.sample(k, &mut rng)).collect::<Result<Vec<f64>>>()?;
    match &cfg.output_path {
        Some(p) => {
            let mut w = open_output(p)?;
            if cfg.format == Some(Format::Csv) {
                writeln!(w, "# {}", serde_json::to_string(&cfg.echo())?)?;
                writeln!(w, "zeta")?;
                for d in &draws {
                    writeln!(w, "{d:?}")?;
                }
                w.flush()?;
            } else {
                drop(w);
                write_json(p, &json!({ "k": k, "method": sampler.resolve(k), "samples": draws }), cfg)?;
            }
        }
        None => {
            for d in &draws {
                println!("{d:?}");
            }
        }
    }
    Ok(EXIT_OK)
}

/// Serialize heterogeneous results behind one reference.
mod erased {
    pub trait Value {
        fn json(&self) -> serde_json::Value;
    }

    impl<T: serde::Serialize> Value for T {
        fn json(&self) -> serde_json::Value {
            serde_json::to_value(self).expect("result serializes")
        }
    }
}

fn dispatch(cfg: &RunConfig) -> Result<i32> {
    if let Some(t) = cfg.threads {
        // only the first call in a process can size the global pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match cfg.command.as_str() {
        "simulate" => cmd_simulate(cfg),
        "estimate" => cmd_estimate(cfg),
        "oracle-check" => cmd_oracle_check(cfg),
        "sample-zeta" => cmd_sample_zeta(cfg),
        other => Err(Error::invalid(format!("unknown command {other}"))),
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::resolve(&cli).and_then(|cfg| {
        eprintln!("config: {}", serde_json::to_string(&cfg.echo())?);
        dispatch(&cfg)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let f = ConfigFile::parse("# comment\nlambda = 2.5\nn-steps=7\n\nmode=exact\n").unwrap();
        assert_eq!(f.get::<f64>(&["lambda"]).unwrap(), Some(2.5));
        assert_eq!(f.get::<u64>(&["n_steps"]).unwrap(), Some(7));
        assert_eq!(f.get_enum::<ModeArg>("mode").unwrap(), Some(ModeArg::Exact));
        assert!(ConfigFile::parse("bogus=1").is_err());
        assert!(ConfigFile::parse("lambda").is_err());
        assert!(ConfigFile::parse("lambda=abc").unwrap().get::<f64>(&["lambda"]).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "lambda=3\nn_steps=9\nseed=5\n").unwrap();
        let cli =
            Cli::try_parse_from(["greedy-server", "--config", path.to_str().unwrap(), "simulate", "--lambda", "2"])
                .unwrap();
        let cfg = RunConfig::resolve(&cli).unwrap();
        assert_eq!(cfg.lambda, 2.0);
        assert_eq!(cfg.n, Some(9));
        assert_eq!(cfg.seed, 5);
    }

    #[test]
    fn validation_errors() {
        let cli = Cli::try_parse_from(["greedy-server", "simulate", "--n-steps", "0"]).unwrap();
        assert!(RunConfig::resolve(&cli).is_err());
        let cli = Cli::try_parse_from(["greedy-server", "oracle-check", "--replicas", "0"]).unwrap();
        assert!(RunConfig::resolve(&cli).is_err());
    }
}
