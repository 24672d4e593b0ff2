//! Command-line front end.
//!
//! Configuration is one JSON file. Every field is optional: the file is
//! merged over [`CliConfig::default`], the reference market at `tau = 2`,
//! `c2 = 1`, `F = 10`. Exit codes: 0 success, 2 usage or configuration
//! error, 3 solver or I/O failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{CustomerResponse, FeeModel, MarketParams, SignalSpec};
use crate::dynamics::{FeedbackLoop, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::experiments::{
    compare, cyclic_vs_stationary, persist, reproduce, sweep, table_stem, ExperimentConfig, Manifest, TableId,
};
use crate::m1::{candidate, kkt_residual, solve_m1, M1Case, M1Solution};
use crate::m2::{check_lemma2, recoverability, solve_m2, M2Problem, M2Solution, RecoveryReport, SearchSpec, StructureReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "WOMOPS_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub schema: u32,
    pub params: MarketParams,
    pub fee_model: FeeModel,
    pub response: CustomerResponse,
    pub signal: SignalSpec,
    /// Membership fee for commands that take it as given.
    #[serde(rename = "F")]
    pub fee: f64,
    pub search: SearchSpec,
    pub experiment: ExperimentConfig,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            params: MarketParams {
                revenue: 8.0,
                shipment_cost: 2000.0,
                holding_cost: 4.0,
                max_delivery_time: 2.0,
                regular_demand: 50.0,
                membership_duration: 30.0,
                fee_min: 10.0,
                fee_max: 100.0,
            },
            fee_model: FeeModel::linear(100.0, 1.0, 5.0),
            response: CustomerResponse::new(1.0),
            signal: SignalSpec::Mdt,
            fee: 10.0,
            search: SearchSpec::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    // signals are enums; replace them wholesale
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn field_error(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidParams(m) | Error::InvalidPolicy(m) => Error::Config { path: path.into(), message: m },
        Error::Domain { fee, reason } => Error::Config { path: path.into(), message: format!("fee {fee}: {reason}") },
        other => other,
    }
}

impl CliConfig {
    /// Parses `text` over the defaults. Errors carry the JSON path of the
    /// offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let over: Value = serde_json::from_str(text)
            .map_err(|e| Error::Config { path: "<root>".into(), message: e.to_string() })?;
        if !over.is_object() {
            return Err(Error::Config { path: "<root>".into(), message: "config must be a JSON object".into() });
        }
        let mut merged = serde_json::to_value(CliConfig::default())?;
        merge(&mut merged, over);
        let cfg: CliConfig = serde_path_to_error::deserialize(merged)
            .map_err(|e| Error::Config { path: e.path().to_string(), message: e.inner().to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(CliConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Config {
                    path: p.display().to_string(),
                    message: e.to_string(),
                })?;
                Self::from_json(&text)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config {
                path: "schema".into(),
                message: format!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema),
            });
        }
        self.params.validate().map_err(|e| field_error("params", e))?;
        self.fee_model
            .validate_over(self.params.fee_min, self.params.fee_max)
            .map_err(|e| field_error("fee_model", e))?;
        self.response.validate().map_err(|e| field_error("response", e))?;
        self.signal.validate().map_err(|e| field_error("signal", e))?;
        if !(self.fee >= self.params.fee_min && self.fee <= self.params.fee_max) {
            return Err(Error::Config {
                path: "F".into(),
                message: format!(
                    "fee {} outside [f_min, f_max] = [{}, {}]",
                    self.fee, self.params.fee_min, self.params.fee_max
                ),
            });
        }
        self.search.validate().map_err(|e| field_error("search", e))?;
        self.experiment.validate().map_err(|e| field_error("experiment", e))
    }

    pub fn problem(&self) -> M2Problem {
        M2Problem {
            params: self.params,
            fee_model: self.fee_model,
            response: self.response,
            signal: self.signal.clone(),
        }
    }

    pub fn feedback_loop(&self) -> FeedbackLoop {
        FeedbackLoop {
            params: self.params,
            fee_model: self.fee_model,
            response: self.response,
            signal: self.signal.clone(),
            fee: self.fee,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "womops", version, about = "Shipment policy optimization under word-of-mouth demand feedback")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reactive policy for a given premium demand (JSON on stdout).
    SolveM1 {
        #[arg(long = "lambda-p")]
        lambda_p: f64,
        #[arg(short = 'c', long = "config")]
        config: Option<PathBuf>,
    },
    /// Joint policy and fee under the equilibrium constraint (JSON on stdout).
    SolveM2 {
        #[arg(short = 'c', long = "config")]
        config: Option<PathBuf>,
        /// Also replay the reactive dynamics at the optimal fee.
        #[arg(long)]
        recoverability: bool,
    },
    /// Demand trace without WoM knowledge (CSV on stdout, summary on stderr).
    Simulate {
        #[arg(short = 'c', long = "config")]
        config: Option<PathBuf>,
        /// Starting premium demand; defaults to the potential market c1(F).
        #[arg(long = "seed-lambda")]
        seed_lambda: Option<f64>,
        #[arg(long, default_value_t = 10)]
        iters: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Run all iterations even after convergence or a cycle is detected.
        #[arg(long)]
        no_early_stop: bool,
    },
    /// Regenerates a table and diffs it against the printed values.
    Reproduce {
        #[arg(long, value_parser = parse_table)]
        table: TableId,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(short = 'c', long = "config")]
        config: Option<PathBuf>,
    },
    /// Runs every combination of the experiment grids.
    Sweep {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(short = 'c', long = "config")]
        config: Option<PathBuf>,
    },
    /// Stationary optimum against the reactive long-run average (JSON on stdout).
    Cyclic {
        #[arg(short = 'c', long = "config")]
        config: Option<PathBuf>,
    },
}

fn parse_table(s: &str) -> std::result::Result<TableId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct M1Candidate {
    pub case: M1Case,
    pub policy: Option<crate::domain::ShipmentPolicy>,
    pub profit: Option<f64>,
    pub kkt_residual: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct M1Output {
    pub solution: M1Solution,
    pub candidates: Vec<M1Candidate>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct M2Output {
    pub solution: M2Solution,
    pub structure: StructureReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recoverability: Option<RecoveryReport>,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. }
        | Error::InvalidParams(_)
        | Error::InvalidPolicy(_)
        | Error::InvalidGrid(_)
        | Error::Domain { .. }
        | Error::ConfigMismatch { .. }
        | Error::UnsupportedSignal => 2,
        Error::RegimeViolation(_) | Error::InfeasibleProblem | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 3,
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| Error::Config {
        path: THREADS_ENV.into(),
        message: format!("expected a positive integer, got {v:?}"),
    })?;
    // a pool set up earlier in the same process is fine to keep
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn print_json<T: Serialize, W: Write>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Runs one parsed command, writing results to `out` and notes to `err`.
pub fn run<W: Write, E: Write>(cli: Cli, out: &mut W, err: &mut E) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::SolveM1 { lambda_p, config } => {
            let cfg = CliConfig::load(config.as_deref())?;
            let solution = solve_m1(&cfg.params, lambda_p).map_err(|e| field_error("--lambda-p", e))?;
            let mut candidates = Vec::new();
            for case in M1Case::ALL {
                // cases without a stationary point at this demand show as null
                let policy = candidate(case, &cfg.params, lambda_p).ok().flatten();
                candidates.push(M1Candidate {
                    case,
                    policy,
                    profit: policy.map(|p| crate::domain::profit_m1(&cfg.params, &p, lambda_p)).transpose()?,
                    kkt_residual: policy.map(|p| kkt_residual(case, &cfg.params, &p, lambda_p)),
                });
            }
            print_json(out, &M1Output { solution, candidates })
        }
        Command::SolveM2 { config, recoverability: with_recovery } => {
            let cfg = CliConfig::load(config.as_deref())?;
            let problem = cfg.problem();
            let solution = solve_m2(&problem, &cfg.search)?;
            let structure = check_lemma2(&problem, &solution);
            let recovery = if with_recovery { Some(recoverability(&problem, &solution)?) } else { None };
            print_json(out, &M2Output { solution, structure, recoverability: recovery })
        }
        Command::Simulate { config, seed_lambda, iters, tol, no_early_stop } => {
            let cfg = CliConfig::load(config.as_deref())?;
            let fl = cfg.feedback_loop();
            let seed = match seed_lambda {
                Some(s) => s,
                None => fl.potential()?,
            };
            let mut trace = fl.simulate(seed, iters, tol).map_err(|e| field_error("--seed-lambda", e))?;
            if no_early_stop && trace.rows.len() < iters + 1 {
                trace.rows = fl.iterate(seed, iters)?;
            }
            trace.write_csv(&mut *out)?;
            print_json(err, &trace.classification)
        }
        Command::Reproduce { table, out: dir, config } => {
            let cfg = CliConfig::load(config.as_deref())?;
            let dir = dir.unwrap_or_else(|| cfg.experiment.out_dir.clone());
            let start = Instant::now();
            let manifest = reproduce(&cfg.experiment, table)?;
            let stem = table_stem(table);
            let files = persist(&manifest, &dir, &stem)?;
            write_timing(&dir, &stem, start)?;
            writeln!(out, "wrote {}", files.csv.display())?;
            writeln!(out, "wrote {}", files.manifest.display())?;
            report(out, table, &manifest)
        }
        Command::Sweep { out: dir, config } => {
            let cfg = CliConfig::load(config.as_deref())?;
            let dir = dir.unwrap_or_else(|| cfg.experiment.out_dir.clone());
            let start = Instant::now();
            let rows = sweep(&cfg.experiment)?;
            let files = persist(&Manifest::new(None, &cfg.experiment, rows), &dir, "sweep")?;
            write_timing(&dir, "sweep", start)?;
            writeln!(out, "wrote {}", files.csv.display())?;
            writeln!(out, "wrote {}", files.manifest.display())?;
            Ok(())
        }
        Command::Cyclic { config } => {
            let cfg = CliConfig::load(config.as_deref())?;
            print_json(out, &cyclic_vs_stationary(&cfg.problem(), &cfg.search)?)
        }
    }
}

fn write_timing(dir: &Path, stem: &str, start: Instant) -> Result<()> {
    let v = serde_json::json!({ "wall_seconds": start.elapsed().as_secs_f64() });
    std::fs::write(dir.join(format!("{stem}.timing.json")), serde_json::to_vec_pretty(&v)?)?;
    Ok(())
}

fn report<W: Write>(out: &mut W, table: TableId, manifest: &Manifest) -> Result<()> {
    if let Some(run) = &manifest.trace {
        let trace = &run.trace;
        let expected: &[f64] = match table {
            TableId::T7 => &crate::experiments::reference::T7_LAMBDA,
            _ => &crate::experiments::reference::T8_LAMBDA,
        };
        let matched = trace
            .rows
            .iter()
            .zip(expected)
            .filter(|(r, e)| (r.lambda_p - **e).abs() <= 0.02)
            .count();
        writeln!(out, "rows matched: {matched}/{} within tolerance", expected.len())?;
        let cycle = matches!(trace.classification, crate::dynamics::LongRunClass::Cycle2 { .. });
        writeln!(out, "cycle detected: {cycle}")?;
        writeln!(out, "stationary optimum profit: {:.2}", run.stationary_profit)?;
        return Ok(());
    }
    let cmp = compare(table, &manifest.rows);
    writeln!(out, "{}", cmp.summary())?;
    for m in &cmp.mismatches {
        writeln!(out, "  row {} {}: expected {} got {}", m.row, m.column, m.expected, m.got)?;
    }
    Ok(())
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
