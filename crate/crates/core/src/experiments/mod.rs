//! Computational study: table reproduction, demand traces, the cyclic
//! against stationary comparison, parameter sweeps, and result files.

pub mod reference;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{CustomerResponse, FeeFamily, FeeModel, MarketParams, SignalSpec};
use crate::dynamics::{detect, DynamicsTrace, FeedbackLoop, LongRunClass, DEFAULT_TOL, TABLE_TOL};
use crate::error::{Error, Result};
use crate::m2::{
    recoverability, solve_m2, time_weighted, Branch, M2Problem, RecoveryClass, SearchSpec, RECOVERY_MAX_ITERS,
};
use reference::ReferenceRow;

/// Membership duration standing in for a lifetime membership. The fee
/// revenue rate `F lambda_p / (delta M)` is negligible at this horizon.
pub const LIFETIME: f64 = 1e6;
pub const MONTHLY: f64 = 30.0;

/// Version written into every manifest.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
}

impl TableId {
    pub const ALL: [TableId; 7] =
        [TableId::T3, TableId::T4, TableId::T5, TableId::T6, TableId::T7, TableId::T8, TableId::T9];

    pub fn label(self) -> &'static str {
        match self {
            TableId::T3 => "T3",
            TableId::T4 => "T4",
            TableId::T5 => "T5",
            TableId::T6 => "T6",
            TableId::T7 => "T7",
            TableId::T8 => "T8",
            TableId::T9 => "T9",
        }
    }

    /// Demand-trace tables, as opposed to optimal-policy tables.
    pub fn is_trace(self) -> bool {
        matches!(self, TableId::T7 | TableId::T8)
    }

    pub fn reference(self) -> &'static [ReferenceRow] {
        match self {
            TableId::T3 => reference::T3,
            TableId::T4 => reference::T4,
            TableId::T5 => reference::T5,
            TableId::T6 => reference::T6,
            TableId::T9 => reference::T9,
            TableId::T7 | TableId::T8 => &[],
        }
    }

    fn file_stem(self) -> String {
        self.label().to_lowercase()
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown table {s:?}; expected one of T3..T9")))
    }
}

/// Fee model family and coefficients; the per-member order rate comes from
/// the `delta` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeeShape {
    pub family: FeeFamily,
    pub a: f64,
    pub b: f64,
}

impl FeeShape {
    pub const LINEAR: FeeShape = FeeShape { family: FeeFamily::Linear, a: 100.0, b: 1.0 };
    pub const LOG: FeeShape = FeeShape { family: FeeFamily::Logarithmic, a: 20.0, b: 101.0 };

    pub fn with_order_rate(self, delta: f64) -> FeeModel {
        FeeModel { family: self.family, a: self.a, b: self.b, order_rate: delta }
    }
}

/// Parameter grids of the study plus the constants shared by every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    #[serde(rename = "r")]
    pub revenue: Vec<f64>,
    #[serde(rename = "K")]
    pub shipment_cost: Vec<f64>,
    #[serde(rename = "tau")]
    pub max_delivery_time: Vec<f64>,
    #[serde(rename = "c2")]
    pub sensitivity: Vec<f64>,
    #[serde(rename = "delta")]
    pub order_rate: Vec<f64>,
    #[serde(rename = "M")]
    pub membership_duration: Vec<f64>,
    pub fee_models: Vec<FeeShape>,
    pub signals: Vec<SignalSpec>,
    #[serde(rename = "h")]
    pub holding_cost: f64,
    #[serde(rename = "lambda_r")]
    pub regular_demand: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub search: SearchSpec,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            revenue: vec![8.0, 16.0, 48.0],
            // 1000 is needed by the logarithmic delivery-time table and the
            // membership-duration table
            shipment_cost: vec![1000.0, 2000.0, 3000.0, 4000.0],
            max_delivery_time: vec![1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
            sensitivity: vec![0.1, 0.2, 0.5, 1.0, 2.0, 3.0],
            order_rate: vec![5.0 / 9.0, 5.0],
            membership_duration: vec![MONTHLY, LIFETIME],
            fee_models: vec![FeeShape::LINEAR, FeeShape::LOG],
            signals: vec![SignalSpec::Mdt, SignalSpec::Nps],
            holding_cost: 4.0,
            regular_demand: 50.0,
            f_min: 10.0,
            f_max: 100.0,
            search: SearchSpec::default(),
            out_dir: PathBuf::from("results"),
        }
    }
}

fn contains(grid: &[f64], v: f64) -> bool {
    grid.iter().any(|g| (g - v).abs() <= 1e-9 * v.abs().max(1.0))
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let grids: [(&str, &Vec<f64>); 6] = [
            ("r", &self.revenue),
            ("K", &self.shipment_cost),
            ("tau", &self.max_delivery_time),
            ("c2", &self.sensitivity),
            ("delta", &self.order_rate),
            ("M", &self.membership_duration),
        ];
        for (name, g) in grids {
            if g.is_empty() {
                return Err(Error::InvalidParams(format!("grid {name} is empty")));
            }
        }
        if self.fee_models.is_empty() || self.signals.is_empty() {
            return Err(Error::InvalidParams("fee_models and signals must be non-empty".into()));
        }
        self.search.validate()
    }

    /// The problem at one grid point.
    pub fn problem(&self, point: &GridPoint) -> M2Problem {
        M2Problem {
            params: MarketParams {
                revenue: point.revenue,
                shipment_cost: point.shipment_cost,
                holding_cost: self.holding_cost,
                max_delivery_time: point.tau,
                regular_demand: self.regular_demand,
                membership_duration: point.membership_duration,
                fee_min: self.f_min,
                fee_max: self.f_max,
            },
            fee_model: point.fee.with_order_rate(point.delta),
            response: CustomerResponse::new(point.c2),
            signal: point.signal.clone(),
        }
    }

    fn require(&self, table: TableId, setup: &TableSetup) -> Result<()> {
        let miss = |detail: String| Error::ConfigMismatch { table: table.label().into(), detail };
        let fixed = [
            ("h", self.holding_cost, 4.0),
            ("lambda_r", self.regular_demand, 50.0),
            ("f_min", self.f_min, 10.0),
            ("f_max", self.f_max, 100.0),
        ];
        for (name, have, want) in fixed {
            if !contains(&[have], want) {
                return Err(miss(format!("{name} is {have}, table uses {want}")));
            }
        }
        if !self.signals.contains(&setup.signal) {
            return Err(miss(format!("signal {} not configured", setup.signal.label())));
        }
        if !self.fee_models.contains(&setup.fee) {
            return Err(miss(format!("fee model {:?} not configured", setup.fee)));
        }
        if !contains(&self.order_rate, setup.delta) {
            return Err(miss(format!("delta = {} not in grid", setup.delta)));
        }
        for r in setup.rows {
            for (name, grid, v) in [
                ("tau", &self.max_delivery_time, r.tau),
                ("c2", &self.sensitivity, r.c2),
                ("K", &self.shipment_cost, r.shipment_cost),
                ("r", &self.revenue, r.revenue),
                ("M", &self.membership_duration, r.membership_duration),
            ] {
                if !contains(grid, v) {
                    return Err(miss(format!("{name} = {v} not in grid")));
                }
            }
        }
        Ok(())
    }
}

/// One point of the parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub tau: f64,
    pub c2: f64,
    pub shipment_cost: f64,
    pub revenue: f64,
    pub membership_duration: f64,
    pub delta: f64,
    pub fee: FeeShape,
    pub signal: SignalSpec,
}

struct TableSetup {
    signal: SignalSpec,
    fee: FeeShape,
    delta: f64,
    rows: &'static [ReferenceRow],
}

fn setup(table: TableId) -> TableSetup {
    let (signal, fee, delta, rows_of) = match table {
        TableId::T3 | TableId::T7 | TableId::T8 => (SignalSpec::Mdt, FeeShape::LINEAR, 5.0, TableId::T3),
        TableId::T4 => (SignalSpec::Mdt, FeeShape::LOG, 5.0, TableId::T4),
        TableId::T5 => (SignalSpec::Nps, FeeShape::LINEAR, 5.0, TableId::T5),
        TableId::T6 => (SignalSpec::Nps, FeeShape::LOG, 5.0, TableId::T6),
        TableId::T9 => (SignalSpec::Mdt, FeeShape::LINEAR, 5.0 / 9.0, TableId::T9),
    };
    TableSetup { signal, fee, delta, rows: rows_of.reference() }
}

impl TableSetup {
    fn point(&self, r: &ReferenceRow) -> GridPoint {
        GridPoint {
            tau: r.tau,
            c2: r.c2,
            shipment_cost: r.shipment_cost,
            revenue: r.revenue,
            membership_duration: r.membership_duration,
            delta: self.delta,
            fee: self.fee,
            signal: self.signal.clone(),
        }
    }
}

/// Grid points behind the rows of an optimal-policy table, in print order.
pub fn table_points(config: &ExperimentConfig, table: TableId) -> Result<Vec<GridPoint>> {
    if table.is_trace() {
        return Err(Error::InvalidParams(format!("{} is a trace table", table.label())));
    }
    let s = setup(table);
    config.require(table, &s)?;
    Ok(s.rows.iter().map(|r| s.point(r)).collect())
}

/// Inputs and outcome of one optimal-policy run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRow {
    pub tau: f64,
    pub c2: f64,
    #[serde(rename = "K")]
    pub shipment_cost: f64,
    #[serde(rename = "r")]
    pub revenue: f64,
    #[serde(rename = "M")]
    pub membership_duration: f64,
    pub delta: f64,
    pub signal: String,
    pub fee_family: String,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    #[serde(rename = "F")]
    pub fee: f64,
    pub lambda_p: f64,
    pub profit: f64,
    pub no_wom_decision: RecoveryClass,
    pub branch: Branch,
}

/// Solves one grid point and classifies its fee-only recovery.
pub fn run_point(config: &ExperimentConfig, point: &GridPoint) -> Result<ResultRow> {
    let problem = config.problem(point);
    let sol = solve_m2(&problem, &config.search)?;
    let rec = recoverability(&problem, &sol)?;
    Ok(ResultRow {
        tau: point.tau,
        c2: point.c2,
        shipment_cost: point.shipment_cost,
        revenue: point.revenue,
        membership_duration: point.membership_duration,
        delta: point.delta,
        signal: point.signal.label().into(),
        fee_family: point.fee.family.label().into(),
        t1: sol.policy.fast,
        t2: sol.policy.lost,
        t3: sol.policy.regular,
        fee: sol.fee,
        lambda_p: sol.lambda_p_eq,
        profit: sol.profit,
        no_wom_decision: rec.class,
        branch: sol.branch,
    })
}

/// Regenerates an optimal-policy table, one row per printed row.
pub fn run_table(config: &ExperimentConfig, table: TableId) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let points = table_points(config, table)?;
    points.par_iter().map(|p| run_point(config, p)).collect()
}

/// Every combination of the configured grids.
pub fn sweep_points(config: &ExperimentConfig) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for signal in &config.signals {
        for fee in &config.fee_models {
            for &delta in &config.order_rate {
                for &membership_duration in &config.membership_duration {
                    for &revenue in &config.revenue {
                        for &shipment_cost in &config.shipment_cost {
                            for &tau in &config.max_delivery_time {
                                for &c2 in &config.sensitivity {
                                    out.push(GridPoint {
                                        tau,
                                        c2,
                                        shipment_cost,
                                        revenue,
                                        membership_duration,
                                        delta,
                                        fee: *fee,
                                        signal: signal.clone(),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Runs the full grid. Points whose fee model is undefined on
/// `[f_min, f_max]` are skipped.
pub fn sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let rows: Vec<Option<ResultRow>> = sweep_points(config)
        .par_iter()
        .map(|p| match run_point(config, p) {
            Ok(row) => Ok(Some(row)),
            Err(Error::Domain { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Absolute tolerances for comparing against two-decimal tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub time: f64,
    pub fee: f64,
    pub lambda_p: f64,
    pub profit: f64,
    /// Extra relative slack, as a fraction of the printed value.
    pub relative: f64,
}

impl Tolerances {
    pub const STRICT: Tolerances = Tolerances { time: 0.02, fee: 0.5, lambda_p: 0.5, profit: 1.0, relative: 0.0 };

    /// The membership-duration table only reproduces approximately.
    pub fn for_table(table: TableId) -> Tolerances {
        match table {
            TableId::T9 => Tolerances { relative: 0.05, ..Tolerances::STRICT },
            _ => Tolerances::STRICT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMismatch {
    pub row: usize,
    pub column: String,
    pub expected: String,
    pub got: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableComparison {
    pub table: TableId,
    pub rows_matched: usize,
    pub rows_total: usize,
    pub mismatches: Vec<CellMismatch>,
}

impl TableComparison {
    pub fn all_matched(&self) -> bool {
        self.rows_matched == self.rows_total
    }

    pub fn summary(&self) -> String {
        format!("rows matched: {}/{} within tolerance", self.rows_matched, self.rows_total)
    }
}

/// Compares reproduced rows with the printed ones, cell by cell.
pub fn compare(table: TableId, rows: &[ResultRow]) -> TableComparison {
    let tol = Tolerances::for_table(table);
    let reference = table.reference();
    let mut mismatches = Vec::new();
    let mut rows_matched = 0;
    for (i, expected) in reference.iter().enumerate() {
        let before = mismatches.len();
        let Some(got) = rows.get(i) else {
            mismatches.push(CellMismatch {
                row: i,
                column: "row".into(),
                expected: "present".into(),
                got: "missing".into(),
                note: expected.note.into(),
            });
            continue;
        };
        let cells = [
            ("t1", expected.t1, got.t1, tol.time),
            ("t2", expected.t2, got.t2, tol.time),
            ("t3", expected.t3, got.t3, tol.time),
            ("F", expected.fee, got.fee, tol.fee),
            ("lambda_p", expected.lambda_p, got.lambda_p, tol.lambda_p),
            ("profit", expected.profit, got.profit, tol.profit),
        ];
        for (column, want, have, abs) in cells {
            let allowed = abs.max(tol.relative * want.abs());
            if !((have - want).abs() <= allowed) {
                mismatches.push(CellMismatch {
                    row: i,
                    column: column.into(),
                    expected: format!("{want:.2}"),
                    got: format!("{have:.2}"),
                    note: expected.note.into(),
                });
            }
        }
        if !expected.decision.is_empty() && got.no_wom_decision.label() != expected.decision {
            mismatches.push(CellMismatch {
                row: i,
                column: "no_wom_decision".into(),
                expected: expected.decision.into(),
                got: got.no_wom_decision.label().into(),
                note: expected.note.into(),
            });
        }
        if mismatches.len() == before {
            rows_matched += 1;
        }
    }
    TableComparison { table, rows_matched, rows_total: reference.len(), mismatches }
}

/// A fixed-length demand trace and the stationary optimum it is compared to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRun {
    pub table: TableId,
    pub fee: f64,
    pub trace: DynamicsTrace,
    /// Optimal equilibrium profit at the same parameters.
    pub stationary_profit: f64,
}

/// Periods shown in the trace tables.
pub const TRACE_STEPS: usize = 10;
/// Fee fixed in the trace tables.
pub const TRACE_FEE: f64 = 10.0;

/// Rebuilds a demand trace table: the reactive dynamics at `tau = 2`,
/// `F = 10`, started from the potential market, for ten periods.
pub fn run_trace(config: &ExperimentConfig, table: TableId) -> Result<TraceRun> {
    let c2 = match table {
        TableId::T7 => 1.0,
        TableId::T8 => 3.0,
        _ => return Err(Error::InvalidParams(format!("{} is not a trace table", table.label()))),
    };
    let s = setup(table);
    // only the market constants matter here, not the full row set
    config.require(table, &TableSetup { rows: &[], signal: s.signal.clone(), ..s })?;
    let miss = |detail: String| Error::ConfigMismatch { table: table.label().into(), detail };
    let point = GridPoint {
        tau: 2.0,
        c2,
        shipment_cost: 2000.0,
        revenue: 8.0,
        membership_duration: MONTHLY,
        delta: s.delta,
        fee: s.fee,
        signal: s.signal.clone(),
    };
    for (name, grid, v) in [
        ("tau", &config.max_delivery_time, point.tau),
        ("c2", &config.sensitivity, c2),
        ("K", &config.shipment_cost, point.shipment_cost),
        ("r", &config.revenue, point.revenue),
        ("M", &config.membership_duration, point.membership_duration),
    ] {
        if !contains(grid, v) {
            return Err(miss(format!("{name} = {v} not in grid")));
        }
    }
    let problem = config.problem(&point);
    let fl = feedback_loop(&problem, TRACE_FEE);
    let rows = fl.iterate(fl.potential()?, TRACE_STEPS)?;
    let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda_p).collect();
    let classification = (2..=lambdas.len())
        .find_map(|n| detect(&lambdas[..n], lambdas[0], TABLE_TOL))
        .unwrap_or(LongRunClass::Undetermined);
    let trace = DynamicsTrace { rows, classification, tol: TABLE_TOL, prediction: fl.predict_long_run().ok() };
    let stationary_profit = solve_m2(&problem, &config.search)?.profit;
    Ok(TraceRun { table, fee: TRACE_FEE, trace, stationary_profit })
}

fn feedback_loop(problem: &M2Problem, fee: f64) -> FeedbackLoop {
    FeedbackLoop {
        params: problem.params,
        fee_model: problem.fee_model,
        response: problem.response,
        signal: problem.signal.clone(),
        fee,
    }
}

/// Stationary optimum against the reactive trajectory at the optimal fee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub fee: f64,
    pub stationary_profit: f64,
    /// Cycle-length weighted profit over one detected cycle, or the limit
    /// profit when the trajectory settles.
    pub cyclic_profit: f64,
    /// `cyclic_profit - stationary_profit`.
    pub margin: f64,
    pub cyclic_wins: bool,
    /// False when the trajectory converged instead of cycling.
    pub cycle_detected: bool,
    pub long_run: LongRunClass,
}

/// Solves the equilibrium model, replays the reactive dynamics at its fee
/// and reports which earns more in the long run.
pub fn cyclic_vs_stationary(problem: &M2Problem, search: &SearchSpec) -> Result<ComparisonReport> {
    let sol = solve_m2(problem, search)?;
    let fl = feedback_loop(problem, sol.fee);
    let trace = fl.simulate(fl.potential()?, RECOVERY_MAX_ITERS, DEFAULT_TOL)?;
    let n = trace.rows.len();
    let (cycle_detected, cyclic_profit) = match trace.classification {
        LongRunClass::Cycle2 { .. } => (true, time_weighted(&trace.rows[n - 2..]).1),
        _ => (false, trace.rows[n - 1].profit),
    };
    let margin = cyclic_profit - sol.profit;
    Ok(ComparisonReport {
        fee: sol.fee,
        stationary_profit: sol.profit,
        cyclic_profit,
        margin,
        cyclic_wins: margin > 0.0,
        cycle_detected,
        long_run: trace.classification,
    })
}

pub const CSV_HEADER: [&str; 14] = [
    "tau",
    "c2",
    "K",
    "r",
    "M",
    "signal",
    "fee_family",
    "t1",
    "t2",
    "t3",
    "F",
    "lambda_p",
    "profit",
    "no_wom_decision",
];

fn num(v: f64) -> String {
    // avoid printing "-0.00"
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Writes rows with two decimals, matching the printed tables.
pub fn write_rows_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            num(r.tau),
            num(r.c2),
            num(r.shipment_cost),
            num(r.revenue),
            num(r.membership_duration),
            r.signal.clone(),
            r.fee_family.clone(),
            num(r.t1),
            num(r.t2),
            num(r.t3),
            num(r.fee),
            num(r.lambda_p),
            num(r.profit),
            r.no_wom_decision.label().into(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to rerun a table, plus its full-precision results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema: u32,
    pub tool_version: String,
    pub table: Option<TableId>,
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceRun>,
}

impl Manifest {
    pub fn new(table: Option<TableId>, config: &ExperimentConfig, rows: Vec<ResultRow>) -> Self {
        Self { schema: 1, tool_version: TOOL_VERSION.into(), table, config: config.clone(), rows, trace: None }
    }
}

/// Paths written by [`persist`].
#[derive(Debug, Clone, PartialEq)]
pub struct Persisted {
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

/// Writes `<stem>.csv` and `<stem>.manifest.json` into `dir`. Trace
/// manifests get the trace CSV layout instead of the row layout.
pub fn persist(manifest: &Manifest, dir: &Path, stem: &str) -> Result<Persisted> {
    fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{stem}.csv"));
    let path = dir.join(format!("{stem}.manifest.json"));
    let mut buf = Vec::new();
    match &manifest.trace {
        Some(t) => t.trace.write_csv(&mut buf)?,
        None => write_rows_csv(&manifest.rows, &mut buf)?,
    }
    fs::write(&csv, buf)?;
    let mut json = serde_json::to_vec_pretty(manifest)?;
    json.push(b'\n');
    fs::write(&path, json)?;
    Ok(Persisted { csv, manifest: path })
}

/// File stem used for a table's outputs.
pub fn table_stem(table: TableId) -> String {
    table.file_stem()
}

/// Reads a manifest written by [`persist`].
pub fn reload(manifest_path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(manifest_path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: format!("{}: {}", manifest_path.display(), e.path()),
        message: e.inner().to_string(),
    })
}

/// Regenerates any table and its manifest.
pub fn reproduce(config: &ExperimentConfig, table: TableId) -> Result<Manifest> {
    if table.is_trace() {
        let run = run_trace(config, table)?;
        let mut m = Manifest::new(Some(table), config, Vec::new());
        m.trace = Some(run);
        Ok(m)
    } else {
        Ok(Manifest::new(Some(table), config, run_table(config, table)?))
    }
}
