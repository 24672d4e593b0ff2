//! Shipment policy and membership fee chosen jointly, with premium demand
//! held at the level the policy's own signal sustains.
//!
//! Substituting the equilibrium demand `c1(F) * theta^c2` into the profit
//! rate leaves a four-variable box problem in `(t1, t2, t3, F)`. It is
//! neither convex nor concave, so [`solve_m2`] scans a coarse grid, polishes
//! the best grid points with a bounded simplex and keeps the winner. Under
//! the delivery-time signal with a linear fee model and `c2 = 1` the
//! interior-`t3` optimum also has a closed form ([`closed_form_t3`]).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{
    fee_revenue, potential_market, profit_m1_unchecked, profit_m2, respond, signal, CustomerResponse,
    FeeFamily, FeeModel, MarketParams, ShipmentPolicy, SignalSpec,
};
use crate::dynamics::{FeedbackLoop, LongRunClass, TraceRow, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::roots::{cubic_real_roots, quartic_real_roots};
use crate::simplex::{self, Settings};

/// Zero threshold used for structural checks on returned phase lengths.
pub const STRUCTURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct M2Problem {
    pub params: MarketParams,
    pub fee_model: FeeModel,
    pub response: CustomerResponse,
    pub signal: SignalSpec,
}

impl M2Problem {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.fee_model.validate_over(self.params.fee_min, self.params.fee_max)?;
        self.response.validate()?;
        self.signal.validate()
    }

    /// Premium demand sustained by `policy` at `fee`.
    pub fn equilibrium_demand(&self, policy: &ShipmentPolicy, fee: f64) -> Result<f64> {
        let theta = signal(&self.signal, policy, self.params.max_delivery_time)?;
        respond(&self.response, &self.fee_model, fee, theta)
    }

    /// Profit rate of `(policy, fee)` at its equilibrium demand.
    pub fn profit(&self, policy: &ShipmentPolicy, fee: f64) -> Result<f64> {
        let lp = self.equilibrium_demand(policy, fee)?;
        profit_m2(&self.params, &self.fee_model, policy, fee, lp)
    }

    /// Upper end of the search box for `t1` and `t2`. Covers three regular
    /// service horizons, three reactive cycle lengths, and the cycle length
    /// bound `2r/h + 2F/(h delta M)` that any optimum with premium demand
    /// satisfies.
    pub fn time_cap(&self) -> f64 {
        let p = &self.params;
        let mut cap = 3.0 * p.max_delivery_time;
        cap = cap.max(
            2.0 * p.revenue / p.holding_cost
                + 2.0 * p.fee_max / (p.holding_cost * self.fee_model.order_rate * p.membership_duration),
        );
        let base = if p.regular_demand > 0.0 {
            p.regular_demand
        } else {
            [p.fee_min, p.fee_max]
                .iter()
                .filter_map(|&f| potential_market(&self.fee_model, f).ok())
                .fold(0.0, f64::max)
        };
        if base > 0.0 {
            cap = cap.max(3.0 * (2.0 * p.shipment_cost / (p.holding_cost * base)).sqrt());
        }
        cap
    }

    fn closed_forms_apply(&self) -> bool {
        self.signal == SignalSpec::Mdt
            && self.fee_model.family == FeeFamily::Linear
            && self.response.sensitivity == 1.0
    }

    // x = [t1, t2, t3, F]; None when the cycle is empty
    fn objective(&self, x: &[f64]) -> Option<f64> {
        let policy = ShipmentPolicy::new(x[0], x[1], x[2]);
        if policy.cycle_length() <= 0.0 {
            return None;
        }
        let lp = self.equilibrium_demand(&policy, x[3]).ok()?;
        let v = profit_m1_unchecked(&self.params, &policy, lp) + fee_revenue(&self.params, &self.fee_model, x[3], lp);
        v.is_finite().then_some(v)
    }
}

/// Resolution and stopping rules of the numeric search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSpec {
    /// Grid points per time dimension.
    pub grid_time: usize,
    /// Grid points over the fee interval.
    pub grid_fee: usize,
    /// Grid points handed to the local polish.
    pub top_n: usize,
    /// Relative objective tolerance of the polish.
    pub tol: f64,
    /// Evaluation budget per simplex run.
    pub max_evals: usize,
    /// Also evaluate the closed-form interior-`t3` candidates where they apply.
    pub use_closed_forms: bool,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self { grid_time: 40, grid_fee: 30, top_n: 8, tol: 1e-8, max_evals: 20_000, use_closed_forms: true }
    }
}

impl SearchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid_time < 2 || self.grid_fee < 1 || self.top_n < 1 || self.max_evals < 1 {
            return Err(Error::InvalidParams(format!(
                "search needs grid_time >= 2, grid_fee >= 1, top_n >= 1, max_evals >= 1: {self:?}"
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams(format!("search tol must be > 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// How the returned point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    NumericInterior,
    /// Numeric optimum with the fee at `f_min` or `f_max`.
    NumericBoundary,
    ClosedFormInteriorFee,
    ClosedFormBoundaryFee,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M2Solution {
    pub policy: ShipmentPolicy,
    #[serde(rename = "F")]
    pub fee: f64,
    pub lambda_p_eq: f64,
    pub profit: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeeRegime {
    /// `f_min < F < f_max`, fee chosen jointly with `t3`.
    InteriorFee,
    /// Fee pinned at the given value.
    BoundaryFee(f64),
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 || hi <= lo {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

struct Candidate {
    x: [f64; 4],
    profit: f64,
}

fn polish(problem: &M2Problem, seed: [f64; 4], lo: [f64; 4], hi: [f64; 4], search: &SearchSpec) -> Candidate {
    let run = |x0: &[f64], lo: &[f64], hi: &[f64]| {
        let f = |x: &[f64]| problem.objective(x).map_or(f64::INFINITY, |v| -v);
        let settings = |step| Settings { tol: search.tol, max_evals: search.max_evals, step };
        let mut out = simplex::minimize(f, x0, lo, hi, &settings(0.05));
        // Restart with ever smaller simplices. A simplex squeezed against a
        // bound loses that direction, and a fresh one recovers it.
        for step in [0.05, 0.01, 1e-3, 1e-4] {
            let again = simplex::minimize(f, &out.x, lo, hi, &settings(step));
            if again.value < out.value {
                out = again;
            }
        }
        out
    };

    let mut best = run(&seed, &lo, &hi);
    let (mut lo, mut hi) = (lo, hi);
    // Try each coordinate that ended near a bound at exactly that bound.
    for i in 0..4 {
        let width = hi[i] - lo[i];
        if width <= 0.0 {
            continue;
        }
        let near = [lo[i], hi[i]].into_iter().find(|b| (best.x[i] - b).abs() <= 1e-3 * width.max(1.0));
        let Some(bound) = near else { continue };
        let (mut plo, mut phi) = (lo, hi);
        plo[i] = bound;
        phi[i] = bound;
        let mut x0 = best.x.clone();
        x0[i] = bound;
        let pinned = run(&x0, &plo, &phi);
        if pinned.value <= best.value + 1e-9 * (1.0 + best.value.abs()) {
            best = pinned;
            lo = plo;
            hi = phi;
        }
    }
    let x = [best.x[0], best.x[1], best.x[2], best.x[3]];
    Candidate { x, profit: -best.value }
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

/// Picks the most profitable candidate; near-ties go to the smaller fee,
/// then the shorter cycle.
fn pick(cands: &[Candidate]) -> Option<&Candidate> {
    let top = cands.iter().map(|c| c.profit).fold(f64::NEG_INFINITY, f64::max);
    cands.iter().filter(|c| ties(c.profit, top)).min_by(|a, b| {
        let ta = a.x[0] + a.x[1] + a.x[2];
        let tb = b.x[0] + b.x[1] + b.x[2];
        a.x[3].total_cmp(&b.x[3]).then(ta.total_cmp(&tb))
    })
}

/// Maximizes the equilibrium profit rate over `(t1, t2, t3, F)`.
///
/// Deterministic for fixed inputs: grid evaluation is parallel but results
/// are collected in grid order and ranked with an index tie-break.
pub fn solve_m2(problem: &M2Problem, search: &SearchSpec) -> Result<M2Solution> {
    problem.validate()?;
    search.validate()?;
    let p = &problem.params;
    let cap = problem.time_cap();
    let tau = p.max_delivery_time;
    let lo = [0.0, 0.0, 0.0, p.fee_min];
    let hi = [cap, cap, tau, p.fee_max];

    let g_time = linspace(0.0, cap, search.grid_time);
    let g_reg = linspace(0.0, tau, search.grid_time);
    let g_fee = if p.fee_max > p.fee_min { linspace(p.fee_min, p.fee_max, search.grid_fee) } else { vec![p.fee_min] };
    let (n, nf) = (search.grid_time, g_fee.len());
    let point = |k: usize| {
        let f = k % nf;
        let r = k / nf;
        [g_time[r / (n * n)], g_time[(r / n) % n], g_reg[r % n], g_fee[f]]
    };
    let total = n * n * n * nf;
    let mut scored: Vec<(f64, usize)> = (0..total)
        .into_par_iter()
        .filter_map(|k| problem.objective(&point(k)).map(|v| (v, k)))
        .collect();
    if scored.is_empty() {
        return Err(Error::InfeasibleProblem);
    }
    let rank = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    let keep = search.top_n.min(scored.len());
    if keep < scored.len() {
        scored.select_nth_unstable_by(keep - 1, rank);
        scored.truncate(keep);
    }
    scored.sort_by(rank);

    let mut cands: Vec<Candidate> = scored
        .par_iter()
        .map(|&(_, k)| polish(problem, point(k), lo, hi, search))
        .collect();
    // grid points themselves stay eligible in case a polish went astray
    cands.extend(scored.iter().map(|&(v, k)| Candidate { x: point(k), profit: v }));
    let best = pick(&cands).ok_or(Error::InfeasibleProblem)?;
    let mut sol = finish(problem, best.x, None)?;

    if search.use_closed_forms && problem.closed_forms_apply() {
        if let Some(cf) = closed_form_candidate(problem)? {
            if cf.profit >= sol.profit - 1e-9 * sol.profit.abs().max(1.0) {
                sol = cf;
            }
        }
    }
    Ok(sol)
}

fn finish(problem: &M2Problem, x: [f64; 4], branch: Option<Branch>) -> Result<M2Solution> {
    let p = &problem.params;
    let policy = ShipmentPolicy::new(x[0], x[1], x[2]);
    let fee = x[3];
    let lambda_p_eq = problem.equilibrium_demand(&policy, fee)?;
    let profit = profit_m2(p, &problem.fee_model, &policy, fee, lambda_p_eq)?;
    let branch = branch.unwrap_or(if fee <= p.fee_min || fee >= p.fee_max {
        Branch::NumericBoundary
    } else {
        Branch::NumericInterior
    });
    Ok(M2Solution { policy, fee, lambda_p_eq, profit, branch })
}

fn closed_form_candidate(problem: &M2Problem) -> Result<Option<M2Solution>> {
    let p = &problem.params;
    let mut regimes = vec![FeeRegime::BoundaryFee(p.fee_min)];
    if p.fee_max > p.fee_min {
        regimes.push(FeeRegime::BoundaryFee(p.fee_max));
        regimes.push(FeeRegime::InteriorFee);
    }
    let mut best: Option<M2Solution> = None;
    for regime in regimes {
        let Ok(t3) = closed_form_t3(problem, regime) else { continue };
        let (fee, branch) = match regime {
            FeeRegime::BoundaryFee(f) => (f, Branch::ClosedFormBoundaryFee),
            FeeRegime::InteriorFee => (interior_fee(problem, t3), Branch::ClosedFormInteriorFee),
        };
        let sol = finish(problem, [0.0, 0.0, t3, fee], Some(branch))?;
        if best.is_none_or(|b| sol.profit > b.profit) {
            best = Some(sol);
        }
    }
    Ok(best)
}

/// Profit-maximizing fee for a given `t3` when `t1 = t2 = 0`:
/// `a/(2b) - delta M r / 2 + h delta M t3 / 4`.
fn interior_fee(problem: &M2Problem, t3: f64) -> f64 {
    let p = &problem.params;
    let fm = &problem.fee_model;
    let dm = fm.order_rate * p.membership_duration;
    fm.a / (2.0 * fm.b) - dm * p.revenue / 2.0 + p.holding_cost * dm * t3 / 4.0
}

/// Closed-form optimal `t3` when the optimum has `t1 = t2 = 0` and `t3 < tau`.
///
/// Requires the delivery-time signal, a linear fee model and `c2 = 1`.
/// With the fee pinned at `F` the first-order condition in `t = t3` is the
/// cubic `c1 h t^3 - c1 (r + F/(delta M)) t^2 - K tau = 0`. With the fee free,
/// substituting the fee's own first-order condition gives the quartic
/// `3B^2 t^4 - 4AB t^3 + A^2 t^2 + 16 b M tau K = 0`, where
/// `A = 2(a + b delta M r)` and `B = b h delta M`.
///
/// Returns [`Error::RegimeViolation`] when no admissible root exists, the
/// root reaches `tau`, or the implied interior fee leaves `(f_min, f_max)`.
pub fn closed_form_t3(problem: &M2Problem, regime: FeeRegime) -> Result<f64> {
    if !problem.closed_forms_apply() {
        return Err(Error::RegimeViolation(
            "closed form needs the delivery-time signal, a linear fee model and c2 = 1".into(),
        ));
    }
    let p = &problem.params;
    let fm = &problem.fee_model;
    let (r, k, h, tau) = (p.revenue, p.shipment_cost, p.holding_cost, p.max_delivery_time);
    let dm = fm.order_rate * p.membership_duration;
    // value of the reduced objective, used to choose among admissible roots
    let value = |t: f64, fee: f64| {
        let c1 = (fm.a - fm.b * fee) * fm.order_rate;
        (r + fee / dm) * c1 * t / tau - k / t - h * c1 * t * t / (2.0 * tau)
    };
    let t = match regime {
        FeeRegime::BoundaryFee(fee) => {
            if fee < p.fee_min || fee > p.fee_max {
                return Err(Error::RegimeViolation(format!(
                    "fee {fee} outside [{}, {}]",
                    p.fee_min, p.fee_max
                )));
            }
            let c1 = potential_market(fm, fee)?;
            if c1 <= 0.0 {
                return Err(Error::RegimeViolation(format!("no premium market at fee {fee}")));
            }
            // Descartes: exactly one positive root
            cubic_real_roots(c1 * h, -c1 * (r + fee / dm), 0.0, -k * tau)
                .into_iter()
                .filter(|t| *t > 0.0)
                .fold(f64::NAN, f64::max)
        }
        FeeRegime::InteriorFee => {
            let a_ = 2.0 * (fm.a + fm.b * dm * r);
            let b_ = fm.b * h * dm;
            if !(b_ > 0.0) {
                return Err(Error::RegimeViolation("fee does not affect membership".into()));
            }
            let members_positive = a_ / b_;
            quartic_real_roots(3.0 * b_ * b_, -4.0 * a_ * b_, a_ * a_, 0.0, 16.0 * fm.b * p.membership_duration * tau * k)
                .into_iter()
                .filter(|t| *t > 0.0 && *t < members_positive)
                .map(|t| (t, value(t, interior_fee(problem, t))))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .map_or(f64::NAN, |(t, _)| t)
        }
    };
    if !t.is_finite() {
        return Err(Error::RegimeViolation("first-order condition has no admissible root".into()));
    }
    if t >= tau {
        return Err(Error::RegimeViolation(format!("root t3 = {t} is not below tau = {tau}")));
    }
    if regime == FeeRegime::InteriorFee {
        let fee = interior_fee(problem, t);
        if !(fee > p.fee_min && fee < p.fee_max) {
            return Err(Error::RegimeViolation(format!(
                "implied fee {fee} is not inside ({}, {})",
                p.fee_min, p.fee_max
            )));
        }
    }
    Ok(t)
}

/// Structural properties of an optimal policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// `t1 = 0` implies `t2 = 0`.
    pub no_fast_implies_no_lost: bool,
    /// `t3 < tau` implies `t1 = 0`.
    pub slack_implies_no_fast: bool,
    /// `t1 <= r / h`.
    pub fast_within_bound: bool,
    /// Properties that must hold for this signal but do not.
    pub violations: Vec<String>,
    /// Properties that failed but are not expected to hold for this signal.
    pub findings: Vec<String>,
}

impl StructureReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the structure of an optimal policy. Under the delivery-time
/// signal all three properties are expected; under other signals only the
/// bound on `t1` is, and the rest are reported as findings.
pub fn check_lemma2(problem: &M2Problem, solution: &M2Solution) -> StructureReport {
    let p = &problem.params;
    let pol = &solution.policy;
    let zero = |t: f64| t.abs() <= STRUCTURE_TOL;
    let a = !zero(pol.fast) || zero(pol.lost);
    let b = pol.regular >= p.max_delivery_time - STRUCTURE_TOL || zero(pol.fast);
    let c = pol.fast <= p.revenue / p.holding_cost + STRUCTURE_TOL;
    let strict = problem.signal == SignalSpec::Mdt;
    let mut violations = Vec::new();
    let mut findings = Vec::new();
    for (ok, always, what) in [
        (a, false, "t1 = 0 but t2 > 0"),
        (b, false, "t3 < tau but t1 > 0"),
        (c, true, "t1 exceeds r/h"),
    ] {
        if !ok {
            if strict || always {
                violations.push(what.to_string());
            } else {
                findings.push(what.to_string());
            }
        }
    }
    StructureReport {
        no_fast_implies_no_lost: a,
        slack_implies_no_fast: b,
        fast_within_bound: c,
        violations,
        findings,
    }
}

/// Long-run outcome when only the optimal fee is handed to a reactive
/// e-tailer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RecoveryClass {
    /// Demand settles on the equilibrium optimum.
    #[serde(rename = "Opt-Eq")]
    OptEq,
    /// Demand settles somewhere else.
    #[serde(rename = "Non-opt-Eq")]
    NonOptEq,
    /// Demand keeps oscillating.
    #[serde(rename = "Cycles")]
    Cycles,
}

impl RecoveryClass {
    pub fn label(self) -> &'static str {
        match self {
            RecoveryClass::OptEq => "Opt-Eq",
            RecoveryClass::NonOptEq => "Non-opt-Eq",
            RecoveryClass::Cycles => "Cycles",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Opt-Eq" => Some(RecoveryClass::OptEq),
            "Non-opt-Eq" => Some(RecoveryClass::NonOptEq),
            "Cycles" => Some(RecoveryClass::Cycles),
            _ => None,
        }
    }
}

/// Reactive long-run demand compared with the equilibrium prediction
/// `c1` below the binding threshold and `c1 (threshold / c1)^(1/3)` above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeeOnlyCheck {
    pub potential: f64,
    pub threshold: f64,
    pub predicted: f64,
    pub observed: f64,
    pub equilibrium: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub class: RecoveryClass,
    pub long_run: LongRunClass,
    /// Limit demand, or the cycle-length weighted mean over the last cycle.
    pub long_run_lambda: f64,
    /// Limit profit rate, or its cycle-length weighted mean over the last cycle.
    pub long_run_profit: f64,
    /// `(optimum - long_run_profit) / long_run_profit`.
    pub shortfall: f64,
    pub iterations: usize,
    pub fee_only_check: Option<FeeOnlyCheck>,
}

/// Iteration budget for recoverability runs; slow alternation near
/// `c2 = 2` needs hundreds of periods to settle.
pub const RECOVERY_MAX_ITERS: usize = 5000;

/// Profit and demand averaged over `rows`, weighted by cycle length.
pub fn time_weighted(rows: &[TraceRow]) -> (f64, f64) {
    let total: f64 = rows.iter().map(|r| r.policy.cycle_length()).sum();
    let lambda = rows.iter().map(|r| r.lambda_p * r.policy.cycle_length()).sum::<f64>() / total;
    let profit = rows.iter().map(|r| r.profit * r.policy.cycle_length()).sum::<f64>() / total;
    (lambda, profit)
}

/// Runs the reactive dynamics at the optimal fee from `c1(F)` and
/// classifies where they go. A run that neither settles nor locks into a
/// two-cycle within the budget counts as cycling.
pub fn recoverability(problem: &M2Problem, solution: &M2Solution) -> Result<RecoveryReport> {
    let fl = FeedbackLoop {
        params: problem.params,
        fee_model: problem.fee_model,
        response: problem.response,
        signal: problem.signal.clone(),
        fee: solution.fee,
    };
    let c1 = fl.potential()?;
    let trace = fl.simulate(c1, RECOVERY_MAX_ITERS, DEFAULT_TOL)?;
    let last = trace.rows.last().expect("trace has the seed row");
    let (long_run_lambda, long_run_profit) = match trace.classification {
        LongRunClass::ConvergedToPotential { .. } | LongRunClass::ConvergedInterior { .. } => {
            (last.lambda_p, last.profit)
        }
        _ => time_weighted(&trace.rows[trace.rows.len().saturating_sub(2)..]),
    };
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-3 * y.abs().max(1.0);
    let class = match trace.classification {
        LongRunClass::Cycle2 { .. } | LongRunClass::Undetermined => RecoveryClass::Cycles,
        _ if close(long_run_lambda, solution.lambda_p_eq) && close(long_run_profit, solution.profit) => {
            RecoveryClass::OptEq
        }
        _ => RecoveryClass::NonOptEq,
    };

    let fee_only_check = (problem.signal == SignalSpec::Mdt && problem.response.sensitivity == 1.0).then(|| {
        let threshold = problem.params.binding_threshold();
        let predicted = if c1 <= threshold { c1 } else { c1 * (threshold / c1).cbrt() };
        let observed = long_run_lambda;
        let eq = solution.lambda_p_eq;
        let slack = 1e-3 * eq.max(1.0);
        let holds = close(observed, predicted)
            && observed <= eq + slack
            && (c1 > threshold || (observed - eq).abs() <= slack);
        FeeOnlyCheck { potential: c1, threshold, predicted, observed, equilibrium: eq, holds }
    });

    Ok(RecoveryReport {
        class,
        long_run: trace.classification,
        long_run_lambda,
        long_run_profit,
        shortfall: (solution.profit - long_run_profit) / long_run_profit,
        iterations: trace.rows.len() - 1,
        fee_only_check,
    })
}
