//! Demand feedback without WoM knowledge.
//!
//! Each period the e-tailer observes premium demand, re-solves the reactive
//! model, ships with the resulting policy, and premium customers answer the
//! signal that policy emits. Iterating that map either settles on a fixed
//! point or, under the delivery-time signal with sensitive customers, locks
//! into a two-cycle.

use serde::{Deserialize, Serialize};

use crate::domain::{
    potential_market, profit_m2, respond, signal, CustomerResponse, FeeModel, MarketParams,
    ShipmentPolicy, SignalSpec,
};
use crate::error::{Error, Result};
use crate::m1::solve_m1;

/// Default classification tolerance.
pub const DEFAULT_TOL: f64 = 1e-4;
/// Tolerance used when comparing against two-decimal printed tables.
pub const TABLE_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub lambda_p: f64,
    /// Reactive policy solved for `lambda_p`.
    pub policy: ShipmentPolicy,
    /// Profit rate of that policy at `lambda_p`, membership revenue included.
    pub profit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LongRunClass {
    ConvergedToPotential { limit: f64 },
    ConvergedInterior { limit: f64 },
    Cycle2 { high: f64, low: f64 },
    Undetermined,
}

impl LongRunClass {
    pub fn same_kind(&self, other: &LongRunClass) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    pub fn limit(&self) -> Option<f64> {
        match *self {
            LongRunClass::ConvergedToPotential { limit } | LongRunClass::ConvergedInterior { limit } => {
                Some(limit)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsTrace {
    pub rows: Vec<TraceRow>,
    pub classification: LongRunClass,
    pub tol: f64,
    /// Analytic long-run prediction, when the signal admits one.
    pub prediction: Option<LongRunClass>,
}

impl DynamicsTrace {
    pub fn lambdas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.lambda_p).collect()
    }

    /// Writes `iter,lambda_p,t1,t2,t3,profit` with two decimals.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "lambda_p", "t1", "t2", "t3", "profit"])?;
        for r in &self.rows {
            w.write_record([
                r.iter.to_string(),
                format!("{:.2}", r.lambda_p),
                format!("{:.2}", r.policy.fast),
                format!("{:.2}", r.policy.lost),
                format!("{:.2}", r.policy.regular),
                format!("{:.2}", r.profit),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Everything the feedback map depends on: market, fee model, customers,
/// the signal they watch, and the (fixed) membership fee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackLoop {
    pub params: MarketParams,
    pub fee_model: FeeModel,
    pub response: CustomerResponse,
    pub signal: SignalSpec,
    pub fee: f64,
}

impl FeedbackLoop {
    pub fn potential(&self) -> Result<f64> {
        potential_market(&self.fee_model, self.fee)
    }

    fn check_demand(&self, lambda_p: f64) -> Result<f64> {
        let c1 = self.potential()?;
        if !(lambda_p >= 0.0 && lambda_p <= c1 + 1e-9 * c1.max(1.0)) {
            return Err(Error::InvalidParams(format!(
                "premium demand {lambda_p} outside [0, c1(F) = {c1}]"
            )));
        }
        Ok(c1)
    }

    fn respond_to(&self, policy: &ShipmentPolicy) -> Result<f64> {
        let theta = signal(&self.signal, policy, self.params.max_delivery_time)?;
        respond(&self.response, &self.fee_model, self.fee, theta)
    }

    /// One period: the policy solved for `lambda_p` and the demand it induces.
    pub fn step(&self, lambda_p: f64) -> Result<(ShipmentPolicy, f64)> {
        self.check_demand(lambda_p)?;
        let policy = solve_m1(&self.params, lambda_p)?.policy;
        let next = self.respond_to(&policy)?;
        Ok((policy, next))
    }

    fn row(&self, iter: usize, lambda_p: f64) -> Result<TraceRow> {
        let policy = solve_m1(&self.params, lambda_p)?.policy;
        let profit = profit_m2(&self.params, &self.fee_model, &policy, self.fee, lambda_p)?;
        Ok(TraceRow { iter, lambda_p, policy, profit })
    }

    /// Exactly `steps` periods from `seed`, giving `steps + 1` rows.
    pub fn iterate(&self, seed: f64, steps: usize) -> Result<Vec<TraceRow>> {
        self.check_demand(seed)?;
        let mut rows = vec![self.row(0, seed)?];
        for k in 0..steps {
            let next = self.respond_to(&rows[k].policy)?;
            rows.push(self.row(k + 1, next)?);
        }
        Ok(rows)
    }

    /// Iterates until the demand settles, a two-cycle appears, or
    /// `max_iters` periods have passed.
    pub fn simulate(&self, seed: f64, max_iters: usize, tol: f64) -> Result<DynamicsTrace> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParams(format!("tol must be > 0, got {tol}")));
        }
        let c1 = self.check_demand(seed)?;
        let mut rows = vec![self.row(0, seed)?];
        let mut classification = LongRunClass::Undetermined;
        for k in 0..max_iters {
            let next = self.respond_to(&rows[k].policy)?;
            rows.push(self.row(k + 1, next)?);
            let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda_p).collect();
            if let Some(class) = detect(&lambdas, c1, tol) {
                classification = class;
                break;
            }
        }
        Ok(DynamicsTrace { rows, classification, tol, prediction: self.predict_long_run().ok() })
    }

    /// Closed-form long-run behaviour under the delivery-time signal.
    pub fn predict_long_run(&self) -> Result<LongRunClass> {
        if self.signal != SignalSpec::Mdt {
            return Err(Error::UnsupportedSignal);
        }
        let c1 = self.potential()?;
        let threshold = self.params.binding_threshold();
        if c1 <= threshold {
            return Ok(LongRunClass::ConvergedToPotential { limit: c1 });
        }
        let c2 = self.response.sensitivity;
        let w = threshold / c1;
        Ok(if c2 >= 2.0 {
            LongRunClass::Cycle2 { high: c1, low: c1 * w.powf(c2 / 2.0) }
        } else if c2 == 0.0 {
            LongRunClass::ConvergedToPotential { limit: c1 }
        } else {
            LongRunClass::ConvergedInterior { limit: c1 * w.powf(c2 / (c2 + 2.0)) }
        })
    }
}

/// Classifies the tail of a demand sequence, or `None` if it is still moving.
///
/// A two-cycle needs two full periods that repeat within `tol` and whose
/// swing is not shrinking; a slowly converging alternating sequence would
/// otherwise pass the repeat test long before it settles.
pub fn detect(lambdas: &[f64], potential: f64, tol: f64) -> Option<LongRunClass> {
    let n = lambdas.len();
    if n >= 2 {
        let (prev, last) = (lambdas[n - 2], lambdas[n - 1]);
        if (last - prev).abs() < tol {
            return Some(if (last - potential).abs() < tol {
                LongRunClass::ConvergedToPotential { limit: last }
            } else {
                LongRunClass::ConvergedInterior { limit: last }
            });
        }
    }
    if n >= 4 {
        let w = &lambdas[n - 4..];
        let swing_a = (w[1] - w[0]).abs();
        let swing_b = (w[3] - w[2]).abs();
        if (w[2] - w[0]).abs() < tol
            && (w[3] - w[1]).abs() < tol
            && swing_a >= tol
            && swing_b >= swing_a * (1.0 - 1e-6)
        {
            let (high, low) = if w[3] > w[2] { (w[3], w[2]) } else { (w[2], w[3]) };
            return Some(LongRunClass::Cycle2 { high, low });
        }
    }
    None
}

/// Demand after `k` periods of the delivery-time map started at `c1(F)`,
/// from the exponent series: `c1 * w^B_k` with
/// `B_k = sum_{i=1..k} (c2/2)^i (-1)^(i-1)` and `w = threshold / c1`.
/// Valid while every iterate stays above the threshold, i.e. `c2 < 2`.
pub fn alternating_series_iterate(c1: f64, threshold: f64, c2: f64, k: usize) -> f64 {
    let w = threshold / c1;
    let ratio = c2 / 2.0;
    let mut exponent = 0.0;
    let mut term = 1.0;
    for i in 1..=k {
        term *= ratio;
        exponent += if i % 2 == 1 { term } else { -term };
    }
    c1 * w.powf(exponent)
}
