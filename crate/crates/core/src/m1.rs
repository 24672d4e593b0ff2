//! Reactive shipment policy (model M1): the e-tailer treats the premium demand
//! it last observed as fixed and maximizes the average profit rate over the
//! three phase lengths subject to `t3 <= tau`.
//!
//! The objective is neither convex nor concave, so the solver enumerates the
//! four undominated active sets, evaluates the closed-form stationary point of
//! each, and keeps the best feasible one.

use serde::{Deserialize, Serialize};

use crate::domain::{profit_m1, profit_m1_unchecked, MarketParams, ShipmentPolicy};
use crate::error::{Error, Result};

/// Undominated active sets of the reactive model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum M1Case {
    /// `t1 = t2 = 0`, `t3 = tau`.
    I,
    /// `t1 = t2 = 0`, `t3 < tau`.
    II,
    /// `t1 > 0`, `t2 = 0`, `t3 = tau`.
    III,
    /// `t1 > 0`, `t2 > 0`, `t3 = tau`.
    IV,
}

impl M1Case {
    pub const ALL: [M1Case; 4] = [M1Case::I, M1Case::II, M1Case::III, M1Case::IV];

    /// Nearest case for an arbitrary feasible policy.
    pub fn classify(policy: &ShipmentPolicy, tau: f64) -> M1Case {
        let tol = 1e-9 * tau.max(1.0);
        if policy.regular < tau - tol {
            M1Case::II
        } else if policy.fast <= tol {
            M1Case::I
        } else if policy.lost <= tol {
            M1Case::III
        } else {
            M1Case::IV
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M1Solution {
    pub policy: ShipmentPolicy,
    pub case: M1Case,
    /// Profit rate of `policy` at `lambda_p_in`, without membership revenue.
    pub profit: f64,
    /// Premium demand the solve was conditioned on.
    pub lambda_p_in: f64,
    /// Largest stationarity residual over the case's free phases.
    pub kkt_residual: f64,
}

/// Closed-form stationary point of one case, or `None` when the case is not
/// feasible for these inputs.
pub fn candidate(case: M1Case, params: &MarketParams, lambda_p: f64) -> Result<Option<ShipmentPolicy>> {
    if !(lambda_p >= 0.0 && lambda_p.is_finite()) {
        return Err(Error::InvalidParams(format!("lambda_p must be >= 0, got {lambda_p}")));
    }
    let MarketParams {
        revenue: r,
        shipment_cost: k,
        holding_cost: h,
        max_delivery_time: tau,
        regular_demand: lr,
        ..
    } = *params;
    if lambda_p == 0.0 && matches!(case, M1Case::II | M1Case::IV) {
        return Err(Error::InvalidParams(format!(
            "case {case:?} is undefined at zero premium demand"
        )));
    }
    let policy = match case {
        M1Case::I => Some(ShipmentPolicy::new(0.0, 0.0, tau)),
        M1Case::II => {
            let t3 = (2.0 * k / (h * lambda_p)).sqrt();
            (t3 < tau).then(|| ShipmentPolicy::new(0.0, 0.0, t3))
        }
        M1Case::III => {
            let total = lambda_p + lr;
            if total <= 0.0 {
                None
            } else {
                let t1 = ((h * lr * tau * tau + 2.0 * k) / (h * total)).sqrt() - tau;
                (t1 > 0.0).then(|| ShipmentPolicy::new(t1, 0.0, tau))
            }
        }
        M1Case::IV => {
            let radicand = 2.0 * h * k - 2.0 * h * lr * r * tau - lr * r * r;
            if radicand <= 0.0 {
                None
            } else {
                let t1 = r / h;
                let t2 = (radicand / (h * h * lambda_p)).sqrt() - t1 - tau;
                (t2 > 0.0).then(|| ShipmentPolicy::new(t1, t2, tau))
            }
        }
    };
    Ok(policy)
}

/// Partial derivatives of the reactive profit rate with respect to
/// `(t1, t2, t3)`.
pub fn profit_gradient(params: &MarketParams, policy: &ShipmentPolicy, lambda_p: f64) -> [f64; 3] {
    let MarketParams {
        revenue: r,
        shipment_cost: k,
        holding_cost: h,
        regular_demand: lr,
        ..
    } = *params;
    let (t1, t2, t3) = (policy.fast, policy.lost, policy.regular);
    let t = t1 + t2 + t3;
    let t_sq = t * t;
    let common = -h * lambda_p / 2.0 + h * lr * t1 * t1 / (2.0 * t_sq) + k / t_sq;
    [
        common + r * lr * t2 / t_sq - h * lr * t1 / t,
        common - r * lr * (t1 + t3) / t_sq,
        common + r * lr * t2 / t_sq,
    ]
}

/// Stationarity residual of `policy` for the phases `case` leaves free.
/// Phases held at a bound carry a multiplier that absorbs their gradient.
pub fn kkt_residual(case: M1Case, params: &MarketParams, policy: &ShipmentPolicy, lambda_p: f64) -> f64 {
    let g = profit_gradient(params, policy, lambda_p);
    let free: &[usize] = match case {
        M1Case::I => &[],
        M1Case::II => &[2],
        M1Case::III => &[0],
        M1Case::IV => &[0, 1],
    };
    free.iter().map(|&i| g[i].abs()).fold(0.0, f64::max)
}

fn validate_inputs(params: &MarketParams, lambda_p: f64) -> Result<()> {
    params.validate()?;
    if !(lambda_p >= 0.0 && lambda_p.is_finite()) {
        return Err(Error::InvalidParams(format!("lambda_p must be >= 0, got {lambda_p}")));
    }
    if lambda_p == 0.0 && params.regular_demand == 0.0 {
        return Err(Error::InvalidParams("lambda_p and lambda_r are both zero".into()));
    }
    Ok(())
}

/// Solves the reactive model at premium demand `lambda_p`.
///
/// Ties within `1e-9` relative profit go to the lowest case id.
pub fn solve_m1(params: &MarketParams, lambda_p: f64) -> Result<M1Solution> {
    validate_inputs(params, lambda_p)?;
    let mut best: Option<M1Solution> = None;
    for case in M1Case::ALL {
        if lambda_p == 0.0 && matches!(case, M1Case::II | M1Case::IV) {
            continue;
        }
        let Some(policy) = candidate(case, params, lambda_p)? else {
            continue;
        };
        let profit = profit_m1(params, &policy, lambda_p)?;
        let better = match &best {
            None => true,
            Some(b) => profit > b.profit + 1e-9 * b.profit.abs().max(1.0),
        };
        if better {
            best = Some(M1Solution {
                policy,
                case,
                profit,
                lambda_p_in: lambda_p,
                kkt_residual: kkt_residual(case, params, &policy, lambda_p),
            });
        }
    }
    // case I is always feasible when tau > 0
    Ok(best.expect("case I is always a candidate"))
}

/// Brute-force grid for [`oracle_m1`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Spacing of the first (exhaustive) grid.
    pub step: f64,
    /// Upper bound for `t1` and `t2`; `t3` runs over `(0, tau]`.
    pub t_max: f64,
    /// Number of zoom passes: each re-grids `±2` cells around the incumbent
    /// at a tenth of the previous spacing.
    pub refine_levels: u32,
}

impl GridSpec {
    /// A grid of roughly `points` cells per axis whose bound encloses every
    /// candidate cycle length for this demand.
    pub fn covering(params: &MarketParams, lambda_p: f64, points: usize, refine_levels: u32) -> Self {
        let tau = params.max_delivery_time;
        let k_over_h = 2.0 * params.shipment_cost / params.holding_cost;
        let t_max = if lambda_p > 0.0 {
            tau.max(2.0 * (k_over_h / lambda_p).sqrt())
        } else {
            2.0 * (tau + (k_over_h / params.regular_demand).sqrt())
        };
        Self { step: t_max / points.max(1) as f64, t_max, refine_levels }
    }
}

/// Exhaustive grid search for the reactive model, used to validate
/// [`solve_m1`] independently of its closed forms.
pub fn oracle_m1(params: &MarketParams, lambda_p: f64, grid: &GridSpec) -> Result<M1Solution> {
    validate_inputs(params, lambda_p)?;
    let tau = params.max_delivery_time;
    if !(grid.step > 0.0 && grid.step.is_finite()) {
        return Err(Error::InvalidGrid(format!("step must be > 0, got {}", grid.step)));
    }
    if !(grid.t_max >= tau) {
        return Err(Error::InvalidGrid(format!(
            "t_max {} does not cover tau {tau}",
            grid.t_max
        )));
    }
    let n = (grid.t_max / grid.step).ceil() as usize;
    let n3 = (tau / grid.step).ceil().max(1.0) as usize;
    if (n + 1).saturating_mul(n + 1).saturating_mul(n3) > 2_000_000_000 {
        return Err(Error::InvalidGrid("grid has more than 2e9 points".into()));
    }

    let axis = |lo: f64, hi: f64, count: usize| -> Vec<f64> {
        (0..=count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect()
    };
    let mut t1s = axis(0.0, n as f64 * grid.step, n);
    let mut t2s = t1s.clone();
    // t3 = 0 is excluded
    let mut t3s: Vec<f64> = (1..=n3).map(|j| tau * j as f64 / n3 as f64).collect();

    let mut best = (f64::NEG_INFINITY, ShipmentPolicy::new(0.0, 0.0, tau));
    let mut step = grid.step;
    for level in 0..=grid.refine_levels {
        for &t1 in &t1s {
            for &t2 in &t2s {
                for &t3 in &t3s {
                    let p = ShipmentPolicy::new(t1, t2, t3);
                    let v = profit_m1_unchecked(params, &p, lambda_p);
                    if v > best.0 {
                        best = (v, p);
                    }
                }
            }
        }
        if level == grid.refine_levels {
            break;
        }
        let zoom = |x: f64, lo: f64, hi: f64| axis((x - 2.0 * step).max(lo), (x + 2.0 * step).min(hi), 40);
        let b = best.1;
        t1s = zoom(b.fast, 0.0, grid.t_max);
        t2s = zoom(b.lost, 0.0, grid.t_max);
        t3s = zoom(b.regular, step / 10.0, tau);
        step /= 10.0;
    }

    let (profit, policy) = best;
    let case = M1Case::classify(&policy, tau);
    Ok(M1Solution {
        policy,
        case,
        profit,
        lambda_p_in: lambda_p,
        kkt_residual: kkt_residual(case, params, &policy, lambda_p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(tau: f64) -> MarketParams {
        MarketParams {
            revenue: 8.0,
            shipment_cost: 2000.0,
            holding_cost: 4.0,
            max_delivery_time: tau,
            regular_demand: 50.0,
            membership_duration: 30.0,
            fee_min: 10.0,
            fee_max: 100.0,
        }
    }

    #[test]
    fn candidate_examples() {
        let p = candidate(M1Case::III, &params(1.0), 450.0).unwrap().unwrap();
        assert!((p.fast - ((4200.0f64 / 2000.0).sqrt() - 1.0)).abs() < 1e-12);
        assert!((p.fast - 0.4491).abs() < 1e-4);
        let p = candidate(M1Case::II, &params(2.0), 450.0).unwrap().unwrap();
        assert!((p.regular - 1.4907).abs() < 1e-4);
        for lp in [0.0, 10.0, 1e4] {
            let p = candidate(M1Case::I, &params(3.0), lp).unwrap().unwrap();
            assert_eq!(p, ShipmentPolicy::new(0.0, 0.0, 3.0));
        }
    }

    #[test]
    fn infeasible_is_a_value() {
        // t3 root above tau
        assert!(candidate(M1Case::II, &params(1.0), 450.0).unwrap().is_none());
        // large premium demand pushes t1 negative
        assert!(candidate(M1Case::III, &params(2.0), 450.0).unwrap().is_none());
        // negative radicand: 2hK < 2h lr r tau + lr r^2
        let mut p = params(2.0);
        p.shipment_cost = 100.0;
        assert!(candidate(M1Case::IV, &p, 10.0).unwrap().is_none());
    }

    #[test]
    fn zero_demand_rejects_cases_dividing_by_it() {
        assert!(matches!(candidate(M1Case::II, &params(1.0), 0.0), Err(Error::InvalidParams(_))));
        assert!(matches!(candidate(M1Case::IV, &params(1.0), 0.0), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn solve_examples() {
        let s = solve_m1(&params(2.0), 450.0).unwrap();
        assert_eq!(s.case, M1Case::II);
        assert!((s.policy.regular - 1.4907).abs() < 1e-4);
        let s = solve_m1(&params(2.0), 186.34).unwrap();
        assert_eq!(s.case, M1Case::III);
        assert!((s.policy.fast - 0.25).abs() < 5e-3);
        assert_eq!(s.policy.regular, 2.0);
    }

    #[test]
    fn threshold_demand_binds_tau() {
        let p = params(2.0);
        let s = solve_m1(&p, p.binding_threshold()).unwrap();
        assert_eq!(s.policy.regular, 2.0);
        assert_eq!(s.case, M1Case::I);
    }

    #[test]
    fn zero_premium_still_stocks_the_depot() {
        // regular customers alone justify a fast phase
        let s = solve_m1(&params(5.0), 0.0).unwrap();
        assert_eq!(s.case, M1Case::III);
        assert!((s.policy.fast - (45.0f64.sqrt() - 5.0)).abs() < 1e-12);
        assert_eq!(s.policy.lost, 0.0);
        assert!((s.profit - 58.36).abs() < 5e-3);
        let mut p = params(5.0);
        p.shipment_cost = 1e9;
        assert_eq!(solve_m1(&p, 0.0).unwrap().case, M1Case::III);
    }

    #[test]
    fn both_demands_zero_is_rejected() {
        let mut p = params(2.0);
        p.regular_demand = 0.0;
        assert!(solve_m1(&p, 0.0).is_err());
    }

    #[test]
    fn case_iv_occurs_at_low_premium_demand() {
        let s = solve_m1(&params(1.0), 5.0).unwrap();
        assert_eq!(s.case, M1Case::IV);
        assert!((s.policy.fast - 2.0).abs() < 1e-12);
        assert!(s.kkt_residual < 1e-6);
    }

    #[test]
    fn oracle_matches_closed_form_on_exhaustive_grid() {
        let p = params(2.0);
        let grid = GridSpec { step: 0.005, t_max: 2.0f64.max(2.0 * (4000.0f64 / 1800.0).sqrt()), refine_levels: 0 };
        let o = oracle_m1(&p, 450.0, &grid).unwrap();
        let s = solve_m1(&p, 450.0).unwrap();
        assert!((o.profit - s.profit).abs() < 1e-2, "{} vs {}", o.profit, s.profit);
        assert!(o.profit <= s.profit + 1e-9);
    }

    #[test]
    fn oracle_zero_premium_has_no_lost_phase() {
        let p = params(5.0);
        let o = oracle_m1(&p, 0.0, &GridSpec::covering(&p, 0.0, 80, 2)).unwrap();
        assert_eq!(o.policy.lost, 0.0);
        let s = solve_m1(&p, 0.0).unwrap();
        assert!(o.profit <= s.profit + 1e-9);
        assert!((o.profit - s.profit).abs() < 1e-3);
    }

    #[test]
    fn invalid_grid() {
        let p = params(2.0);
        let bad = GridSpec { step: 0.0, t_max: 5.0, refine_levels: 0 };
        assert!(matches!(oracle_m1(&p, 1.0, &bad), Err(Error::InvalidGrid(_))));
        let short = GridSpec { step: 0.1, t_max: 1.0, refine_levels: 0 };
        assert!(matches!(oracle_m1(&p, 1.0, &short), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = params(2.0);
        let pol = ShipmentPolicy::new(0.7, 0.4, 1.3);
        let g = profit_gradient(&p, &pol, 120.0);
        let h = 1e-6;
        for i in 0..3 {
            let mut a = [pol.fast, pol.lost, pol.regular];
            let mut b = a;
            a[i] += h;
            b[i] -= h;
            let fa = profit_m1(&p, &ShipmentPolicy::new(a[0], a[1], a[2]), 120.0).unwrap();
            let fb = profit_m1(&p, &ShipmentPolicy::new(b[0], b[1], b[2]), 120.0).unwrap();
            let fd = (fa - fb) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-5, "axis {i}: {fd} vs {}", g[i]);
        }
    }
}
