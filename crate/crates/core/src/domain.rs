//! Shared model types, the two profit-rate evaluators, WoM signals and the
//! premium customer response.
//!
//! All types are plain values. Every function here is pure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for numeric comparisons throughout the crate.
pub const EPS_NUM: f64 = 1e-9;

/// Exogenous economics and operations constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    /// Revenue per unit sold, identical for both customer types.
    #[serde(rename = "r")]
    pub revenue: f64,
    /// Fixed cost of one truck departure.
    #[serde(rename = "K")]
    pub shipment_cost: f64,
    /// Depot holding cost per unit per unit time.
    #[serde(rename = "h")]
    pub holding_cost: f64,
    /// Declared maximum delivery time for regular orders.
    #[serde(rename = "tau")]
    pub max_delivery_time: f64,
    /// Regular (non-member) demand rate.
    #[serde(rename = "lambda_r")]
    pub regular_demand: f64,
    /// Length of the period a membership fee buys.
    #[serde(rename = "M")]
    pub membership_duration: f64,
    #[serde(rename = "f_min")]
    pub fee_min: f64,
    #[serde(rename = "f_max")]
    pub fee_max: f64,
}

impl MarketParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("r", self.revenue),
            ("K", self.shipment_cost),
            ("h", self.holding_cost),
            ("tau", self.max_delivery_time),
            ("M", self.membership_duration),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.regular_demand.is_finite() && self.regular_demand >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda_r must be >= 0, got {}",
                self.regular_demand
            )));
        }
        if !(self.fee_min >= 0.0 && self.fee_min <= self.fee_max && self.fee_max.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "fee bounds must satisfy 0 <= f_min <= f_max, got [{}, {}]",
                self.fee_min, self.fee_max
            )));
        }
        Ok(())
    }

    /// Premium demand above which the delivery-time constraint stops binding
    /// in the reactive model, `2K / (h tau^2)`.
    pub fn binding_threshold(&self) -> f64 {
        2.0 * self.shipment_cost / (self.holding_cost * self.max_delivery_time.powi(2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeeFamily {
    /// `N(F) = a - b F`
    Linear,
    /// `N(F) = a ln(b - F)`, natural logarithm.
    #[serde(alias = "log")]
    Logarithmic,
}

impl FeeFamily {
    pub fn label(self) -> &'static str {
        match self {
            FeeFamily::Linear => "linear",
            FeeFamily::Logarithmic => "log",
        }
    }
}

/// How the membership fee shapes the potential premium market: the number of
/// members `N(F)` times a constant per-member order rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeeModel {
    pub family: FeeFamily,
    pub a: f64,
    pub b: f64,
    /// Orders per unit time placed by one member.
    #[serde(rename = "delta")]
    pub order_rate: f64,
}

impl FeeModel {
    pub fn linear(a: f64, b: f64, order_rate: f64) -> Self {
        Self { family: FeeFamily::Linear, a, b, order_rate }
    }

    pub fn logarithmic(a: f64, b: f64, order_rate: f64) -> Self {
        Self { family: FeeFamily::Logarithmic, a, b, order_rate }
    }

    /// Number of members at fee `fee`.
    pub fn members(&self, fee: f64) -> Result<f64> {
        if !fee.is_finite() {
            return Err(Error::Domain { fee, reason: "fee is not finite".into() });
        }
        let n = match self.family {
            FeeFamily::Linear => self.a - self.b * fee,
            FeeFamily::Logarithmic => {
                let arg = self.b - fee;
                if arg < 1.0 - EPS_NUM {
                    return Err(Error::Domain {
                        fee,
                        reason: format!("logarithmic model needs b - F >= 1, got {arg}"),
                    });
                }
                self.a * arg.max(1.0).ln()
            }
        };
        if n < -EPS_NUM {
            return Err(Error::Domain { fee, reason: format!("member count {n} is negative") });
        }
        Ok(n.max(0.0))
    }

    /// Checks the model over a whole fee interval.
    pub fn validate_over(&self, fee_min: f64, fee_max: f64) -> Result<()> {
        if !(self.order_rate.is_finite() && self.order_rate > 0.0) {
            return Err(Error::InvalidParams(format!(
                "delta must be > 0, got {}",
                self.order_rate
            )));
        }
        // N is monotone in F for both families, so the endpoints suffice.
        self.members(fee_min)?;
        self.members(fee_max)?;
        Ok(())
    }
}

/// Potential premium demand `c1(F) = N(F) * delta`.
pub fn potential_market(fee_model: &FeeModel, fee: f64) -> Result<f64> {
    Ok(fee_model.members(fee)? * fee_model.order_rate)
}

/// Phase lengths of one shipment cycle: fast service from the depot, then
/// strategically lost regular demand, then regular service.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShipmentPolicy {
    #[serde(rename = "t1")]
    pub fast: f64,
    #[serde(rename = "t2")]
    pub lost: f64,
    #[serde(rename = "t3")]
    pub regular: f64,
}

impl ShipmentPolicy {
    pub fn new(fast: f64, lost: f64, regular: f64) -> Self {
        Self { fast, lost, regular }
    }

    pub fn cycle_length(&self) -> f64 {
        self.fast + self.lost + self.regular
    }

    /// Depot stock right after a truck arrives.
    pub fn max_inventory(&self, premium_demand: f64, regular_demand: f64) -> f64 {
        premium_demand * self.cycle_length() + regular_demand * self.fast
    }

    pub fn validate(&self) -> Result<()> {
        let phases = [self.fast, self.lost, self.regular];
        if phases.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidPolicy(format!("phase lengths must be >= 0: {self:?}")));
        }
        if self.cycle_length() <= 0.0 {
            return Err(Error::InvalidPolicy("cycle length must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    /// Realized over declared maximum delivery time.
    Mdt,
    /// Share of the cycle in which regular customers get non-premium service.
    Nps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalWeight {
    pub kind: SignalKind,
    pub weight: f64,
}

/// The quantity premium customers observe through word of mouth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalSpec {
    Mdt,
    Nps,
    Weighted(Vec<SignalWeight>),
}

impl SignalSpec {
    pub fn validate(&self) -> Result<()> {
        if let SignalSpec::Weighted(ws) = self {
            if ws.is_empty() {
                return Err(Error::InvalidParams("weighted signal needs at least one weight".into()));
            }
            if ws.iter().any(|w| !(w.weight >= 0.0)) {
                return Err(Error::InvalidParams("signal weights must be >= 0".into()));
            }
            let total: f64 = ws.iter().map(|w| w.weight).sum();
            if (total - 1.0).abs() > EPS_NUM {
                return Err(Error::InvalidParams(format!("signal weights sum to {total}, not 1")));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &'static str {
        match self {
            SignalSpec::Mdt => "MDT",
            SignalSpec::Nps => "NPS",
            SignalSpec::Weighted(_) => "weighted",
        }
    }
}

fn signal_component(kind: SignalKind, policy: &ShipmentPolicy, tau: f64) -> f64 {
    match kind {
        SignalKind::Mdt => policy.regular / tau,
        SignalKind::Nps => (policy.lost + policy.regular) / policy.cycle_length(),
    }
}

/// Evaluates the signal emitted by `policy`.
///
/// No clamping happens here; the result lies in `[0, 1]` whenever the policy
/// respects `t3 <= tau`.
pub fn signal(spec: &SignalSpec, policy: &ShipmentPolicy, tau: f64) -> Result<f64> {
    if policy.cycle_length() <= 0.0 {
        return Err(Error::InvalidPolicy("cycle length must be > 0".into()));
    }
    Ok(match spec {
        SignalSpec::Mdt => signal_component(SignalKind::Mdt, policy, tau),
        SignalSpec::Nps => signal_component(SignalKind::Nps, policy, tau),
        SignalSpec::Weighted(ws) => ws
            .iter()
            .map(|w| w.weight * signal_component(w.kind, policy, tau))
            .sum(),
    })
}

/// Premium customer sensitivity to the observed signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomerResponse {
    #[serde(rename = "c2")]
    pub sensitivity: f64,
}

impl CustomerResponse {
    pub fn new(sensitivity: f64) -> Self {
        Self { sensitivity }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sensitivity.is_finite() && self.sensitivity >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "c2 must be >= 0, got {}",
                self.sensitivity
            )));
        }
        Ok(())
    }

    /// `theta^c2` with `0^0 = 1`.
    pub fn attenuation(&self, theta: f64) -> f64 {
        if self.sensitivity == 0.0 {
            1.0
        } else {
            theta.powf(self.sensitivity)
        }
    }
}

/// Realized premium demand `c1(F) * theta^c2`.
pub fn respond(resp: &CustomerResponse, fee_model: &FeeModel, fee: f64, theta: f64) -> Result<f64> {
    Ok(potential_market(fee_model, fee)? * resp.attenuation(theta))
}

/// Average profit rate of the reactive (no WoM knowledge) model at a fixed
/// premium demand. Membership revenue is not part of this objective.
pub fn profit_m1(params: &MarketParams, policy: &ShipmentPolicy, premium_demand: f64) -> Result<f64> {
    let cycle = policy.cycle_length();
    if cycle <= 0.0 {
        return Err(Error::InvalidPolicy("cycle length must be > 0".into()));
    }
    Ok(profit_m1_unchecked(params, policy, premium_demand))
}

#[inline]
pub(crate) fn profit_m1_unchecked(params: &MarketParams, policy: &ShipmentPolicy, lp: f64) -> f64 {
    let MarketParams {
        revenue: r,
        shipment_cost: k,
        holding_cost: h,
        regular_demand: lr,
        ..
    } = *params;
    let t = policy.cycle_length();
    let t1 = policy.fast;
    r * lp + r * lr * (t1 + policy.regular) / t
        - h * lp * t / 2.0
        - h * lr * t1 * t1 / (2.0 * t)
        - k / t
}

/// Membership revenue rate `F lambda_p / (delta M)`.
pub fn fee_revenue(params: &MarketParams, fee_model: &FeeModel, fee: f64, premium_demand: f64) -> f64 {
    fee * premium_demand / (fee_model.order_rate * params.membership_duration)
}

/// Average profit rate including membership revenue.
pub fn profit_m2(
    params: &MarketParams,
    fee_model: &FeeModel,
    policy: &ShipmentPolicy,
    fee: f64,
    premium_demand: f64,
) -> Result<f64> {
    fee_model.members(fee)?;
    Ok(profit_m1(params, policy, premium_demand)?
        + fee_revenue(params, fee_model, fee, premium_demand))
}
