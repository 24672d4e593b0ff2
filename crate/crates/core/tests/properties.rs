//! Randomized invariants of the domain model and both solvers.

use proptest::prelude::*;

use womops::domain::{
    profit_m1, respond, signal, CustomerResponse, FeeModel, MarketParams, ShipmentPolicy, SignalSpec,
};
use womops::m1::{candidate, solve_m1, M1Case};
use womops::m2::{check_lemma2, solve_m2, M2Problem, SearchSpec};

fn params(r: f64, k: f64, tau: f64) -> MarketParams {
    MarketParams {
        revenue: r,
        shipment_cost: k,
        holding_cost: 4.0,
        max_delivery_time: tau,
        regular_demand: 50.0,
        membership_duration: 30.0,
        fee_min: 10.0,
        fee_max: 100.0,
    }
}

fn policy() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..3.0f64, 0.0..3.0f64, 0.01..1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn signals_stay_in_the_unit_interval((t1, t2, frac) in policy(), tau in 0.5..7.0f64) {
        let p = ShipmentPolicy::new(t1, t2, frac * tau);
        for spec in [SignalSpec::Mdt, SignalSpec::Nps] {
            let s = signal(&spec, &p, tau).unwrap();
            prop_assert!((0.0..=1.0).contains(&s), "{spec:?}: {s}");
        }
    }

    #[test]
    fn response_is_monotone_in_the_signal(c2 in 0.0..4.0f64, a in 0.0..1.0f64, b in 0.0..1.0f64, fee in 10.0..90.0f64) {
        let fm = FeeModel::linear(100.0, 1.0, 5.0);
        let resp = CustomerResponse::new(c2);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(respond(&resp, &fm, fee, lo).unwrap() <= respond(&resp, &fm, fee, hi).unwrap() + 1e-9);
    }

    #[test]
    fn reactive_solution_beats_every_sampled_policy(
        r in 8.0..48.0f64,
        k in 1000.0..4000.0f64,
        tau in 1.0..7.0f64,
        lp in 1.0..500.0f64,
        samples in proptest::collection::vec(policy(), 32),
    ) {
        let pm = params(r, k, tau);
        let sol = solve_m1(&pm, lp).unwrap();
        for (t1, t2, frac) in samples {
            let p = ShipmentPolicy::new(t1, t2, frac * tau);
            let v = profit_m1(&pm, &p, lp).unwrap();
            prop_assert!(sol.profit >= v - 1e-9 * v.abs().max(1.0), "{p:?} earns {v} > {}", sol.profit);
        }
        for case in M1Case::ALL {
            if let Ok(Some(p)) = candidate(case, &pm, lp) {
                prop_assert!(sol.profit >= profit_m1(&pm, &p, lp).unwrap() - 1e-9);
            }
        }
        let p = sol.policy;
        prop_assert_eq!(M1Case::classify(&p, tau), sol.case);
        prop_assert!(p.fast > 0.0 || p.lost == 0.0);
        prop_assert!(p.regular >= tau || p.fast == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn equilibrium_solutions_are_self_consistent(
        r in 8.0..48.0f64,
        k in 1000.0..4000.0f64,
        tau in 1.0..7.0f64,
        c2 in 0.1..3.0f64,
        log_family in any::<bool>(),
        nps in any::<bool>(),
    ) {
        let fee_model = if log_family {
            FeeModel::logarithmic(20.0, 101.0, 5.0)
        } else {
            FeeModel::linear(100.0, 1.0, 5.0)
        };
        let problem = M2Problem {
            params: params(r, k, tau),
            fee_model,
            response: CustomerResponse::new(c2),
            signal: if nps { SignalSpec::Nps } else { SignalSpec::Mdt },
        };
        let sol = solve_m2(&problem, &SearchSpec::default()).unwrap();
        let theta = signal(&problem.signal, &sol.policy, tau).unwrap();
        let implied = respond(&problem.response, &problem.fee_model, sol.fee, theta).unwrap();
        prop_assert!((implied - sol.lambda_p_eq).abs() <= 1e-6 * implied.max(1.0), "{implied} vs {}", sol.lambda_p_eq);
        prop_assert!(sol.fee >= 10.0 && sol.fee <= 100.0);
        prop_assert!(sol.policy.regular <= tau + 1e-12);
        prop_assert!(sol.policy.fast <= r / 4.0 + 1e-6, "t1 = {} above r/h", sol.policy.fast);
        prop_assert!(check_lemma2(&problem, &sol).fast_within_bound);
        // the solver never does worse than the no-premium-stock policy at its own fee
        let simple = ShipmentPolicy::new(0.0, 0.0, tau);
        prop_assert!(sol.profit >= problem.profit(&simple, sol.fee).unwrap() - 1e-6);
    }
}

#[test]
fn reference_policy_profit_by_hand() {
    // revenue minus premium holding minus truck cost, no fast phase
    let pm = params(8.0, 2000.0, 2.0);
    let p = ShipmentPolicy::new(0.0, 0.0, 2.0);
    let revenue = 8.0 * 450.0 + 8.0 * 50.0;
    let holding = 4.0 * 450.0 * 2.0 / 2.0;
    let trucks = 2000.0 / 2.0;
    assert!((profit_m1(&pm, &p, 450.0).unwrap() - (revenue - holding - trucks)).abs() < 1e-9);
    assert!((revenue - holding - trucks - 1200.0).abs() < 1e-9);
}
