use std::sync::Arc;

use affine_cf::oracle::{
    cir_cf, closed_form_oracle, heston_cf, riccati_cf, solve_riccati, vasicek_cf, CirParams,
    HestonParams, IntegratorConfig, VasicekParams,
};
use affine_cf::registry::{EngineContext, Strategies};
use affine_cf::series::{CfEngine, CfResult, Mode};
use affine_cf::symbol::AffineModel;
use affine_cf::Result;
use num_complex::Complex64;
use proptest::prelude::*;

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn vasicek_closed_form_matches_riccati(
        a0 in 0.0..0.2f64, b0 in -0.2..0.2f64, b1 in -1.5..0.5f64,
        x in -1.0..1.0f64, u in -3.0..3.0f64, t in 0.01..3.0f64,
    ) {
        let p = VasicekParams { a0, b0, b1 };
        let want = riccati_cf(&p.to_model(), &[x], &[u], t, IntegratorConfig::default()).unwrap();
        prop_assert!(close(vasicek_cf(&p, x, u, t), want, 1e-9));
    }

    #[test]
    fn cir_closed_form_matches_riccati(
        a1 in 0.01..0.3f64, b0 in 0.0..0.2f64, b1 in -1.5..0.0f64,
        x in 0.0..1.0f64, u in -3.0..3.0f64, t in 0.01..3.0f64,
    ) {
        let p = CirParams { a1, b0, b1 };
        let want = riccati_cf(&p.to_model(), &[x], &[u], t, IntegratorConfig::default()).unwrap();
        prop_assert!(close(cir_cf(&p, x, u, t).unwrap(), want, 1e-9));
    }

    #[test]
    fn heston_closed_form_matches_riccati(
        b11 in -0.6..-0.4f64, b20 in 0.02..0.1f64, b21 in 0.5..3.0f64,
        sigma in 0.1..0.8f64, rho in -0.95..0.5f64,
        v in 0.0..0.2f64, u in -4.0..4.0f64, t in 0.05..3.0f64,
    ) {
        let p = HestonParams::new(0.02, b11, b20, b21, sigma, rho);
        let want = riccati_cf(&p.to_model(), &[0.1, v], &[u, 0.0], t, IntegratorConfig::default()).unwrap();
        prop_assert!(close(heston_cf(&p, 0.1, v, u, t).unwrap(), want, 1e-8));
    }
}

#[test]
fn rk4_error_estimate_tracks_the_closed_form() {
    let p = VasicekParams {
        a0: 0.04,
        b0: 0.1,
        b1: -0.5,
    };
    let sol = solve_riccati(&p.to_model(), &[2.0], 4.0, IntegratorConfig { steps: 200 }).unwrap();
    let exact = vasicek_cf(&p, 0.3, 2.0, 4.0);
    let err = (sol.value(&[0.3]) - exact).norm();
    assert!(
        err <= 10.0 * sol.error_estimate.max(1e-15),
        "{err} vs {}",
        sol.error_estimate
    );
}

#[test]
fn closed_form_dispatch() {
    let v = Arc::new(
        VasicekParams {
            a0: 0.04,
            b0: 0.1,
            b1: -0.5,
        }
        .to_model(),
    );
    assert_eq!(closed_form_oracle(v).unwrap().name(), "vasicek");
    let mut mixed = AffineModel::zero(2);
    mixed.a0 = vec![vec![0.1, 0.0], vec![0.0, 0.1]];
    mixed.b_slope = vec![vec![-0.5, 0.2], vec![0.0, -0.5]];
    let err = closed_form_oracle(Arc::new(mixed)).err().unwrap();
    assert_eq!(err.kind(), "not_applicable");
}

#[test]
fn registry_lists_names_for_unknown_strategies() {
    let s = Strategies::builtin();
    let model = Arc::new(AffineModel::zero(1));
    let err = s.engine("nope", &EngineContext::new(model)).err().unwrap();
    let msg = err.to_string();
    for name in ["local", "global", "generalized"] {
        assert!(msg.contains(name), "{msg}");
    }
    assert!(s.oracles.contains("riccati"));
    assert_eq!(s.baselines.names(), ["heston", "vasicek", "zero"]);
}

struct Constant;

impl CfEngine for Constant {
    fn name(&self) -> &str {
        "constant"
    }

    fn order(&self) -> usize {
        0
    }

    fn evaluate(&self, _x: &[f64], _u: &[f64], _t: f64) -> Result<CfResult> {
        Ok(CfResult::assemble(
            Complex64::new(1.0, 0.0),
            Vec::new(),
            Mode::Local,
        ))
    }
}

#[test]
fn engines_can_be_registered_at_runtime() {
    let mut s = Strategies::builtin();
    s.engines.register(
        "constant",
        Arc::new(|_: &EngineContext| Ok(Box::new(Constant) as Box<dyn CfEngine>)),
    );
    let e = s
        .engine(
            "constant",
            &EngineContext::new(Arc::new(AffineModel::zero(1))),
        )
        .unwrap();
    assert_eq!(
        e.evaluate(&[0.0], &[1.0], 1.0).unwrap().value,
        Complex64::new(1.0, 0.0)
    );
}
