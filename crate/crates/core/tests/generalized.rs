use std::sync::Arc;

use affine_cf::gensym::{
    certify_baseline, default_residual_points, eval_baseline_cf, eval_generalized, Baseline, Expr,
    GeneralizedSeries, HestonBaseline, Recursion, UserBaseline, VasicekBaseline,
};
use affine_cf::oracle::{riccati_cf, vasicek_cf, HestonParams, IntegratorConfig, VasicekParams};
use affine_cf::symbol::AffineModel;
use num_complex::Complex64;
use serde_json::json;

const OU: &str = r#"{
  "name": "ou",
  "generator": {"dimension": 1, "a0": [[0.04]], "b0": [0.1], "b_slope": [[-0.5]]},
  "params": {"a": 0.04, "b": 0.1, "k": -0.5},
  "phi0": "i*u*b*(exp(k*t) - 1)/k - u^2*a*(exp(2*k*t) - 1)/(4*k)",
  "psi0": ["i*u*exp(k*t)"]
}"#;

#[test]
fn expressions_parse_and_evaluate() {
    let e = Expr::parse("-2^2 + sqrt(-4) + exp(i*pi)").unwrap();
    let v = e.eval(&Default::default()).unwrap();
    assert!((v - Complex64::new(-5.0, 2.0)).norm() < 1e-15, "{v}");
    assert_eq!(
        Expr::parse("a*t + u1").unwrap().variables(),
        ["a", "t", "u1"]
    );
    assert_eq!(Expr::parse("2 +").unwrap_err().kind(), "expression");
}

#[test]
fn user_baseline_matches_the_closed_form() {
    let b = UserBaseline::from_json_str(OU).unwrap();
    let p = VasicekParams {
        a0: 0.04,
        b0: 0.1,
        b1: -0.5,
    };
    for t in [0.1, 1.0, 3.0] {
        let got = eval_baseline_cf(&b, &[0.2], &[1.5], t).unwrap();
        assert!((got - vasicek_cf(&p, 0.2, 1.5, t)).norm() < 1e-13);
    }
    assert!(certify_baseline(&b, &default_residual_points(b.generator())).is_ok());
}

#[test]
fn user_baseline_rejects_unbound_names_and_wrong_solutions() {
    let unbound = OU.replace("i*u*exp(k*t)", "i*u*exp(kk*t)");
    assert_eq!(
        UserBaseline::from_json_str(&unbound).err().unwrap().kind(),
        "expression"
    );
    let wrong = UserBaseline::from_json_str(&OU.replace("i*u*exp(k*t)", "i*u*exp(2*k*t)")).unwrap();
    assert!(certify_baseline(&wrong, &default_residual_points(wrong.generator())).is_err());
}

#[test]
fn vasicek_baseline_matches_riccati() {
    let p = VasicekParams {
        a0: 0.04,
        b0: 0.1,
        b1: -0.5,
    };
    let b = VasicekBaseline::new(p);
    let got = eval_baseline_cf(&b, &[0.2], &[1.0], 0.5).unwrap();
    let want = riccati_cf(
        &p.to_model(),
        &[0.2],
        &[1.0],
        0.5,
        IntegratorConfig::default(),
    )
    .unwrap();
    assert!((got - want).norm() <= 1e-8);
}

#[test]
fn drift_baseline_recursions_agree_and_are_consistent() {
    let target = Arc::new(
        VasicekParams {
            a0: 0.04,
            b0: 0.1,
            b1: -0.5,
        }
        .to_model(),
    );
    let b: Arc<dyn Baseline> = Arc::new(VasicekBaseline::new(VasicekParams {
        a0: 0.0,
        b0: 0.1,
        b1: -0.5,
    }));
    let diff =
        GeneralizedSeries::build(target.clone(), b.clone(), 16, Recursion::Difference).unwrap();
    let brute = GeneralizedSeries::build(target.clone(), b, 16, Recursion::BruteForce).unwrap();
    let x = eval_generalized(&diff, &[0.1], &[1.0], 0.2).unwrap();
    let y = eval_generalized(&brute, &[0.1], &[1.0], 0.2).unwrap();
    assert!(
        (x.value - y.value).norm() <= 1e-7,
        "{} vs {}",
        x.value,
        y.value
    );
    assert_eq!(
        eval_generalized(&diff, &[0.1], &[0.0], 0.7).unwrap().value,
        Complex64::new(1.0, 0.0)
    );
    // the coefficients are frozen along psi_0(t, u); the diffusion part of
    // the difference symbol varies along it, so the error is O(t^2)
    let err = |t: f64| {
        let got = eval_generalized(&diff, &[0.2], &[1.0], t).unwrap().value;
        (got - riccati_cf(&target, &[0.2], &[1.0], t, IntegratorConfig::default()).unwrap()).norm()
    };
    let (e1, e2) = (err(0.1), err(0.05));
    assert!(e1 < 1e-3 && e1 / e2 > 3.5, "{e1} {e2}");
}

#[test]
fn heston_with_constant_jumps_matches_riccati() {
    let p = HestonParams::new(0.01, -0.5, 0.08, 2.0, 0.4, -0.7);
    let mut v = serde_json::to_value(p.to_model()).unwrap();
    v["jumps"] = json!([
        {"type": "gaussian", "intensity": 0.1, "mean": [-0.05, 0.0], "covariance": [[0.01, 0.0], [0.0, 0.0]]},
        {"type": "none"},
        {"type": "none"}
    ]);
    let target = Arc::new(AffineModel::from_json_value(v).unwrap());
    let b: Arc<dyn Baseline> = Arc::new(HestonBaseline::new(p).unwrap());
    let s = GeneralizedSeries::build(target.clone(), b, 12, Recursion::Difference).unwrap();
    for (u, t) in [(1.0, 0.5), (-2.0, 1.0), (3.0, 2.0)] {
        let got = eval_generalized(&s, &[0.0, 0.04], &[u, 0.0], t).unwrap();
        let want = riccati_cf(
            &target,
            &[0.0, 0.04],
            &[u, 0.0],
            t,
            IntegratorConfig::default(),
        )
        .unwrap();
        assert!(
            (got.value - want).norm() < 1e-9 * want.norm(),
            "u={u} t={t}: {} vs {want}",
            got.value
        );
    }
}
