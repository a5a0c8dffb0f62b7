//! Acceptance criteria. Each test prints one `criterion N PASS|FAIL` line and
//! fails when the criterion is not met.

use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use affine_cf::gensym::{
    correction_series, GeneralizedEngine, GeneralizedSeries, HestonBaseline, Recursion,
};
use affine_cf::multiindex::{is_member, ExponentPair, MultiIndex};
use affine_cf::oracle::{
    heston_cf, levy_khintchine_cf, riccati_cf, CirParams, HestonParams, IntegratorConfig,
    VasicekParams,
};
use affine_cf::series::{
    BetaRule, CfEngine, GlobalEngine, LocalEngine, PlainSeries, TimeTransform,
};
use affine_cf::symalg::counting::factorial_u128;
use affine_cf::symalg::{
    coefficient_recursion, counting_triangle, cross_check, d_series, AtomKey, Monomial, SymPoly,
};
use affine_cf::symbol::{imag, AffineModel, SymbolTable};
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use serde_json::json;

fn finish(n: u32, started: Instant, budget: Duration, outcome: Result<String, String>) {
    let elapsed = started.elapsed();
    let outcome = outcome.and_then(|msg| {
        if elapsed <= budget {
            Ok(msg)
        } else {
            Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}"))
        }
    });
    // written to the stdout handle so the line survives the test harness capture
    let line = match &outcome {
        Ok(msg) => format!("criterion {n} PASS: {msg} ({elapsed:.2?})"),
        Err(msg) => format!("criterion {n} FAIL: {msg} ({elapsed:.2?})"),
    };
    writeln!(std::io::stdout().lock(), "{line}").unwrap();
    if let Err(msg) = outcome {
        panic!("criterion {n} failed: {msg}");
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn local_engine(model: &AffineModel, k: usize) -> LocalEngine {
    LocalEngine::new(Arc::new(PlainSeries::build(Arc::new(model.clone()), k)))
}

fn vasicek() -> VasicekParams {
    VasicekParams {
        a0: 0.04,
        b0: 0.1,
        b1: -0.5,
    }
}

fn cir() -> CirParams {
    CirParams {
        a1: 0.09,
        b0: 0.06,
        b1: -0.8,
    }
}

fn heston() -> HestonParams {
    HestonParams::new(0.01, -0.5, 0.08, 2.0, 0.4, -0.7)
}

fn compound_poisson() -> AffineModel {
    AffineModel::from_json_value(json!({
        "dimension": 1,
        "a0": [[0.04]],
        "b0": [0.05],
        "jumps": [
            {"type": "gaussian", "intensity": 0.5, "mean": [-0.1], "covariance": [[0.04]]},
            {"type": "none"}
        ]
    }))
    .unwrap()
}

fn brownian(a: f64, b: f64) -> AffineModel {
    let mut m = AffineModel::zero(1);
    m.a0 = vec![vec![a]];
    m.b0 = vec![b];
    m
}

#[test]
fn criterion_1_coefficient_rows() {
    let start = Instant::now();
    let rows = coefficient_recursion(1, 3);
    let pair = ExponentPair::univariate;
    // The reference row 3 lists `((0,0,2),(2,0,0))`, whose entries sum to 5 and
    // so cannot index a third-order term; its monomial (d^2 sigma) sigma_1^2
    // is the pair `((0,0,1),(2,0,0))`.
    let golden: Vec<Vec<(ExponentPair, BigRational)>> = vec![
        vec![(pair(&[1], &[0]), q(1, 1))],
        vec![
            (pair(&[2, 0], &[0, 0]), q(1, 2)),
            (pair(&[0, 1], &[1, 0]), q(1, 2)),
        ],
        vec![
            (pair(&[3, 0, 0], &[0, 0, 0]), q(1, 6)),
            (pair(&[1, 1, 0], &[1, 0, 0]), q(1, 2)),
            (pair(&[0, 1, 0], &[1, 1, 0]), q(1, 6)),
            (pair(&[0, 0, 1], &[2, 0, 0]), q(1, 6)),
        ],
    ];
    let mut problems = Vec::new();
    for (k, want) in golden.iter().enumerate() {
        let got = &rows[k + 1];
        if got.len() != want.len() {
            problems.push(format!(
                "row {} has {} entries, want {}",
                k + 1,
                got.len(),
                want.len()
            ));
        }
        for (p, c) in want {
            match got.get(p) {
                Some(v) if v == c => {}
                other => problems.push(format!("row {} {p}: got {other:?}, want {c}", k + 1)),
            }
        }
    }
    if rows[1].contains_key(&pair(&[0], &[1])) || is_member(&pair(&[0], &[1])) {
        problems.push("((0),(1)) must not be in M_1".into());
    }
    if is_member(&pair(&[0, 0, 2], &[2, 0, 0])) {
        problems.push("((0,0,2),(2,0,0)) unexpectedly a member of M_3".into());
    }
    let outcome = if problems.is_empty() {
        Ok("rows 1-3 equal 1; 1/2, 1/2; 1/6, 1/2, 1/6, 1/6".to_string())
    } else {
        Err(problems.join("; "))
    };
    finish(1, start, Duration::from_secs(1), outcome);
}

fn s(d: usize, eps: &[u32]) -> AtomKey {
    assert_eq!(eps.len(), d);
    AtomKey::sigma(MultiIndex::new(eps.iter().copied()))
}

fn sl(l: usize, eps: &[u32]) -> AtomKey {
    AtomKey::sigma_slope(l, MultiIndex::new(eps.iter().copied()))
}

fn unit(d: usize, l: usize) -> Vec<u32> {
    MultiIndex::unit(d, l).entries().to_vec()
}

fn sum_units(d: usize, k: usize, l: usize) -> Vec<u32> {
    let mut e = unit(d, k);
    e[l] += 1;
    e
}

/// The reference `d_1, d_2, d_3` in dimension `d`. In the double sums the
/// slope factors carry the summation indices (`sigma_k`, `sigma_l`).
fn reference_terms(d: usize) -> Vec<SymPoly> {
    let z = vec![0u32; d];
    let term = |c: BigRational, f: Vec<(AtomKey, u32)>| {
        SymPoly::from_terms([(Monomial::from_factors(f), c)])
    };
    let mut d1 = SymPoly::zero();
    d1 += &term(q(1, 1), vec![(s(d, &z), 1)]);
    let mut d2 = term(q(1, 2), vec![(s(d, &z), 2)]);
    for l in 0..d {
        d2 += &term(q(1, 2), vec![(s(d, &unit(d, l)), 1), (sl(l + 1, &z), 1)]);
    }
    let mut d3 = term(q(1, 6), vec![(s(d, &z), 3)]);
    for l in 0..d {
        d3 += &term(
            q(3, 6),
            vec![(s(d, &z), 1), (s(d, &unit(d, l)), 1), (sl(l + 1, &z), 1)],
        );
    }
    for k in 0..d {
        for l in 0..d {
            d3 += &term(
                q(1, 6),
                vec![
                    (s(d, &unit(d, k)), 1),
                    (sl(k + 1, &unit(d, l)), 1),
                    (sl(l + 1, &z), 1),
                ],
            );
            let mut both = vec![(s(d, &sum_units(d, k, l)), 1)];
            if k == l {
                both.push((sl(k + 1, &z), 2));
            } else {
                both.push((sl(k + 1, &z), 1));
                both.push((sl(l + 1, &z), 1));
            }
            d3 += &term(q(1, 6), both);
        }
    }
    vec![SymPoly::one(), d1, d2, d3]
}

#[test]
fn criterion_2_series_terms() {
    let start = Instant::now();
    let mut problems = Vec::new();
    for d in [1, 2, 3] {
        let got = d_series(d, 3);
        let want = reference_terms(d);
        for k in 0..=3 {
            if got[k] != want[k] {
                problems.push(format!("d = {d}, d_{k}: got {}, want {}", got[k], want[k]));
            }
        }
    }
    let outcome = if problems.is_empty() {
        Ok("d_1, d_2, d_3 match term for term in dimensions 1, 2, 3".to_string())
    } else {
        Err(problems.join("; "))
    };
    finish(2, start, Duration::from_secs(1), outcome);
}

#[test]
fn criterion_3_cross_recursion() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut compared = 0;
    for (dim, kmax) in [(1usize, 8u32), (2, 5)] {
        let series = d_series(dim, kmax as usize);
        let rows = coefficient_recursion(dim, kmax);
        for k in 0..=kmax {
            match cross_check(&series[k as usize], &rows[k as usize], dim, k) {
                Ok(r) if r.ok() => compared += r.compared,
                Ok(r) => problems.push(format!(
                    "d = {dim}, k = {k}: {} mismatches, {} non-members",
                    r.mismatches.len(),
                    r.non_members.len()
                )),
                Err(e) => problems.push(format!("d = {dim}, k = {k}: {e}")),
            }
        }
    }
    let outcome = if problems.is_empty() {
        Ok(format!(
            "{compared} coefficients agree exactly (d = 1, k <= 8; d = 2, k <= 5)"
        ))
    } else {
        Err(problems.join("; "))
    };
    finish(3, start, Duration::from_secs(30), outcome);
}

#[test]
fn criterion_4_counting_triangle() {
    let start = Instant::now();
    let expected: Vec<Vec<u128>> = vec![
        vec![1],
        vec![1, 1],
        vec![1, 3, 2],
        vec![1, 6, 10, 3],
        vec![1, 10, 34, 45, 4],
    ];
    let tri = counting_triangle(12);
    let mut problems = Vec::new();
    for (n, want) in expected.iter().enumerate() {
        let got = tri.row(n + 1);
        if got != want.as_slice() {
            problems.push(format!("row {} is {got:?}, expected {want:?}", n + 1));
        }
    }
    if tri.row_sum(5) != 94 {
        problems.push(format!("R_5 = {}, expected 94", tri.row_sum(5)));
    }
    for n in 1..=12 {
        if tri.row_sum(n) > factorial_u128(n) {
            problems.push(format!("R_{n} = {} exceeds {n}!", tri.row_sum(n)));
        }
    }
    let outcome = if problems.is_empty() {
        Ok("rows 1-5 and R_5 = 94 match, R_n <= n! for n <= 12".to_string())
    } else {
        Err(problems.join("; "))
    };
    finish(4, start, Duration::from_secs(10), outcome);
}

#[test]
fn criterion_5_levy_equivalence() {
    let start = Instant::now();
    let models = [
        ("brownian motion", brownian(0.4, 0.0)),
        ("drifted brownian motion", brownian(0.2, 0.5)),
        ("gaussian compound poisson", compound_poisson()),
    ];
    let us = linspace(-3.0, 3.0, 21);
    let ts = [0.1, 0.5, 1.0];
    let x = [0.3];
    let mut worst = 0.0f64;
    let mut problems = Vec::new();
    for (name, m) in &models {
        let sup = us
            .iter()
            .map(|&u| m.eval_symbol(&x, &[u]).unwrap().norm())
            .fold(0.0, f64::max);
        if ts[2] * sup > 2.0 {
            problems.push(format!("{name}: t sup|sigma| = {} exceeds 2", ts[2] * sup));
            continue;
        }
        let engine = local_engine(m, 20);
        for &t in &ts {
            for &u in &us {
                let got = engine.evaluate(&x, &[u], t).unwrap().value;
                let want = levy_khintchine_cf(m, &x, &[u], t).unwrap();
                worst = worst.max(rel_err(got, want));
            }
        }
    }
    if worst > 1e-10 {
        problems.push(format!("max relative error {worst:.3e} > 1e-10"));
    }
    let outcome = if problems.is_empty() {
        Ok(format!(
            "3 models x 63 points, max relative error {worst:.3e}"
        ))
    } else {
        Err(problems.join("; "))
    };
    finish(5, start, Duration::from_secs(5), outcome);
}

/// Truncation order of the globalized runs; only the local runs are tied to K = 14.
const GLOBAL_ORDER: usize = 20;

#[test]
fn criterion_6_affine_diffusions() {
    let start = Instant::now();
    let config = IntegratorConfig::default();
    let cases = [
        ("vasicek", vasicek().to_model(), [-0.2, 0.1, 0.5]),
        ("cir", cir().to_model(), [0.01, 0.1, 0.5]),
    ];
    let us = linspace(-3.0, 3.0, 13);
    let (mut local_worst, mut global_worst) = (0.0f64, 0.0f64);
    let mut problems = Vec::new();
    for (name, m, xs) in &cases {
        let local = local_engine(m, 14);
        let long = Arc::new(PlainSeries::build(Arc::new(m.clone()), GLOBAL_ORDER));
        let global = GlobalEngine::new(long, BetaRule::Auto).unwrap();
        for &x in xs {
            for &u in &us {
                for t in [0.1, 0.25, 0.5] {
                    let want = riccati_cf(m, &[x], &[u], t, config).unwrap();
                    let got = local.evaluate(&[x], &[u], t).unwrap().value;
                    local_worst = local_worst.max(rel_err(got, want));
                }
                for t in [0.5, 1.0, 2.0, 3.5, 5.0] {
                    let want = riccati_cf(m, &[x], &[u], t, config).unwrap();
                    match global.evaluate(&[x], &[u], t) {
                        Ok(r) => global_worst = global_worst.max(rel_err(r.value, want)),
                        Err(e) => {
                            problems.push(format!("{name} global at x={x}, u={u}, t={t}: {e}"))
                        }
                    }
                }
            }
        }
    }
    if local_worst > 1e-6 {
        problems.push(format!("local max relative error {local_worst:.3e} > 1e-6"));
    }
    if global_worst > 1e-4 {
        problems.push(format!(
            "global max relative error {global_worst:.3e} > 1e-4"
        ));
    }
    let outcome = if problems.is_empty() {
        Ok(format!(
            "local K = 14 (t <= 0.5) {local_worst:.3e}, global K = {GLOBAL_ORDER} (t <= 5) {global_worst:.3e}"
        ))
    } else {
        Err(problems.join("; "))
    };
    finish(6, start, Duration::from_secs(60), outcome);
}

#[test]
fn criterion_7_heston() {
    let start = Instant::now();
    let p = heston();
    let model = p.to_model();
    let config = IntegratorConfig::default();
    let us = linspace(-3.0, 3.0, 13);
    let ts = [0.1, 0.5, 1.0, 2.0];
    let (x, v) = (0.0, 0.04);
    let baseline = Arc::new(HestonBaseline::from_target(&model).unwrap());
    let series =
        GeneralizedSeries::build(Arc::new(model.clone()), baseline, 10, Recursion::Difference)
            .unwrap();
    let engine = GeneralizedEngine::new(Arc::new(series)).unwrap();
    let (mut oracle_worst, mut gen_worst) = (0.0f64, 0.0f64);
    for &t in &ts {
        for &u in &us {
            let closed = heston_cf(&p, x, v, u, t).unwrap();
            let ode = riccati_cf(&model, &[x, v], &[u, 0.0], t, config).unwrap();
            oracle_worst = oracle_worst.max(rel_err(closed, ode));
            let gen = engine.evaluate(&[x, v], &[u, 0.0], t).unwrap().value;
            gen_worst = gen_worst.max(rel_err(gen, closed));
        }
    }
    let mut problems = Vec::new();
    if oracle_worst > 1e-7 {
        problems.push(format!("closed form vs Riccati {oracle_worst:.3e} > 1e-7"));
    }
    if gen_worst > 1e-10 {
        problems.push(format!(
            "generalized vs closed form {gen_worst:.3e} > 1e-10"
        ));
    }
    let outcome = if problems.is_empty() {
        Ok(format!(
            "closed vs Riccati {oracle_worst:.3e}, generalized vs closed {gen_worst:.3e}"
        ))
    } else {
        Err(problems.join("; "))
    };
    finish(7, start, Duration::from_secs(60), outcome);
}

#[test]
fn criterion_8_nilpotency() {
    let start = Instant::now();
    let models = [
        ("vasicek", vasicek().to_model()),
        ("cir", cir().to_model()),
        ("heston", heston().to_model()),
        ("compound poisson", compound_poisson()),
    ];
    let mut problems = Vec::new();
    for (name, m) in &models {
        let d = correction_series(m, m, 10).unwrap();
        if d[0] != SymPoly::one() {
            problems.push(format!("{name}: d_0 = {}", d[0]));
        }
        for (k, p) in d.iter().enumerate().skip(1) {
            if !p.is_zero() {
                problems.push(format!("{name}: d_{k} has {} terms", p.len()));
            }
        }
    }
    let outcome = if problems.is_empty() {
        Ok("d_k = 0 for k = 1..10 on 4 models".to_string())
    } else {
        Err(problems.join("; "))
    };
    finish(8, start, Duration::from_secs(5), outcome);
}

#[test]
fn criterion_9_transform_and_overlap() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut round_trip = 0.0f64;
    for beta in [0.25, 1.0, 4.0] {
        let tr = TimeTransform::new(beta).unwrap();
        for i in 0..100 {
            let tau = i as f64 / 100.0;
            let back = tr.inverse(tr.forward(tau).unwrap()).unwrap();
            round_trip = round_trip.max((back - tau).abs());
        }
    }
    if round_trip > 1e-13 {
        problems.push(format!("round trip error {round_trip:.3e} > 1e-13"));
    }
    let models = [
        ("brownian", brownian(0.4, 0.2), vec![0.0]),
        ("vasicek", vasicek().to_model(), vec![-0.2, 0.3]),
        ("cir", cir().to_model(), vec![0.05, 0.4]),
    ];
    let (mut compared, mut overlap) = (0usize, 0.0f64);
    for (name, m, xs) in &models {
        let plain = Arc::new(PlainSeries::build(Arc::new(m.clone()), 24));
        let local = LocalEngine::new(plain.clone());
        let global = GlobalEngine::new(plain, BetaRule::Auto).unwrap();
        for &x in xs {
            for u in linspace(-2.0, 2.0, 9) {
                for t in [0.05, 0.1, 0.2, 0.4, 0.8] {
                    let (a, b) = match (
                        local.evaluate(&[x], &[u], t),
                        global.evaluate(&[x], &[u], t),
                    ) {
                        (Ok(a), Ok(b)) => (a, b),
                        (Err(e), _) | (_, Err(e)) => {
                            problems.push(format!("{name} at x={x}, u={u}, t={t}: {e}"));
                            continue;
                        }
                    };
                    if a.tail <= 1e-10 && b.tail <= 1e-10 {
                        compared += 1;
                        overlap = overlap.max((a.value - b.value).norm());
                    }
                }
            }
        }
    }
    if compared == 0 {
        problems.push("no point with both tails <= 1e-10".into());
    }
    if overlap > 1e-8 {
        problems.push(format!("local vs global {overlap:.3e} > 1e-8"));
    }
    let outcome = if problems.is_empty() {
        Ok(format!(
            "round trip {round_trip:.3e} on 300 points, overlap {overlap:.3e} on {compared} points"
        ))
    } else {
        Err(problems.join("; "))
    };
    finish(9, start, Duration::from_secs(30), outcome);
}

/// One randomized model with a state point, frequency and horizon.
#[derive(Debug, Clone)]
struct Sample {
    model: AffineModel,
    levy: bool,
    x: Vec<f64>,
    u: Vec<f64>,
    t: f64,
}

fn levy_sample() -> impl Strategy<Value = Sample> {
    (
        0.0..0.5f64,
        -0.5..0.5f64,
        0.0..1.0f64,
        -0.3..0.3f64,
        0.0..0.1f64,
        -3.0..3.0f64,
        -1.0..1.0f64,
    )
        .prop_map(|(a, b, lam, mean, var, u, x)| {
            let model = AffineModel::from_json_value(json!({
                "dimension": 1,
                "a0": [[a]],
                "b0": [b],
                "jumps": [
                    {"type": "gaussian", "intensity": lam, "mean": [mean], "covariance": [[var]]},
                    {"type": "none"}
                ]
            }))
            .unwrap();
            Sample {
                model,
                levy: true,
                x: vec![x],
                u: vec![u],
                t: 0.0,
            }
        })
}

fn diffusion_sample() -> impl Strategy<Value = Sample> {
    let vas = (
        0.01..0.1f64,
        -0.2..0.2f64,
        -1.0..0.0f64,
        -0.5..0.5f64,
        -2.0..2.0f64,
        0.01..0.4f64,
    )
        .prop_map(|(a0, b0, b1, x, u, t)| Sample {
            model: VasicekParams { a0, b0, b1 }.to_model(),
            levy: false,
            x: vec![x],
            u: vec![u],
            t,
        });
    let cir = (
        0.01..0.2f64,
        0.0..0.1f64,
        -1.0..0.0f64,
        0.0..0.5f64,
        -2.0..2.0f64,
        0.01..0.4f64,
    )
        .prop_map(|(a1, b0, b1, x, u, t)| Sample {
            model: CirParams { a1, b0, b1 }.to_model(),
            levy: false,
            x: vec![x],
            u: vec![u],
            t,
        });
    let hes = (
        (
            0.0..0.05f64,
            -0.6..-0.4f64,
            0.02..0.1f64,
            1.0..3.0f64,
            0.2..0.6f64,
            -0.9..0.0f64,
        ),
        (0.0..0.1f64, -2.0..2.0f64, 0.01..0.3f64),
    )
        .prop_map(|((b10, b11, b20, b21, sig, rho), (v, u, t))| Sample {
            model: HestonParams::new(b10, b11, b20, b21, sig, rho).to_model(),
            levy: false,
            x: vec![0.0, v],
            u: vec![u, 0.0],
            t,
        });
    prop_oneof![vas, cir, hes]
}

fn check_sample(s: &Sample) -> Result<(), TestCaseError> {
    let m = &s.model;
    let engine = local_engine(m, 16);
    let mut t = s.t;
    if s.levy {
        // horizon with t sup|sigma| = 0.5 at this frequency
        let sig = m.eval_symbol(&s.x, &s.u).unwrap().norm();
        t = if sig > 0.0 { 0.5 / sig } else { 1.0 };
    }
    let zero = vec![0.0; m.dim()];
    let at_zero = engine.evaluate(&s.x, &zero, t).unwrap().value;
    prop_assert_eq!(at_zero, Complex64::new(1.0, 0.0), "u = 0 normalization");

    let r = engine.evaluate(&s.x, &s.u, t).unwrap();
    let neg: Vec<f64> = s.u.iter().map(|v| -v).collect();
    let rn = engine.evaluate(&s.x, &neg, t).unwrap();
    prop_assert!(
        (rn.value - r.value.conj()).norm() <= 1e-12,
        "hermitian: {} vs {}",
        rn.value,
        r.value
    );

    if r.tail <= 1e-8 {
        prop_assert!(r.value.norm() <= 1.0 + 1e-6, "modulus {}", r.value.norm());
    }

    if s.levy {
        // contributions are (t sigma)^k / k!, so they decay geometrically
        let ts = m.eval_symbol(&s.x, &s.u).unwrap() * t;
        let mut want = Complex64::new(1.0, 0.0);
        for (k, c) in r.contributions.iter().enumerate() {
            want = want * ts / (k + 1) as f64;
            prop_assert!(
                (c - want).norm() <= 1e-13 * want.norm().max(1e-300),
                "term {} is {} vs {}",
                k + 1,
                c,
                want
            );
            prop_assert!(
                c.norm() <= 0.5f64.powi(k as i32 + 1) * (1.0 + 1e-12),
                "term {} exceeds 2^-k",
                k + 1
            );
            if k >= 3 && r.contributions[k - 1].norm() > 0.0 {
                prop_assert!(
                    c.norm() <= 0.75 * r.contributions[k - 1].norm(),
                    "ratio at term {}",
                    k + 1
                );
            }
        }
    }

    // xi-derivatives from the table against central differences of the table
    let xi = imag(&s.u);
    let h = 1e-5;
    let table = SymbolTable::new(m, &s.x, &s.u, 3).unwrap();
    for l in 0..m.dim() {
        let mut up = xi.clone();
        let mut dn = xi.clone();
        up[l] += h;
        dn[l] -= h;
        let tu = SymbolTable::at(m, &s.x, &up, 3).unwrap();
        let td = SymbolTable::at(m, &s.x, &dn, 3).unwrap();
        for eps in affine_cf::multiindex::enumerate_up_to(m.dim(), 2) {
            let fd = (tu.base(&eps) - td.base(&eps)) / (2.0 * h);
            let exact = table.base(&eps.raised(l));
            prop_assert!(
                (fd - exact).norm() <= 1e-7 * exact.norm().max(1.0),
                "d_{} of d^{} sigma: fd {} vs {}",
                l + 1,
                eps,
                fd,
                exact
            );
            for j in 1..=m.dim() {
                let fd = (tu.slope(j, &eps) - td.slope(j, &eps)) / (2.0 * h);
                let exact = table.slope(j, &eps.raised(l));
                prop_assert!(
                    (fd - exact).norm() <= 1e-7 * exact.norm().max(1.0),
                    "slope {} at {}",
                    j,
                    eps
                );
            }
        }
    }
    Ok(())
}

#[test]
fn criterion_10_property_suite() {
    let start = Instant::now();
    let cases = 250;
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strategy = prop_oneof![levy_sample(), diffusion_sample()];
    let outcome = runner
        .run(&strategy, |s| check_sample(&s))
        .map(|_| format!("{cases} randomized model/point samples"))
        .map_err(|e| e.to_string());
    finish(10, start, Duration::from_secs(120), outcome);
}
