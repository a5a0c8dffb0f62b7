//! Baseline generators with known solutions `exp(phi_0 + psi_0 . x)`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use super::expr::{Env, Expr};
use crate::error::{Error, Result};
use crate::oracle::{HestonParams, VasicekParams};
use crate::symbol::{imag, AffineModel};

/// Step of the central differences for time derivatives.
pub const TIME_STEP: f64 = 1e-6;

/// Largest accepted residual `|d_t (phi_0 + psi_0 x) - sigma_0(x, psi_0)|`,
/// relative to `max(1, |sigma_0|)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;

/// `(f(t+h) - f(t-h)) / 2h`, or the one-sided second-order stencil near `t = 0`.
pub fn time_derivative<F>(f: F, t: f64, h: f64) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Vec<Complex64>>,
{
    if t >= h {
        let (a, b) = (f(t + h)?, f(t - h)?);
        Ok(a.iter().zip(&b).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    } else {
        let (f0, f1, f2) = (f(t)?, f(t + h)?, f(t + 2.0 * h)?);
        Ok((0..f0.len())
            .map(|i| (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) / (2.0 * h))
            .collect())
    }
}

/// A generator `A_0` together with its exponential-affine solution.
pub trait Baseline: Send + Sync {
    fn name(&self) -> &str;

    /// The model of `A_0`.
    fn generator(&self) -> &AffineModel;

    fn phi0(&self, t: f64, u: &[f64]) -> Result<Complex64>;

    fn psi0(&self, t: f64, u: &[f64]) -> Result<Vec<Complex64>>;

    fn dphi0(&self, t: f64, u: &[f64]) -> Result<Complex64> {
        Ok(time_derivative(|s| Ok(vec![self.phi0(s, u)?]), t, TIME_STEP)?[0])
    }

    fn dpsi0(&self, t: f64, u: &[f64]) -> Result<Vec<Complex64>> {
        time_derivative(|s| self.psi0(s, u), t, TIME_STEP)
    }

    /// `true` when `phi_0` and `psi_0` do not depend on `t`.
    fn is_static(&self) -> bool {
        false
    }
}

/// `exp(phi_0(t, u) + psi_0(t, u) . x)`.
pub fn eval_baseline_cf(b: &dyn Baseline, x: &[f64], u: &[f64], t: f64) -> Result<Complex64> {
    let psi = b.psi0(t, u)?;
    let phase: Complex64 = psi.iter().zip(x).map(|(p, v)| p * v).sum();
    Ok((b.phi0(t, u)? + phase).exp())
}

/// `sigma_0 = 0`, `phi_0 = 0`, `psi_0 = iu`.
pub struct ZeroBaseline {
    generator: AffineModel,
}

impl ZeroBaseline {
    pub fn new(dim: usize) -> Self {
        ZeroBaseline {
            generator: AffineModel::zero(dim),
        }
    }
}

impl Baseline for ZeroBaseline {
    fn name(&self) -> &str {
        "zero"
    }

    fn generator(&self) -> &AffineModel {
        &self.generator
    }

    fn phi0(&self, _t: f64, _u: &[f64]) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }

    fn psi0(&self, _t: f64, u: &[f64]) -> Result<Vec<Complex64>> {
        Ok(imag(u))
    }

    fn dphi0(&self, _t: f64, _u: &[f64]) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }

    fn dpsi0(&self, _t: f64, u: &[f64]) -> Result<Vec<Complex64>> {
        Ok(vec![Complex64::new(0.0, 0.0); u.len()])
    }

    fn is_static(&self) -> bool {
        true
    }
}

/// One-dimensional Gaussian mean-reverting baseline.
pub struct VasicekBaseline {
    params: VasicekParams,
    generator: AffineModel,
}

impl VasicekBaseline {
    pub fn new(params: VasicekParams) -> Self {
        VasicekBaseline {
            generator: params.to_model(),
            params,
        }
    }

    /// The jump-free part of `target`, if it has the Vasicek structure.
    pub fn from_target(target: &AffineModel) -> Result<Self> {
        let params = VasicekParams::from_model(&target.without_jumps()).ok_or_else(|| {
            Error::NotApplicable {
                kind: "baseline",
                name: "vasicek".into(),
                reason: "needs d = 1 and constant diffusion".into(),
            }
        })?;
        Ok(Self::new(params))
    }

    pub fn params(&self) -> &VasicekParams {
        &self.params
    }
}

impl Baseline for VasicekBaseline {
    fn name(&self) -> &str {
        "vasicek"
    }

    fn generator(&self) -> &AffineModel {
        &self.generator
    }

    fn phi0(&self, t: f64, u: &[f64]) -> Result<Complex64> {
        Ok(self.params.exponent_at(Complex64::new(0.0, u[0]), t).0)
    }

    fn psi0(&self, t: f64, u: &[f64]) -> Result<Vec<Complex64>> {
        Ok(vec![
            self.params.exponent_at(Complex64::new(0.0, u[0]), t).1,
        ])
    }

    fn dphi0(&self, t: f64, u: &[f64]) -> Result<Complex64> {
        let psi = self.psi0(t, u)?[0];
        Ok(self.params.b0 * psi + 0.5 * self.params.a0 * psi * psi)
    }

    fn dpsi0(&self, t: f64, u: &[f64]) -> Result<Vec<Complex64>> {
        Ok(vec![self.params.b1 * self.psi0(t, u)?[0]])
    }
}

/// Stochastic-volatility baseline on `(x, v)` with `psi_0 = (iu, psi_v)`.
pub struct HestonBaseline {
    params: HestonParams,
    generator: AffineModel,
}

impl HestonBaseline {
    pub fn new(params: HestonParams) -> Result<Self> {
        params.validate()?;
        Ok(HestonBaseline {
            generator: params.to_model(),
            params,
        })
    }

    pub fn from_target(target: &AffineModel) -> Result<Self> {
        let params = HestonParams::from_model(&target.without_jumps()).ok_or_else(|| {
            Error::NotApplicable {
                kind: "baseline",
                name: "heston".into(),
                reason: "jump-free part does not have the (x, v) stochastic-volatility structure"
                    .into(),
            }
        })?;
        Self::new(params)
    }

    pub fn params(&self) -> &HestonParams {
        &self.params
    }

    fn check_u(u: &[f64]) -> Result<()> {
        if u.len() != 2 || u[1] != 0.0 {
            return Err(Error::Contract("Heston baseline needs u = (u_x, 0)".into()));
        }
        Ok(())
    }
}

impl Baseline for HestonBaseline {
    fn name(&self) -> &str {
        "heston"
    }

    fn generator(&self) -> &AffineModel {
        &self.generator
    }

    fn phi0(&self, t: f64, u: &[f64]) -> Result<Complex64> {
        Self::check_u(u)?;
        Ok(self.params.exponent(u[0], t)?.0)
    }

    fn psi0(&self, t: f64, u: &[f64]) -> Result<Vec<Complex64>> {
        Self::check_u(u)?;
        Ok(vec![
            Complex64::new(0.0, u[0]),
            self.params.exponent(u[0], t)?.1,
        ])
    }
}

/// JSON description of a user baseline.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserBaselineConfig {
    pub name: String,
    /// Model of the generator, in the model-file format.
    pub generator: serde_json::Value,
    /// Constants usable in the expressions.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub phi0: String,
    pub psi0: Vec<String>,
    #[serde(default)]
    pub dphi0: Option<String>,
    #[serde(default)]
    pub dpsi0: Option<Vec<String>>,
}

/// Baseline given by expression strings in `t`, `u` (alias of `u1`),
/// `u1..ud` and the configured constants.
pub struct UserBaseline {
    name: String,
    generator: AffineModel,
    params: Env,
    phi0: Expr,
    psi0: Vec<Expr>,
    dphi0: Option<Expr>,
    dpsi0: Option<Vec<Expr>>,
}

impl UserBaseline {
    pub fn from_config(cfg: UserBaselineConfig) -> Result<Self> {
        let generator = AffineModel::from_json_value(cfg.generator).map_err(|e| match e {
            Error::Model { path, message } => Error::model(
                if path.is_empty() {
                    "generator".to_string()
                } else {
                    format!("generator.{path}")
                },
                message,
            ),
            other => other,
        })?;
        let d = generator.dim();
        let parse_all = |v: &[String], what: &str| -> Result<Vec<Expr>> {
            if v.len() != d {
                return Err(Error::model(
                    what,
                    format!("expected {d} expressions, got {}", v.len()),
                ));
            }
            v.iter().map(|s| Expr::parse(s)).collect()
        };
        let params: Env = cfg
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Complex64::new(*v, 0.0)))
            .collect();
        let b = UserBaseline {
            phi0: Expr::parse(&cfg.phi0)?,
            psi0: parse_all(&cfg.psi0, "psi0")?,
            dphi0: cfg.dphi0.as_deref().map(Expr::parse).transpose()?,
            dpsi0: cfg
                .dpsi0
                .as_deref()
                .map(|v| parse_all(v, "dpsi0"))
                .transpose()?,
            name: cfg.name,
            generator,
            params,
        };
        let env = b.env(0.0, &vec![0.0; d]);
        let mut all: Vec<&Expr> = vec![&b.phi0];
        all.extend(&b.psi0);
        all.extend(b.dphi0.iter());
        all.extend(b.dpsi0.iter().flatten());
        for e in all {
            for v in e.variables() {
                if !env.contains_key(&v) {
                    return Err(Error::Expression(format!(
                        "unbound variable `{v}` in `{e}`"
                    )));
                }
            }
        }
        Ok(b)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let cfg: UserBaselineConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::model(e.path().to_string(), e.inner().to_string()))?;
        Self::from_config(cfg)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&crate::error::read_file(path)?)
    }

    fn env(&self, t: f64, u: &[f64]) -> Env {
        let mut env = self.params.clone();
        env.insert("t".into(), Complex64::new(t, 0.0));
        if let Some(&u1) = u.first() {
            env.insert("u".into(), Complex64::new(u1, 0.0));
        }
        for (l, &v) in u.iter().enumerate() {
            env.insert(format!("u{}", l + 1), Complex64::new(v, 0.0));
        }
        env
    }

    fn check(values: Vec<Complex64>) -> Result<Vec<Complex64>> {
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Evaluation(
                "user baseline produced a non-finite value".into(),
            ));
        }
        Ok(values)
    }
}

impl Baseline for UserBaseline {
    fn name(&self) -> &str {
        &self.name
    }

    fn generator(&self) -> &AffineModel {
        &self.generator
    }

    fn phi0(&self, t: f64, u: &[f64]) -> Result<Complex64> {
        Ok(Self::check(vec![self.phi0.eval(&self.env(t, u))?])?[0])
    }

    fn psi0(&self, t: f64, u: &[f64]) -> Result<Vec<Complex64>> {
        let env = self.env(t, u);
        Self::check(
            self.psi0
                .iter()
                .map(|e| e.eval(&env))
                .collect::<Result<_>>()?,
        )
    }

    fn dphi0(&self, t: f64, u: &[f64]) -> Result<Complex64> {
        match &self.dphi0 {
            Some(e) => Ok(Self::check(vec![e.eval(&self.env(t, u))?])?[0]),
            None => Ok(time_derivative(|s| Ok(vec![self.phi0(s, u)?]), t, TIME_STEP)?[0]),
        }
    }

    fn dpsi0(&self, t: f64, u: &[f64]) -> Result<Vec<Complex64>> {
        match &self.dpsi0 {
            Some(es) => {
                let env = self.env(t, u);
                Self::check(es.iter().map(|e| e.eval(&env)).collect::<Result<_>>()?)
            }
            None => time_derivative(|s| self.psi0(s, u), t, TIME_STEP),
        }
    }
}

/// One sampled point of the residual check.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub residual: f64,
}

/// Sample points `(t, x, u)`: a few times, the domain midpoint (or a point
/// near the finite end) and frequencies on the first coordinate only.
pub fn default_residual_points(model: &AffineModel) -> Vec<(f64, Vec<f64>, Vec<f64>)> {
    let d = model.dim();
    let x: Vec<f64> = model
        .domain_bounds()
        .iter()
        .map(|&(lo, hi)| match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 0.3,
            (false, true) => hi - 0.3,
            (false, false) => 0.3,
        })
        .collect();
    let mut out = Vec::new();
    for &t in &[0.05, 0.4, 1.0] {
        for &u1 in &[-1.5, 0.5, 2.0] {
            let mut u = vec![0.0; d];
            u[0] = u1;
            out.push((t, x.clone(), u));
        }
    }
    out
}

/// Check the initial condition and `d_t (phi_0 + psi_0 x) = sigma_0(x, psi_0)`
/// at the given points. The residual derivative uses a wider step than
/// [`TIME_STEP`] to keep roundoff well below the tolerance.
pub fn certify_baseline(
    b: &dyn Baseline,
    points: &[(f64, Vec<f64>, Vec<f64>)],
) -> Result<Vec<ResidualSample>> {
    let g = b.generator();
    let mut out = Vec::with_capacity(points.len());
    for (t, x, u) in points {
        let phi_init = b.phi0(0.0, u)?;
        let psi_init = b.psi0(0.0, u)?;
        let init_err = psi_init
            .iter()
            .zip(imag(u))
            .map(|(a, b)| (a - b).norm())
            .fold(phi_init.norm(), f64::max);
        if init_err > 1e-12 {
            return Err(Error::Evaluation(format!(
                "baseline `{}` violates phi_0(0) = 0, psi_0(0) = iu at u = {u:?} (error {init_err:e})",
                b.name()
            )));
        }
        let exponent = |s: f64| -> Result<Vec<Complex64>> {
            let psi = b.psi0(s, u)?;
            let phase: Complex64 = psi.iter().zip(x.iter()).map(|(p, v)| p * v).sum();
            Ok(vec![b.phi0(s, u)? + phase])
        };
        let lhs = time_derivative(exponent, *t, 1e-4)?[0];
        let psi = b.psi0(*t, u)?;
        let rhs = g.symbol_at(x, &psi)?;
        let residual = (lhs - rhs).norm() / rhs.norm().max(1.0);
        if residual > RESIDUAL_TOLERANCE {
            return Err(Error::Evaluation(format!(
                "baseline `{}` fails its Cauchy problem at t = {t}, x = {x:?}, u = {u:?}: residual {residual:e}",
                b.name()
            )));
        }
        out.push(ResidualSample {
            t: *t,
            x: x.clone(),
            u: u.clone(),
            residual,
        });
    }
    Ok(out)
}
