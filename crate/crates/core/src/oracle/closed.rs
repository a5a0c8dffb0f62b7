//! Closed-form characteristic functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{imag, AffineModel};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this `|b1|` the mean-reversion formulas switch to their limits.
const B1_EPS: f64 = 1e-12;

/// `exp(iux + t sigma(iu))` for a model without slope terms.
pub fn levy_khintchine_cf(model: &AffineModel, x: &[f64], u: &[f64], t: f64) -> Result<Complex64> {
    if !model.is_levy() {
        return Err(Error::Contract(
            "Levy-Khintchine form needs all slope coefficients to vanish".into(),
        ));
    }
    if x.len() != model.dim() || u.len() != model.dim() {
        return Err(Error::Contract(
            "point dimension does not match the model".into(),
        ));
    }
    let xi = imag(u);
    let s = model.constant_symbol_at(&xi)?;
    let phase: Complex64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
    Ok((phase + t * s).exp())
}

/// One-dimensional Ornstein-Uhlenbeck: `dX = (b0 + b1 X) dt + sqrt(a0) dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VasicekParams {
    pub a0: f64,
    pub b0: f64,
    pub b1: f64,
}

impl VasicekParams {
    pub fn from_model(model: &AffineModel) -> Option<Self> {
        if model.dim() != 1 || model.a_slope[0][0][0] != 0.0 || model.has_jumps() {
            return None;
        }
        Some(VasicekParams {
            a0: model.a0[0][0],
            b0: model.b0[0],
            b1: model.b_slope[0][0],
        })
    }

    pub fn to_model(&self) -> AffineModel {
        let mut m = AffineModel::zero(1);
        m.a0 = vec![vec![self.a0]];
        m.b0 = vec![self.b0];
        m.b_slope = vec![vec![self.b1]];
        m
    }

    /// `(phi, psi)` with `psi(0) = xi`, for complex `xi`.
    pub fn exponent_at(&self, xi: Complex64, t: f64) -> (Complex64, Complex64) {
        let VasicekParams { a0, b0, b1 } = *self;
        if b1.abs() < B1_EPS {
            return (xi * b0 * t + xi * xi * a0 * t / 2.0, xi);
        }
        let g = (b1 * t).exp_m1() / b1;
        let g2 = (2.0 * b1 * t).exp_m1() / (2.0 * b1);
        let psi = xi * (b1 * t).exp();
        (xi * b0 * g + xi * xi * a0 * g2 / 2.0, psi)
    }
}

/// `exp(iux e^{b1 t} + iu b0 (e^{b1 t} - 1)/b1 - u^2 a0 (e^{2 b1 t} - 1)/(4 b1))`.
pub fn vasicek_cf(p: &VasicekParams, x: f64, u: f64, t: f64) -> Complex64 {
    let (phi, psi) = p.exponent_at(I * u, t);
    (phi + psi * x).exp()
}

/// Square-root diffusion: `dX = (b0 + b1 X) dt + sqrt(a1 X) dW` on `X >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirParams {
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
}

impl CirParams {
    pub fn from_model(model: &AffineModel) -> Option<Self> {
        if model.dim() != 1
            || model.a0[0][0] != 0.0
            || model.a_slope[0][0][0] <= 0.0
            || model.has_jumps()
        {
            return None;
        }
        Some(CirParams {
            a1: model.a_slope[0][0][0],
            b0: model.b0[0],
            b1: model.b_slope[0][0],
        })
    }

    pub fn to_model(&self) -> AffineModel {
        let mut m = AffineModel::zero(1);
        m.a_slope = vec![vec![vec![self.a1]]];
        m.b0 = vec![self.b0];
        m.b_slope = vec![vec![self.b1]];
        m.state_domain = vec![[Some(0.0), None]];
        m
    }
}

/// `D = 1 - iu a1 (e^{b1 t} - 1)/(2 b1)`, `psi = iu e^{b1 t}/D`,
/// `phi = -(2 b0/a1) ln D`.
pub fn cir_cf(p: &CirParams, x: f64, u: f64, t: f64) -> Result<Complex64> {
    if p.a1 <= 0.0 {
        return Err(Error::Contract("CIR form needs a1 > 0".into()));
    }
    let g = if p.b1.abs() < B1_EPS {
        t
    } else {
        (p.b1 * t).exp_m1() / p.b1
    };
    let d = 1.0 - I * u * p.a1 * g / 2.0;
    let psi = I * u * (p.b1 * t).exp() / d;
    let phi = -(2.0 * p.b0 / p.a1) * d.ln();
    Ok((phi + psi * x).exp())
}

/// Stochastic-volatility model on `(x, v)`, `v >= 0`:
///
/// `dx = (b10 + b11 v) dt + sqrt(v) dW1`,
/// `dv = (b20 - b21 v) dt + sigma sqrt(v) dW2`, `d<W1, W2> = rho dt`.
///
/// `b00` is the drift rate in the closed-form `phi`; it defaults to `b10`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HestonParams {
    pub b10: f64,
    pub b11: f64,
    pub b20: f64,
    pub b21: f64,
    pub sigma: f64,
    pub rho: f64,
    #[serde(default)]
    pub b00: Option<f64>,
}

impl HestonParams {
    pub fn new(b10: f64, b11: f64, b20: f64, b21: f64, sigma: f64, rho: f64) -> Self {
        HestonParams {
            b10,
            b11,
            b20,
            b21,
            sigma,
            rho,
            b00: None,
        }
    }

    pub fn b00(&self) -> f64 {
        self.b00.unwrap_or(self.b10)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.b10,
            self.b11,
            self.b20,
            self.b21,
            self.sigma,
            self.rho,
            self.b00(),
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Contract("Heston parameters must be finite".into()));
        }
        if self.sigma <= 0.0 {
            return Err(Error::Contract("Heston form needs sigma > 0".into()));
        }
        if self.rho.abs() > 1.0 {
            return Err(Error::Contract("Heston form needs |rho| <= 1".into()));
        }
        Ok(())
    }

    pub fn to_model(&self) -> AffineModel {
        let rs = self.rho * self.sigma;
        let mut m = AffineModel::zero(2);
        m.a_slope = vec![
            vec![vec![0.0; 2]; 2],
            vec![vec![1.0, rs], vec![rs, self.sigma * self.sigma]],
        ];
        m.b0 = vec![self.b10, self.b20];
        m.b_slope = vec![vec![0.0, self.b11], vec![0.0, -self.b21]];
        m.state_domain = vec![[None, None], [Some(0.0), None]];
        m
    }

    /// Recognize the structure produced by [`HestonParams::to_model`].
    pub fn from_model(model: &AffineModel) -> Option<Self> {
        if model.dim() != 2 || model.has_jumps() {
            return None;
        }
        let zero2 = |m: &[Vec<f64>]| m.iter().flatten().all(|&v| v == 0.0);
        if !zero2(&model.a0) || !zero2(&model.a_slope[0]) {
            return None;
        }
        let av = &model.a_slope[1];
        if av[0][0] != 1.0 || av[0][1] != av[1][0] || av[1][1] <= 0.0 {
            return None;
        }
        if model.b_slope[0][0] != 0.0 || model.b_slope[1][0] != 0.0 {
            return None;
        }
        if model.state_domain[1] != [Some(0.0), None] || model.state_domain[0] != [None, None] {
            return None;
        }
        let sigma = av[1][1].sqrt();
        let p = HestonParams::new(
            model.b0[0],
            model.b_slope[0][1],
            model.b0[1],
            -model.b_slope[1][1],
            sigma,
            av[0][1] / sigma,
        );
        p.validate().ok().map(|_| p)
    }

    /// `(phi, psi_v)` at real frequency `u` on the `x` coordinate.
    pub fn exponent(&self, u: f64, t: f64) -> Result<(Complex64, Complex64)> {
        self.validate()?;
        let HestonParams {
            b11,
            b20,
            b21,
            sigma,
            rho,
            ..
        } = *self;
        let s2 = sigma * sigma;
        let beta = b21 - rho * sigma * I * u;
        let d = (beta * beta - s2 * (2.0 * b11 * I * u - u * u)).sqrt();
        // roots of sigma^2 psi^2 / 2 - beta psi + c are (beta -+ d) / sigma^2;
        // the minus root with e^{-dt} keeps every exponential bounded
        let minus = beta - d;
        let plus = beta + d;
        if plus.norm() == 0.0 {
            return Err(Error::Branch {
                t,
                u,
                detail: "beta + d vanishes".into(),
            });
        }
        let g = minus / plus;
        let e = (-d * t).exp();
        let num = 1.0 - g * e;
        let den = 1.0 - g;
        if num.norm() < 1e-14 || den.norm() < 1e-14 {
            return Err(Error::Branch {
                t,
                u,
                detail: format!("g e^(-dt) = {} reaches 1", g * e),
            });
        }
        let psi = minus / s2 * (1.0 - e) / num;
        let phi = self.b00() * I * u * t + b20 / s2 * (minus * t - 2.0 * (num / den).ln());
        Ok((phi, psi))
    }
}

/// `exp(phi(t, u) + psi_v(t, u) v + iux)`.
pub fn heston_cf(p: &HestonParams, x: f64, v: f64, u: f64, t: f64) -> Result<Complex64> {
    let (phi, psi) = p.exponent(u, t)?;
    Ok((phi + psi * v + I * u * x).exp())
}
