//! Fixed-step RK4 for the Riccati system
//! `phi' = sigma(0, psi)`, `psi_l' = sigma_l(psi)`, `phi(0) = 0`, `psi(0) = iu`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbol::{imag, AffineModel};

/// `|psi|` above which the trajectory counts as exploded.
pub const EXPLOSION_BOUND: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Number of RK4 steps over `[0, t]`.
    pub steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { steps: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    pub phi: Complex64,
    pub psi: Vec<Complex64>,
    /// Richardson estimate `|y_h - y_{2h}| / 15` of the error in `phi + psi . x`
    /// per unit `|x|`, from a second run with half the steps.
    pub error_estimate: f64,
}

impl RiccatiSolution {
    pub fn exponent(&self, x: &[f64]) -> Complex64 {
        self.phi
            + self
                .psi
                .iter()
                .zip(x)
                .map(|(p, v)| p * v)
                .sum::<Complex64>()
    }

    pub fn value(&self, x: &[f64]) -> Complex64 {
        self.exponent(x).exp()
    }
}

fn rhs(model: &AffineModel, psi: &[Complex64]) -> Result<(Complex64, Vec<Complex64>)> {
    let f = model.constant_symbol_at(psi)?;
    let r = (1..=model.dim())
        .map(|l| model.slope_symbol_at(l, psi))
        .collect::<Result<Vec<_>>>()?;
    Ok((f, r))
}

fn integrate(
    model: &AffineModel,
    u: &[f64],
    t: f64,
    steps: usize,
) -> Result<(Complex64, Vec<Complex64>)> {
    let mut phi = Complex64::new(0.0, 0.0);
    let mut psi = imag(u);
    if t == 0.0 {
        return Ok((phi, psi));
    }
    let h = t / steps as f64;
    let axpy = |y: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
        y.iter().zip(k).map(|(y, k)| y + k * a).collect()
    };
    for step in 0..steps {
        let (f1, k1) = rhs(model, &psi)?;
        let (f2, k2) = rhs(model, &axpy(&psi, &k1, h / 2.0))?;
        let (f3, k3) = rhs(model, &axpy(&psi, &k2, h / 2.0))?;
        let (f4, k4) = rhs(model, &axpy(&psi, &k3, h))?;
        phi += (f1 + 2.0 * f2 + 2.0 * f3 + f4) * (h / 6.0);
        for l in 0..psi.len() {
            psi[l] += (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]) * (h / 6.0);
        }
        let size = psi.iter().map(|p| p.norm()).fold(phi.norm(), f64::max);
        if !size.is_finite() || psi.iter().any(|p| p.norm() > EXPLOSION_BOUND) {
            return Err(Error::Explosion {
                time: (step + 1) as f64 * h,
                bound: EXPLOSION_BOUND,
            });
        }
    }
    Ok((phi, psi))
}

/// Integrate to `t` and estimate the error by step halving.
pub fn solve_riccati(
    model: &AffineModel,
    u: &[f64],
    t: f64,
    config: IntegratorConfig,
) -> Result<RiccatiSolution> {
    if u.len() != model.dim() {
        return Err(Error::Contract(
            "frequency dimension does not match the model".into(),
        ));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Contract(format!(
            "t = {t} must be finite and nonnegative"
        )));
    }
    let steps = config.steps.max(2);
    let (phi, psi) = integrate(model, u, t, steps)?;
    let (phi2, psi2) = integrate(model, u, t, steps / 2)?;
    let mut err = (phi - phi2).norm();
    for (a, b) in psi.iter().zip(&psi2) {
        err = err.max((a - b).norm());
    }
    Ok(RiccatiSolution {
        phi,
        psi,
        error_estimate: err / 15.0,
    })
}

/// `exp(phi(t, u) + psi(t, u) . x)`.
pub fn riccati_cf(
    model: &AffineModel,
    x: &[f64],
    u: &[f64],
    t: f64,
    config: IntegratorConfig,
) -> Result<Complex64> {
    if !model.contains(x) {
        return Err(Error::Domain(format!(
            "x = {x:?} lies outside the state domain"
        )));
    }
    Ok(solve_riccati(model, u, t, config)?.value(x))
}
