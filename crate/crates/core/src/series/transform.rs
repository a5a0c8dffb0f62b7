//! Tangent-log time change `t(tau) = beta ln tan(pi/4 + pi tau / 4)`, mapping
//! `[0, 1)` onto `[0, inf)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::jet::Jet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeTransform {
    beta: f64,
}

impl TimeTransform {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Contract(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(TimeTransform { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `t(tau)`, computed as `2 beta atanh(tan(pi tau / 4))`.
    pub fn forward(&self, tau: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&tau) {
            return Err(Error::Domain(format!("tau = {tau} is outside [0, 1)")));
        }
        Ok(2.0 * self.beta * (FRAC_PI_4 * tau).tan().atanh())
    }

    /// `tau(t) = (4/pi)(arctan(e^{t/beta}) - pi/4)`; for `t > beta` the
    /// equivalent `1 - (4/pi) arctan(e^{-t/beta})` keeps precision near `tau = 1`.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!(
                "t = {t} must be finite and nonnegative"
            )));
        }
        let s = t / self.beta;
        let tau = if s <= 1.0 {
            4.0 / PI * (s.exp().atan() - FRAC_PI_4)
        } else {
            1.0 - 4.0 / PI * (-s).exp().atan()
        };
        if tau >= 1.0 {
            return Err(Error::Domain(format!(
                "t = {t} maps to tau = 1 for beta = {}; increase beta",
                self.beta
            )));
        }
        Ok(tau)
    }

    /// Taylor coefficients at `tau0` of `rho = dt/dtau = (pi beta / 2) / cos(pi tau / 2)`.
    pub fn rho_jet(&self, tau0: f64, order: usize) -> Result<Jet> {
        if !(0.0..1.0).contains(&tau0) {
            return Err(Error::Domain(format!("tau0 = {tau0} is outside [0, 1)")));
        }
        let (_, cos) = Jet::linear(FRAC_PI_2 * tau0, FRAC_PI_2, order).sin_cos();
        Ok(cos.recip().scale(FRAC_PI_2 * self.beta))
    }
}
