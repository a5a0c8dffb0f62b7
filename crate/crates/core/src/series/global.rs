//! Globalized evaluation in the transformed time `tau`.
//!
//! In `tau` the correction `g` solves `d_tau g = rho(tau) L g` with `L` the
//! operator generating `d_{k+1} = L d_k / (k + 1)`. Expanding at `tau0` gives
//! `g(tau0 + h) = 1 + sum_n e_n h^n` with `e_n = sum_k w_{n,k} d_k`, where
//! `w_{n,k} = [h^n] S(h)^k`, `S' = rho(tau0 + .)`, i.e.
//! `(n+1) w_{n+1,k+1} = (k+1) sum_{m+j=n} r_m w_{j,k}`.
//!
//! Long horizons are covered by stepping: after each step the solution is
//! rewritten as `scale * exp(psi . x)` by matching value and gradient at `x`,
//! and the next expansion uses the symbol at the complex argument `psi`.

use std::sync::Arc;

use num_complex::Complex64;

use super::beta::choose_beta;
use super::plain::PlainSeries;
use super::result::{CfResult, Mode};
use super::transform::TimeTransform;
use super::CfEngine;
use crate::error::{Error, Result};
use crate::symbol::{classify_boundedness, imag, Boundedness};

/// Largest step in `tau`; longer spans are split.
pub const MAX_STEP: f64 = 0.3;

/// `w[n][k]` for `0 <= k <= n <= order`.
pub fn composition_weights(rho: &[f64], order: usize) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; order + 1]; order + 1];
    w[0][0] = 1.0;
    for n in 0..order {
        for k in 0..=n {
            let s: f64 = (0..=n).map(|m| rho[m] * w[n - m][k]).sum();
            w[n + 1][k + 1] = (k + 1) as f64 * s / (n + 1) as f64;
        }
    }
    w
}

/// Globalized value at `t` with the given transform.
pub fn eval_globalized(
    series: &PlainSeries,
    x: &[f64],
    u: &[f64],
    t: f64,
    tt: &TimeTransform,
) -> Result<CfResult> {
    let order = series.order();
    if order < 1 {
        return Err(Error::Contract(
            "truncation order must be at least 1".into(),
        ));
    }
    let tau = tt.inverse(t)?;
    let dim = x.len();
    let mut psi = imag(u);
    let mut scale = Complex64::new(1.0, 0.0);
    let mut tau0 = 0.0;
    loop {
        let remaining = tau - tau0;
        let h = MAX_STEP.min((1.0 - tau0) / 2.0).min(remaining);
        let last = h >= remaining;
        let rho = tt.rho_jet(tau0, order)?;
        let w = composition_weights(&rho.coeffs, order);
        let d = series.terms_at(x, &psi)?;
        let mut contributions = Vec::with_capacity(order);
        let mut hn = 1.0;
        for wn in w.iter().skip(1) {
            hn *= h;
            let e: Complex64 = wn.iter().zip(&d).map(|(wk, dk)| dk * *wk).sum();
            contributions.push(e * hn);
        }
        let phase: Complex64 = psi.iter().zip(x).map(|(a, b)| a * b).sum();
        let prefactor = scale * phase.exp();
        if last {
            return Ok(CfResult::assemble(
                prefactor,
                contributions,
                Mode::Globalized,
            ));
        }
        let g: Complex64 = 1.0 + contributions.iter().sum::<Complex64>();
        let dx = series.x_derivatives_at(x, &psi)?;
        let value = prefactor * g;
        for l in 0..dim {
            let mut grad = Complex64::new(0.0, 0.0);
            let mut hn = 1.0;
            for wn in w.iter().skip(1) {
                hn *= h;
                let e: Complex64 = wn.iter().zip(&dx[l]).map(|(wk, dk)| dk * *wk).sum();
                grad += e * hn;
            }
            psi[l] += grad / g;
        }
        let phase: Complex64 = psi.iter().zip(x).map(|(a, b)| a * b).sum();
        scale = value * (-phase).exp();
        tau0 += h;
    }
}

/// How the engine picks `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaRule {
    Fixed(f64),
    /// Per point, from the heuristic over `{x} x [-|u|, |u|]` and horizon `t`.
    Auto,
}

pub struct GlobalEngine {
    series: Arc<PlainSeries>,
    beta: BetaRule,
    unbounded: Option<Vec<String>>,
}

impl GlobalEngine {
    pub fn new(series: Arc<PlainSeries>, beta: BetaRule) -> Result<Self> {
        if let BetaRule::Fixed(b) = beta {
            TimeTransform::new(b)?;
        }
        let c = classify_boundedness(series.model());
        let unbounded = (c.class == Boundedness::BoundedOnlyOnBoundedDomain).then_some(c.reasons);
        Ok(GlobalEngine {
            series,
            beta,
            unbounded,
        })
    }
}

impl CfEngine for GlobalEngine {
    fn name(&self) -> &str {
        "global"
    }

    fn order(&self) -> usize {
        self.series.order()
    }

    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<CfResult> {
        let mut warnings = Vec::new();
        let beta = match self.beta {
            BetaRule::Fixed(b) => b,
            BetaRule::Auto => {
                let omega: Vec<(f64, f64)> = x.iter().map(|&v| (v, v)).collect();
                let ubox: Vec<(f64, f64)> = u.iter().map(|&v| (-v.abs(), v.abs())).collect();
                let c = choose_beta(self.series.model(), &omega, &ubox, t.max(1e-12))?;
                if !c.contractive {
                    warnings.push(format!(
                        "convergence risk: beta = {} exceeds 1/(2 sup|sigma|) to keep tau(t) <= 0.9",
                        c.beta
                    ));
                }
                c.beta
            }
        };
        if let Some(reasons) = &self.unbounded {
            warnings.push(format!(
                "symbol is unbounded in x on the state domain ({})",
                reasons.join(", ")
            ));
        }
        let tt = TimeTransform::new(beta)?;
        let mut r = eval_globalized(&self.series, x, u, t, &tt)?;
        r.warnings = warnings;
        Ok(r)
    }
}
