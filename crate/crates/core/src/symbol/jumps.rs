//! Jump components and the derivatives of their transform
//! `J(xi) = lambda * (M(xi) - 1 - xi . E[z 1_D(z)])`, with `M` the moment
//! generating function of the jump-size law.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{enumerate_up_to, FlatIndexer, MultiIndex};

/// Compensation of small jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Finite activity: `J = lambda (M - 1)`.
    #[default]
    None,
    /// Compensate with `D = {|z| <= 1}`.
    UnitBall,
}

/// User-supplied jump transform.
///
/// `derivative(eps, xi)` must return `d^eps_xi J(xi)` for the full jump term,
/// compensation included, for every `|eps| <= max_order()`. For `eps = 0` it
/// returns `J(xi)` itself.
pub trait UserJump: Send + Sync {
    fn max_order(&self) -> usize;
    fn derivative(&self, eps: &MultiIndex, xi: &[Complex64]) -> Result<Complex64>;
    /// Whether `d^eps J` can be nonzero. Defaults to `true`.
    fn may_be_nonzero(&self, _eps: &MultiIndex) -> bool {
        true
    }
}

/// Jump-size law of one affine component `nu_0` or `nu_l`.
#[derive(Clone, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpSpec {
    #[default]
    None,
    /// Compound Poisson with `N(mean, covariance)` sizes.
    Gaussian {
        intensity: f64,
        mean: Vec<f64>,
        covariance: Vec<Vec<f64>>,
    },
    /// Compound Poisson with independent one-sided exponential components;
    /// a `null` rate means no jump in that coordinate.
    Exponential {
        intensity: f64,
        rates: Vec<Option<f64>>,
    },
    #[serde(skip)]
    User(Arc<dyn UserJump>),
}

impl fmt::Debug for JumpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JumpSpec::None => write!(f, "None"),
            JumpSpec::Gaussian {
                intensity,
                mean,
                covariance,
            } => f
                .debug_struct("Gaussian")
                .field("intensity", intensity)
                .field("mean", mean)
                .field("covariance", covariance)
                .finish(),
            JumpSpec::Exponential { intensity, rates } => f
                .debug_struct("Exponential")
                .field("intensity", intensity)
                .field("rates", rates)
                .finish(),
            JumpSpec::User(u) => write!(f, "User(max_order = {})", u.max_order()),
        }
    }
}

impl PartialEq for JumpSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (JumpSpec::None, JumpSpec::None) => true,
            (
                JumpSpec::Gaussian {
                    intensity: a,
                    mean: b,
                    covariance: c,
                },
                JumpSpec::Gaussian {
                    intensity: x,
                    mean: y,
                    covariance: z,
                },
            ) => a == x && b == y && c == z,
            (
                JumpSpec::Exponential {
                    intensity: a,
                    rates: b,
                },
                JumpSpec::Exponential {
                    intensity: x,
                    rates: y,
                },
            ) => a == x && b == y,
            (JumpSpec::User(a), JumpSpec::User(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl JumpSpec {
    pub fn is_none(&self) -> bool {
        matches!(self, JumpSpec::None)
            || matches!(self, JumpSpec::Gaussian { intensity, .. } | JumpSpec::Exponential { intensity, .. } if *intensity == 0.0)
    }

    pub fn intensity(&self) -> Option<f64> {
        match self {
            JumpSpec::Gaussian { intensity, .. } | JumpSpec::Exponential { intensity, .. } => {
                Some(*intensity)
            }
            _ => None,
        }
    }

    pub fn max_order(&self) -> Option<usize> {
        match self {
            JumpSpec::User(u) => Some(u.max_order()),
            _ => None,
        }
    }

    /// Whether `d^eps J` can be nonzero anywhere.
    pub fn may_be_nonzero(&self, eps: &MultiIndex) -> bool {
        if self.is_none() {
            return false;
        }
        match self {
            JumpSpec::Exponential { rates, .. } => eps
                .entries()
                .iter()
                .zip(rates)
                .all(|(&e, r)| e == 0 || r.is_some()),
            JumpSpec::User(u) => u.may_be_nonzero(eps),
            _ => true,
        }
    }

    /// `d^eps J(xi)` for every `|eps| <= max_order`, indexed by flat slot.
    pub fn derivatives(
        &self,
        xi: &[Complex64],
        max_order: u32,
        truncation: Truncation,
    ) -> Result<Vec<Complex64>> {
        let dim = xi.len();
        let indexer = FlatIndexer::new(dim, max_order);
        let n = indexer.len();
        let zero = Complex64::new(0.0, 0.0);
        match self {
            JumpSpec::None => Ok(vec![zero; n]),
            JumpSpec::User(u) => {
                let mut out = Vec::with_capacity(n);
                for eps in enumerate_up_to(dim, max_order) {
                    if eps.order() as usize > u.max_order() {
                        return Err(Error::Capability {
                            eps,
                            max_order: u.max_order(),
                        });
                    }
                    out.push(u.derivative(&eps, xi)?);
                }
                Ok(out)
            }
            JumpSpec::Gaussian { intensity, .. } | JumpSpec::Exponential { intensity, .. } => {
                let lambda = *intensity;
                let mut m = self.mgf_derivatives(xi, &indexer)?;
                for v in m.iter_mut() {
                    *v *= lambda;
                }
                m[0] -= lambda;
                if truncation == Truncation::UnitBall {
                    let tm = self.truncated_mean(dim)?;
                    for l in 0..dim {
                        m[0] -= lambda * tm[l] * xi[l];
                        if max_order >= 1 {
                            m[1 + l] -= lambda * tm[l];
                        }
                    }
                }
                Ok(m)
            }
        }
    }

    /// `d^eps M(xi)` by flat slot.
    fn mgf_derivatives(&self, xi: &[Complex64], indexer: &FlatIndexer) -> Result<Vec<Complex64>> {
        let dim = xi.len();
        let n = indexer.len();
        match self {
            JumpSpec::Gaussian {
                mean, covariance, ..
            } => {
                // Taylor coefficients T_eps of exp(q(xi + h)) in h, from
                // (eps_l + 1) T_{eps + e_l} = g_l T_eps + sum_j C_lj T_{eps - e_j}
                let c = |i: usize, j: usize| covariance[i][j];
                let mut q0 = Complex64::new(0.0, 0.0);
                let mut g = vec![Complex64::new(0.0, 0.0); dim];
                for i in 0..dim {
                    q0 += mean[i] * xi[i];
                    g[i] += mean[i];
                    for j in 0..dim {
                        q0 += 0.5 * c(i, j) * xi[i] * xi[j];
                        g[i] += c(i, j) * xi[j];
                    }
                }
                let mut taylor = vec![Complex64::new(0.0, 0.0); n];
                taylor[0] = q0.exp();
                for slot in 1..n {
                    let eta = indexer.index(slot).clone();
                    let l = eta.first_nonzero().expect("nonzero index");
                    let eps = eta.lowered(l).expect("positive entry");
                    let t_eps = taylor[indexer.slot(&eps).expect("lower slot")];
                    let mut v = g[l] * t_eps;
                    for j in 0..dim {
                        if let Some(e2) = eps.lowered(j) {
                            v += c(l, j) * taylor[indexer.slot(&e2).expect("lower slot")];
                        }
                    }
                    taylor[slot] = v / f64::from(eta.get(l));
                }
                Ok((0..n)
                    .map(|s| taylor[s] * indexer.index(s).factorial_f64())
                    .collect())
            }
            JumpSpec::Exponential { rates, .. } => {
                for (l, r) in rates.iter().enumerate() {
                    if let Some(r) = r {
                        if xi[l].re >= *r {
                            return Err(Error::Evaluation(format!(
                                "exponential jump transform diverges: Re xi_{} = {} >= rate {r}",
                                l + 1,
                                xi[l].re
                            )));
                        }
                    }
                }
                Ok((0..n)
                    .map(|s| {
                        let eps = indexer.index(s);
                        let mut v = Complex64::new(1.0, 0.0);
                        for (l, r) in rates.iter().enumerate() {
                            let e = eps.get(l);
                            match r {
                                Some(r) => {
                                    let fact: f64 = (1..=e).map(f64::from).product();
                                    v *= fact * r / (r - xi[l]).powi(e as i32 + 1);
                                }
                                None if e > 0 => v = Complex64::new(0.0, 0.0),
                                None => {}
                            }
                        }
                        v
                    })
                    .collect())
            }
            _ => unreachable!("closed-form families only"),
        }
    }

    /// `E[z 1_{|z| <= 1}]` of the jump-size law; closed forms are available in
    /// one dimension only.
    pub fn truncated_mean(&self, dim: usize) -> Result<Vec<f64>> {
        if dim != 1 {
            return Err(Error::model(
                "truncation",
                "unit_ball truncation with closed-form jumps is supported in one dimension only; use a user jump",
            ));
        }
        match self {
            JumpSpec::Gaussian {
                mean, covariance, ..
            } => {
                let m = mean[0];
                let s = covariance[0][0].sqrt();
                if s == 0.0 {
                    return Ok(vec![if m.abs() <= 1.0 { m } else { 0.0 }]);
                }
                let a = (-1.0 - m) / s;
                let b = (1.0 - m) / s;
                let cdf = |z: f64| 0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2));
                let pdf = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
                Ok(vec![m * (cdf(b) - cdf(a)) + s * (pdf(a) - pdf(b))])
            }
            JumpSpec::Exponential { rates, .. } => Ok(vec![match rates[0] {
                Some(r) => (1.0 - (-r).exp() * (1.0 + r)) / r,
                None => 0.0,
            }]),
            _ => Ok(vec![0.0; dim]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Midpoint-rule quadrature of `int z^n (e^{iuz} - [n=0]) phi(z) dz` for a
    /// normal density.
    fn gaussian_quadrature(m: f64, s: f64, u: f64, n: i32) -> Complex64 {
        let steps = 200_000;
        let (lo, hi) = (m - 12.0 * s, m + 12.0 * s);
        let h = (hi - lo) / steps as f64;
        let mut acc = c(0.0, 0.0);
        for i in 0..steps {
            let z = lo + (i as f64 + 0.5) * h;
            let dens = (-(z - m).powi(2) / (2.0 * s * s)).exp()
                / (s * (2.0 * std::f64::consts::PI).sqrt());
            let mut f = c(0.0, u * z).exp();
            if n == 0 {
                f -= 1.0;
            }
            acc += f * z.powi(n) * dens * h;
        }
        acc
    }

    #[test]
    fn gaussian_transform_matches_quadrature() {
        let j = JumpSpec::Gaussian {
            intensity: 0.7,
            mean: vec![-0.1],
            covariance: vec![vec![0.04]],
        };
        let u = 1.3;
        let d = j.derivatives(&[c(0.0, u)], 3, Truncation::None).unwrap();
        for n in 0..=3 {
            let q = 0.7 * gaussian_quadrature(-0.1, 0.2, u, n);
            assert!(
                (d[n as usize] - q).norm() < 1e-10,
                "order {n}: {} vs {q}",
                d[n as usize]
            );
        }
        let closed = 0.7 * (c(-0.5 * u * u * 0.04, -0.1 * u).exp() - 1.0);
        assert!((d[0] - closed).norm() < 1e-14);
    }

    #[test]
    fn exponential_derivatives() {
        let j = JumpSpec::Exponential {
            intensity: 2.0,
            rates: vec![Some(3.0)],
        };
        let xi = c(0.0, 0.5);
        let d = j.derivatives(&[xi], 2, Truncation::None).unwrap();
        assert!((d[0] - 2.0 * (3.0 / (3.0 - xi) - 1.0)).norm() < 1e-15);
        assert!((d[2] - 2.0 * 2.0 * 3.0 / (3.0 - xi).powi(3)).norm() < 1e-14);
        assert!(j.derivatives(&[c(3.5, 0.0)], 1, Truncation::None).is_err());
    }

    #[test]
    fn bivariate_gaussian_mixed_derivative() {
        // d^2/dxi1 dxi2 exp(q) at 0 equals E[z1 z2] = C12 + m1 m2
        let j = JumpSpec::Gaussian {
            intensity: 1.0,
            mean: vec![0.3, -0.2],
            covariance: vec![vec![0.5, 0.1], vec![0.1, 0.2]],
        };
        let d = j
            .derivatives(&[c(0.0, 0.0), c(0.0, 0.0)], 2, Truncation::None)
            .unwrap();
        // slots: 0:(0,0) 1:(1,0) 2:(0,1) 3:(2,0) 4:(1,1) 5:(0,2)
        assert!((d[4].re - (0.1 + 0.3 * -0.2)).abs() < 1e-14);
        assert!((d[3].re - (0.5 + 0.09)).abs() < 1e-14);
        assert!(d[0].norm() < 1e-15);
    }

    #[test]
    fn unit_ball_compensation_removes_small_jump_mean() {
        let j = JumpSpec::Exponential {
            intensity: 1.0,
            rates: vec![Some(2.0)],
        };
        let tm = j.truncated_mean(1).unwrap()[0];
        let d0 = j.derivatives(&[c(0.0, 0.0)], 1, Truncation::None).unwrap();
        let d1 = j
            .derivatives(&[c(0.0, 0.0)], 1, Truncation::UnitBall)
            .unwrap();
        assert!((d0[1] - d1[1] - tm).norm() < 1e-15);
        assert!(j.truncated_mean(2).is_err());
    }

    #[test]
    fn user_jump_capability() {
        struct Lin;
        impl UserJump for Lin {
            fn max_order(&self) -> usize {
                1
            }
            fn derivative(&self, eps: &MultiIndex, xi: &[Complex64]) -> Result<Complex64> {
                Ok(if eps.is_zero() { xi[0] } else { c(1.0, 0.0) })
            }
        }
        let j = JumpSpec::User(Arc::new(Lin));
        assert!(j.derivatives(&[c(0.0, 1.0)], 1, Truncation::None).is_ok());
        let err = j
            .derivatives(&[c(0.0, 1.0)], 2, Truncation::None)
            .unwrap_err();
        assert_eq!(err.kind(), "capability");
    }
}
