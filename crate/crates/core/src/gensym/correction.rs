//! Series for a target model around a baseline solution.
//!
//! With `p = exp(phi_0 + psi_0 . x) f` and the baseline identity
//! `d_t (phi_0 + psi_0 . x) = sigma_0(x, psi_0)`, freezing the `t`-dependence
//! of the atoms gives
//!
//! ```text
//! d_{k+1} = 1/(k+1) ( sum_{|eps| <= k} d^eps dsig(x, psi_0) / eps! d^eps_x d_k
//!                   + sum_{1 <= |eps| <= k} d^eps sig0(x, psi_0) / eps! d^eps_x d_k )
//! ```
//!
//! (difference recursion), or without using the identity
//!
//! ```text
//! d_{k+1} = 1/(k+1) ( (-d_t phi_0 - x . d_t psi_0) d_k
//!                   + sum_{|eps| <= k} d^eps sig(x, psi_0) / eps! d^eps_x d_k )
//! ```
//!
//! (brute-force recursion). Both are evaluated pointwise with atoms at
//! `xi = psi_0(t, u)`, so the result is not a polynomial in `t`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::baseline::{certify_baseline, default_residual_points, Baseline};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::series::{CfEngine, CfResult, CompiledSeries, Mode};
use crate::symalg::{AtomKey, Family, LeibnizRecursion, SymPoly};
use crate::symbol::{AffineModel, SymbolTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Recursion {
    /// Atoms `d^eps dsig` and `d^eps sig0`.
    #[default]
    Difference,
    /// Atoms `d^eps sig` and the time-drift factor.
    BruteForce,
}

impl fmt::Display for Recursion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recursion::Difference => "difference",
            Recursion::BruteForce => "brute-force",
        })
    }
}

fn alive_in(model: &AffineModel, atom: &AtomKey) -> bool {
    match atom.direction() {
        None => (0..=model.dim()).any(|c| model.component_may_be_nonzero(c, &atom.deriv)),
        Some(l) => model.component_may_be_nonzero(l + 1, &atom.deriv),
    }
}

fn differs(target: &AffineModel, generator: &AffineModel, atom: &AtomKey) -> bool {
    match atom.direction() {
        None => (0..=target.dim()).any(|c| target.component_may_differ(generator, c, &atom.deriv)),
        Some(l) => target.component_may_differ(generator, l + 1, &atom.deriv),
    }
}

fn check_pair(target: &AffineModel, generator: &AffineModel) -> Result<()> {
    if target.dim() != generator.dim() {
        return Err(Error::Contract(format!(
            "target has dimension {}, baseline generator {}",
            target.dim(),
            generator.dim()
        )));
    }
    if target.truncation != generator.truncation {
        return Err(Error::Contract(
            "target and baseline use different jump truncations".into(),
        ));
    }
    Ok(())
}

/// Symbolic terms of the difference recursion. Atoms that vanish for the
/// pair are pruned, so `target == generator` gives `d_k = 0` for `k >= 1`.
pub fn correction_series(
    target: &AffineModel,
    generator: &AffineModel,
    max_order: usize,
) -> Result<Vec<SymPoly>> {
    check_pair(target, generator)?;
    let (t1, g1) = (target.clone(), generator.clone());
    let (t2, g2) = (target.clone(), generator.clone());
    let mut rec = LeibnizRecursion::new(
        target.dim(),
        move |eps: &MultiIndex| {
            let mut atoms = vec![AtomKey::base(Family::Delta, eps.clone())];
            if !eps.is_zero() {
                atoms.push(AtomKey::base(Family::Baseline, eps.clone()));
            }
            atoms.retain(|a| alive(&t1, &g1, a));
            atoms
        },
        move |a| alive(&t2, &g2, a),
    );
    fn alive(t: &AffineModel, g: &AffineModel, a: &AtomKey) -> bool {
        match a.family {
            Family::Delta => differs(t, g, a),
            Family::Baseline => alive_in(g, a),
            _ => false,
        }
    }
    rec.extend_to(max_order);
    Ok(rec.series())
}

/// Symbolic terms of the brute-force recursion. With a static baseline the
/// time-drift atoms vanish and the plain series is recovered.
pub fn brute_force_series(
    target: &AffineModel,
    static_baseline: bool,
    max_order: usize,
) -> Vec<SymPoly> {
    let (t1, t2) = (target.clone(), target.clone());
    let mut rec = LeibnizRecursion::new(
        target.dim(),
        move |eps: &MultiIndex| {
            let mut atoms = Vec::new();
            if eps.is_zero() && !static_baseline {
                atoms.push(AtomKey::base(Family::TimeDrift, eps.clone()));
            }
            let s = AtomKey::sigma(eps.clone());
            if alive_in(&t1, &s) {
                atoms.push(s);
            }
            atoms
        },
        move |a| match a.family {
            Family::Sigma => alive_in(&t2, a),
            Family::TimeDrift => !static_baseline && a.deriv.is_zero(),
            _ => false,
        },
    );
    rec.extend_to(max_order);
    rec.series()
}

/// Compiled generalized series of a target around a baseline.
pub struct GeneralizedSeries {
    target: Arc<AffineModel>,
    baseline: Arc<dyn Baseline>,
    recursion: Recursion,
    symbolic: Vec<SymPoly>,
    compiled: CompiledSeries,
}

impl GeneralizedSeries {
    pub fn build(
        target: Arc<AffineModel>,
        baseline: Arc<dyn Baseline>,
        max_order: usize,
        recursion: Recursion,
    ) -> Result<Self> {
        check_pair(&target, baseline.generator())?;
        let symbolic = match recursion {
            Recursion::Difference => correction_series(&target, baseline.generator(), max_order)?,
            Recursion::BruteForce => brute_force_series(&target, baseline.is_static(), max_order),
        };
        let compiled = CompiledSeries::compile(&symbolic);
        Ok(GeneralizedSeries {
            target,
            baseline,
            recursion,
            symbolic,
            compiled,
        })
    }

    pub fn target(&self) -> &Arc<AffineModel> {
        &self.target
    }

    pub fn baseline(&self) -> &Arc<dyn Baseline> {
        &self.baseline
    }

    pub fn recursion(&self) -> Recursion {
        self.recursion
    }

    pub fn order(&self) -> usize {
        self.symbolic.len() - 1
    }

    pub fn symbolic(&self) -> &[SymPoly] {
        &self.symbolic
    }

    /// `exp(phi_0 + psi_0 . x)` and `d_k(x, psi_0(t, u))` for `k = 0..=K`.
    pub fn terms_at(&self, x: &[f64], u: &[f64], t: f64) -> Result<(Complex64, Vec<Complex64>)> {
        let d = self.target.dim();
        if x.len() != d || u.len() != d {
            return Err(Error::Contract(
                "point dimension does not match the model".into(),
            ));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Contract(format!(
                "t = {t} must be finite and nonnegative"
            )));
        }
        if !self.target.contains(x) {
            return Err(Error::Domain(format!(
                "x = {x:?} lies outside the state domain"
            )));
        }
        let b = &*self.baseline;
        let psi = b.psi0(t, u)?;
        let phase: Complex64 = psi.iter().zip(x).map(|(p, v)| p * v).sum();
        let prefactor = (b.phi0(t, u)? + phase).exp();
        let atoms = self.compiled.atoms();
        let order = self.compiled.max_deriv_order();
        let uses = |f: Family| atoms.iter().any(|a| a.family == f);
        let target_table = if uses(Family::Sigma) || uses(Family::Delta) {
            Some(SymbolTable::at(&self.target, x, &psi, order)?)
        } else {
            None
        };
        let base_table = if uses(Family::Baseline) || uses(Family::Delta) {
            Some(SymbolTable::at_unchecked(b.generator(), x, &psi, order)?)
        } else {
            None
        };
        let drift = if uses(Family::TimeDrift) {
            Some((b.dphi0(t, u)?, b.dpsi0(t, u)?))
        } else {
            None
        };
        let read = |table: &Option<SymbolTable>, a: &AtomKey| {
            let table = table.as_ref().expect("table built for this family");
            match a.direction() {
                None => table.base(&a.deriv),
                Some(l) => table.slope(l + 1, &a.deriv),
            }
        };
        let values: Vec<Complex64> = atoms
            .iter()
            .map(|a| match a.family {
                Family::Sigma => read(&target_table, a),
                Family::Baseline => read(&base_table, a),
                Family::Delta => read(&target_table, a) - read(&base_table, a),
                Family::TimeDrift => {
                    let (dphi, dpsi) = drift.as_ref().expect("drift computed");
                    match a.direction() {
                        None => -dphi - dpsi.iter().zip(x).map(|(p, v)| p * v).sum::<Complex64>(),
                        Some(l) => -dpsi[l],
                    }
                }
            })
            .collect();
        Ok((prefactor, self.compiled.evaluate(&values)))
    }
}

/// `exp(phi_0 + psi_0 . x) (1 + sum_k d_k(x, psi_0(t, u)) t^k)`.
pub fn eval_generalized(
    series: &GeneralizedSeries,
    x: &[f64],
    u: &[f64],
    t: f64,
) -> Result<CfResult> {
    if series.order() < 1 {
        return Err(Error::Contract(
            "truncation order must be at least 1".into(),
        ));
    }
    let (prefactor, d) = series.terms_at(x, u, t)?;
    let mut tk = 1.0;
    let contributions = d[1..]
        .iter()
        .map(|v| {
            tk *= t;
            v * tk
        })
        .collect();
    Ok(CfResult::assemble(
        prefactor,
        contributions,
        Mode::Generalized,
    ))
}

pub struct GeneralizedEngine {
    series: Arc<GeneralizedSeries>,
}

impl GeneralizedEngine {
    /// Certifies the baseline against its generator before accepting it.
    pub fn new(series: Arc<GeneralizedSeries>) -> Result<Self> {
        let b = &**series.baseline();
        certify_baseline(b, &default_residual_points(b.generator()))?;
        Ok(GeneralizedEngine { series })
    }
}

impl CfEngine for GeneralizedEngine {
    fn name(&self) -> &str {
        "generalized"
    }

    fn order(&self) -> usize {
        self.series.order()
    }

    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<CfResult> {
        eval_generalized(&self.series, x, u, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gensym::baseline::{eval_baseline_cf, VasicekBaseline, ZeroBaseline};
    use crate::oracle::VasicekParams;

    fn vasicek() -> AffineModel {
        VasicekParams {
            a0: 0.04,
            b0: 0.1,
            b1: -0.5,
        }
        .to_model()
    }

    #[test]
    fn identical_models_are_nilpotent() {
        let m = vasicek();
        let s = correction_series(&m, &m, 8).unwrap();
        assert!(s[0].coefficient_sum() == num_rational::BigRational::from_integer(1.into()));
        assert!(s[1..].iter().all(SymPoly::is_zero));
    }

    #[test]
    fn target_equal_to_baseline_gives_baseline_value() {
        let b: Arc<dyn Baseline> = Arc::new(VasicekBaseline::new(VasicekParams {
            a0: 0.04,
            b0: 0.1,
            b1: -0.5,
        }));
        let s = GeneralizedSeries::build(Arc::new(vasicek()), b.clone(), 10, Recursion::Difference)
            .unwrap();
        let r = eval_generalized(&s, &[0.2], &[1.0], 0.7).unwrap();
        assert_eq!(r.value, eval_baseline_cf(&*b, &[0.2], &[1.0], 0.7).unwrap());
    }

    #[test]
    fn zero_baseline_recovers_the_plain_series() {
        let m = Arc::new(vasicek());
        let plain = crate::series::PlainSeries::build(m.clone(), 10);
        for rec in [Recursion::Difference, Recursion::BruteForce] {
            let s = GeneralizedSeries::build(m.clone(), Arc::new(ZeroBaseline::new(1)), 10, rec)
                .unwrap();
            let a = eval_generalized(&s, &[0.2], &[1.0], 0.3).unwrap();
            let b = crate::series::eval_local(&plain, &[0.2], &[1.0], 0.3).unwrap();
            assert!((a.value - b.value).norm() < 1e-12, "{rec}");
        }
    }

    #[test]
    fn recursions_agree_for_a_drift_baseline() {
        let target = Arc::new(vasicek());
        let b: Arc<dyn Baseline> = Arc::new(VasicekBaseline::new(VasicekParams {
            a0: 0.0,
            b0: 0.1,
            b1: -0.5,
        }));
        let d =
            GeneralizedSeries::build(target.clone(), b.clone(), 12, Recursion::Difference).unwrap();
        let f = GeneralizedSeries::build(target, b, 12, Recursion::BruteForce).unwrap();
        let x = eval_generalized(&d, &[0.1], &[1.0], 0.2).unwrap();
        let y = eval_generalized(&f, &[0.1], &[1.0], 0.2).unwrap();
        assert!(
            (x.value - y.value).norm() < 1e-7,
            "{} vs {}",
            x.value,
            y.value
        );
        // only the diffusion part differs, so no slope difference atoms survive
        for p in d.symbolic() {
            for (m, _) in p.iter() {
                for (a, _) in m.factors() {
                    assert!(!(a.family == Family::Delta && !a.is_base()), "{a}");
                }
            }
        }
    }
}
