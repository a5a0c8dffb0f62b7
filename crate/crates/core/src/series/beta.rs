use super::transform::TimeTransform;
use crate::error::{Error, Result};
use crate::symbol::{sup_bound, AffineModel};

/// Largest `tau(T)` the heuristic allows.
pub const TAU_CAP: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChosenBeta {
    pub beta: f64,
    pub tau_at_horizon: f64,
    /// `false` when the horizon forced `beta` above `1 / (2 sup|sigma|)`.
    pub contractive: bool,
}

/// `beta = min(1, 1 / (2 sup|sigma|))`, raised if needed so that
/// `tau(T) <= 0.9`. A zero supremum gives `beta = 1` before the horizon rule.
pub fn choose_beta(
    model: &AffineModel,
    omega: &[(f64, f64)],
    ubox: &[(f64, f64)],
    horizon: f64,
) -> Result<ChosenBeta> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Contract(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let sup = sup_bound(model, omega, ubox)?;
    let base = if sup == 0.0 {
        1.0
    } else {
        (1.0 / (2.0 * sup)).min(1.0)
    };
    // t(TAU_CAP) = beta * ln tan(pi/4 + pi TAU_CAP / 4)
    let span = TimeTransform::new(1.0)?.forward(TAU_CAP)?;
    let needed = horizon / span;
    let beta = base.max(needed);
    let tau = TimeTransform::new(beta)?.inverse(horizon)?;
    Ok(ChosenBeta {
        beta,
        tau_at_horizon: tau,
        contractive: beta <= base,
    })
}
