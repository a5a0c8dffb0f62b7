use super::model::AffineModel;
use crate::error::{Error, Result};

/// Whether `sigma(x, iu)` is bounded in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    BoundedOnlyOnBoundedDomain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub class: Boundedness,
    /// Nonzero slope coefficients, named with 1-based indices (`b_11`,
    /// `a_121`, `nu_1`).
    pub reasons: Vec<String>,
}

/// The symbol is bounded in `x` iff the domain is bounded or every slope
/// coefficient (diffusion, drift and jump) vanishes.
pub fn classify_boundedness(model: &AffineModel) -> Classification {
    let d = model.dim();
    let mut reasons = Vec::new();
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                if model.a_slope[l][i][j] != 0.0 {
                    reasons.push(format!("a_{}{}{}", i + 1, j + 1, l + 1));
                }
            }
        }
    }
    for i in 0..d {
        for l in 0..d {
            if model.b_slope[i][l] != 0.0 {
                reasons.push(format!("b_{}{}", i + 1, l + 1));
            }
        }
    }
    for l in 1..=d {
        if !model.jumps[l].is_none() {
            reasons.push(format!("nu_{l}"));
        }
    }
    let class = if model.domain_is_bounded() || reasons.is_empty() {
        Boundedness::Bounded
    } else {
        Boundedness::BoundedOnlyOnBoundedDomain
    };
    Classification { class, reasons }
}

/// Safety factor applied to the sampled supremum.
pub const SUP_SAFETY: f64 = 1.5;

/// Upper estimate of `sup |sigma(x, iu)|` over the boxes: a grid maximum
/// (endpoints included) times [`SUP_SAFETY`].
pub fn sup_bound(model: &AffineModel, omega: &[(f64, f64)], ubox: &[(f64, f64)]) -> Result<f64> {
    let d = model.dim();
    if omega.len() != d || ubox.len() != d {
        return Err(Error::Contract(
            "box dimensions must match the model".into(),
        ));
    }
    if omega
        .iter()
        .chain(ubox)
        .any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi))
    {
        return Err(Error::Contract("boxes must be finite with lo <= hi".into()));
    }
    let axes: Vec<(f64, f64)> = omega.iter().chain(ubox).copied().collect();
    let per_axis = ((20_000f64).powf(1.0 / axes.len() as f64).floor() as usize).clamp(3, 201);
    let grid = |(lo, hi): (f64, f64), i: usize| {
        if per_axis == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (per_axis - 1) as f64
        }
    };
    let total = per_axis.pow(axes.len() as u32);
    let mut best = 0.0f64;
    let mut point = vec![0.0; axes.len()];
    for code in 0..total {
        let mut c = code;
        for (a, p) in axes.iter().zip(point.iter_mut()) {
            *p = grid(*a, c % per_axis);
            c /= per_axis;
        }
        let v = model.eval_symbol(&point[..d], &point[d..])?;
        best = best.max(v.norm());
    }
    Ok(SUP_SAFETY * best)
}
