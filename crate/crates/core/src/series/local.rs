use std::sync::Arc;

use num_complex::Complex64;

use super::plain::PlainSeries;
use super::result::{CfResult, Mode};
use super::CfEngine;
use crate::error::{Error, Result};
use crate::symbol::imag;

/// `exp(iux) (1 + sum_k d_k(x, iu) t^k)`.
pub fn eval_local(series: &PlainSeries, x: &[f64], u: &[f64], t: f64) -> Result<CfResult> {
    if series.order() < 1 {
        return Err(Error::Contract(
            "truncation order must be at least 1".into(),
        ));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Contract(format!(
            "t = {t} must be finite and nonnegative"
        )));
    }
    let xi = imag(u);
    let d = series.terms_at(x, &xi)?;
    let mut tk = 1.0;
    let contributions = d[1..]
        .iter()
        .map(|v| {
            tk *= t;
            v * tk
        })
        .collect();
    let phase: Complex64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
    Ok(CfResult::assemble(phase.exp(), contributions, Mode::Local))
}

pub struct LocalEngine {
    series: Arc<PlainSeries>,
}

impl LocalEngine {
    pub fn new(series: Arc<PlainSeries>) -> Self {
        LocalEngine { series }
    }
}

impl CfEngine for LocalEngine {
    fn name(&self) -> &str {
        "local"
    }

    fn order(&self) -> usize {
        self.series.order()
    }

    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<CfResult> {
        eval_local(&self.series, x, u, t)
    }
}
