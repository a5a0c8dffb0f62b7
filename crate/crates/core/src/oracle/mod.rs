//! Reference characteristic functions: Riccati integration and closed forms.

pub mod closed;
pub mod riccati;

use std::sync::Arc;

use num_complex::Complex64;

pub use closed::{
    cir_cf, heston_cf, levy_khintchine_cf, vasicek_cf, CirParams, HestonParams, VasicekParams,
};
pub use riccati::{riccati_cf, solve_riccati, IntegratorConfig, RiccatiSolution, EXPLOSION_BOUND};

use crate::error::{Error, Result};
use crate::symbol::AffineModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    /// Integrator error estimate; `None` for closed forms.
    pub error_estimate: Option<f64>,
}

impl OracleValue {
    fn exact(value: Complex64) -> Self {
        OracleValue {
            value,
            error_estimate: None,
        }
    }
}

/// A reference evaluation of the characteristic function of a fixed model.
pub trait Oracle: Send + Sync {
    fn name(&self) -> &str;
    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<OracleValue>;
}

fn check_point(model: &AffineModel, x: &[f64], u: &[f64], t: f64) -> Result<()> {
    if x.len() != model.dim() || u.len() != model.dim() {
        return Err(Error::Contract(
            "point dimension does not match the model".into(),
        ));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Contract(format!(
            "t = {t} must be finite and nonnegative"
        )));
    }
    if !model.contains(x) {
        return Err(Error::Domain(format!(
            "x = {x:?} lies outside the state domain"
        )));
    }
    Ok(())
}

fn not_applicable(name: &str, reason: &str) -> Error {
    Error::NotApplicable {
        kind: "oracle",
        name: name.into(),
        reason: reason.into(),
    }
}

pub struct RiccatiOracle {
    model: Arc<AffineModel>,
    config: IntegratorConfig,
}

impl RiccatiOracle {
    pub fn new(model: Arc<AffineModel>, config: IntegratorConfig) -> Self {
        RiccatiOracle { model, config }
    }
}

impl Oracle for RiccatiOracle {
    fn name(&self) -> &str {
        "riccati"
    }

    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<OracleValue> {
        check_point(&self.model, x, u, t)?;
        let s = solve_riccati(&self.model, u, t, self.config)?;
        let scale = 1.0 + x.iter().map(|v| v.abs()).sum::<f64>();
        let value = s.value(x);
        Ok(OracleValue {
            value,
            error_estimate: Some(s.error_estimate * scale * value.norm()),
        })
    }
}

pub struct LevyOracle {
    model: Arc<AffineModel>,
}

impl LevyOracle {
    pub fn new(model: Arc<AffineModel>) -> Result<Self> {
        if !model.is_levy() {
            return Err(not_applicable(
                "levy",
                "model has nonzero slope coefficients",
            ));
        }
        Ok(LevyOracle { model })
    }
}

impl Oracle for LevyOracle {
    fn name(&self) -> &str {
        "levy"
    }

    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<OracleValue> {
        check_point(&self.model, x, u, t)?;
        levy_khintchine_cf(&self.model, x, u, t).map(OracleValue::exact)
    }
}

pub struct VasicekOracle {
    model: Arc<AffineModel>,
    params: VasicekParams,
}

impl VasicekOracle {
    pub fn new(model: Arc<AffineModel>) -> Result<Self> {
        let params = VasicekParams::from_model(&model).ok_or_else(|| {
            not_applicable("vasicek", "needs d = 1, constant diffusion and no jumps")
        })?;
        Ok(VasicekOracle { model, params })
    }
}

impl Oracle for VasicekOracle {
    fn name(&self) -> &str {
        "vasicek"
    }

    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<OracleValue> {
        check_point(&self.model, x, u, t)?;
        Ok(OracleValue::exact(vasicek_cf(&self.params, x[0], u[0], t)))
    }
}

pub struct CirOracle {
    model: Arc<AffineModel>,
    params: CirParams,
}

impl CirOracle {
    pub fn new(model: Arc<AffineModel>) -> Result<Self> {
        let params = CirParams::from_model(&model)
            .ok_or_else(|| not_applicable("cir", "needs d = 1, a0 = 0, a1 > 0 and no jumps"))?;
        Ok(CirOracle { model, params })
    }
}

impl Oracle for CirOracle {
    fn name(&self) -> &str {
        "cir"
    }

    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<OracleValue> {
        check_point(&self.model, x, u, t)?;
        cir_cf(&self.params, x[0], u[0], t).map(OracleValue::exact)
    }
}

pub struct HestonOracle {
    model: Arc<AffineModel>,
    params: HestonParams,
}

impl HestonOracle {
    pub fn new(model: Arc<AffineModel>) -> Result<Self> {
        let params = HestonParams::from_model(&model).ok_or_else(|| {
            not_applicable(
                "heston",
                "model does not have the (x, v) stochastic-volatility structure",
            )
        })?;
        Ok(HestonOracle { model, params })
    }

    pub fn with_params(params: HestonParams) -> Result<Self> {
        params.validate()?;
        Ok(HestonOracle {
            model: Arc::new(params.to_model()),
            params,
        })
    }
}

impl Oracle for HestonOracle {
    fn name(&self) -> &str {
        "heston"
    }

    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<OracleValue> {
        check_point(&self.model, x, u, t)?;
        if u[1] != 0.0 {
            return Err(Error::Contract(
                "Heston closed form needs a zero frequency on v".into(),
            ));
        }
        heston_cf(&self.params, x[0], x[1], u[0], t).map(OracleValue::exact)
    }
}

/// The first closed form that applies, in the order levy, vasicek, cir, heston.
pub fn closed_form_oracle(model: Arc<AffineModel>) -> Result<Box<dyn Oracle>> {
    if let Ok(o) = LevyOracle::new(model.clone()) {
        return Ok(Box::new(o));
    }
    if let Ok(o) = VasicekOracle::new(model.clone()) {
        return Ok(Box::new(o));
    }
    if let Ok(o) = CirOracle::new(model.clone()) {
        return Ok(Box::new(o));
    }
    if let Ok(o) = HestonOracle::new(model) {
        return Ok(Box::new(o));
    }
    Err(not_applicable("closed", "no closed form matches the model"))
}

/// A closed form when one applies, otherwise Riccati integration.
pub fn auto_oracle(model: Arc<AffineModel>, config: IntegratorConfig) -> Box<dyn Oracle> {
    closed_form_oracle(model.clone())
        .unwrap_or_else(|_| Box::new(RiccatiOracle::new(model, config)))
}
