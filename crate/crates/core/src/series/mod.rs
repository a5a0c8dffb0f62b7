//! Numeric evaluation of the characteristic-function series.

pub mod beta;
pub mod compiled;
pub mod global;
pub mod jet;
pub mod local;
pub mod plain;
pub mod result;
pub mod transform;

pub use beta::{choose_beta, ChosenBeta};
pub use compiled::CompiledSeries;
pub use global::{eval_globalized, BetaRule, GlobalEngine};
pub use jet::Jet;
pub use local::{eval_local, LocalEngine};
pub use plain::PlainSeries;
pub use result::{tail_estimate, CfResult, Mode};
pub use transform::TimeTransform;

use crate::error::Result;

/// One way of evaluating the characteristic function of a fixed model.
pub trait CfEngine: Send + Sync {
    fn name(&self) -> &str;
    /// Truncation order `K`.
    fn order(&self) -> usize;
    fn evaluate(&self, x: &[f64], u: &[f64], t: f64) -> Result<CfResult>;
}

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 16;
