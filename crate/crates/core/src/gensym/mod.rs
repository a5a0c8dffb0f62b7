//! Expansions around a baseline generator with a known exponential-affine
//! solution.

pub mod baseline;
pub mod correction;
pub mod expr;

pub use baseline::{
    certify_baseline, default_residual_points, eval_baseline_cf, time_derivative, Baseline,
    HestonBaseline, ResidualSample, UserBaseline, UserBaselineConfig, VasicekBaseline,
    ZeroBaseline, RESIDUAL_TOLERANCE, TIME_STEP,
};
pub use correction::{
    brute_force_series, correction_series, eval_generalized, GeneralizedEngine, GeneralizedSeries,
    Recursion,
};
pub use expr::Expr;
