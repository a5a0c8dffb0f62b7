use std::fmt;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Local,
    Globalized,
    Generalized,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Local => "local",
            Mode::Globalized => "global",
            Mode::Generalized => "generalized",
        })
    }
}

/// A characteristic-function value with its series decomposition:
/// `value = prefactor * (1 + sum contributions)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CfResult {
    pub value: Complex64,
    pub prefactor: Complex64,
    /// Term of each order `1..=K`.
    pub contributions: Vec<Complex64>,
    pub order: usize,
    /// Absolute size of the neglected tail, relative to the prefactor scale.
    pub tail: f64,
    pub mode: Mode,
    pub warnings: Vec<String>,
}

/// Clip range for the observed term ratio in [`tail_estimate`].
pub const RATIO_CAP: f64 = 0.9;

/// `|c_K| / (1 - r)` with `r = |c_K| / |c_{K-1}|` clipped to `[0, 0.9]`.
pub fn tail_estimate(contributions: &[Complex64]) -> f64 {
    let n = contributions.len();
    let Some(last) = contributions.last() else {
        return 0.0;
    };
    let last = last.norm();
    if last == 0.0 {
        return 0.0;
    }
    let r = if n >= 2 && contributions[n - 2].norm() > 0.0 {
        (last / contributions[n - 2].norm()).clamp(0.0, RATIO_CAP)
    } else {
        RATIO_CAP
    };
    last / (1.0 - r)
}

impl CfResult {
    pub fn assemble(prefactor: Complex64, contributions: Vec<Complex64>, mode: Mode) -> Self {
        let sum: Complex64 = contributions.iter().sum();
        CfResult {
            value: prefactor * (1.0 + sum),
            prefactor,
            order: contributions.len(),
            tail: tail_estimate(&contributions) * prefactor.norm(),
            contributions,
            mode,
            warnings: Vec::new(),
        }
    }

    pub fn with_warning(mut self, w: impl Into<String>) -> Self {
        self.warnings.push(w.into());
        self
    }
}
