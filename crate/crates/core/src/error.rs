use thiserror::Error;

use crate::multiindex::MultiIndex;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A model failed validation. `path` names the offending field.
    #[error("invalid model at `{path}`: {message}")]
    Model { path: String, message: String },

    /// A point lies outside the declared state domain or transform domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A jump specification cannot deliver the requested derivative order.
    #[error("jump transform supports derivatives up to order {max_order}, requested {eps}")]
    Capability { eps: MultiIndex, max_order: usize },

    /// Numerical evaluation failed (user callback, singular transform, ...).
    #[error("evaluation failed: {0}")]
    Evaluation(String),

    /// The Riccati trajectory left every reasonable bound.
    #[error("moment explosion: |psi| exceeded {bound:e} at t = {time}")]
    Explosion { time: f64, bound: f64 },

    /// A closed-form branch became singular.
    #[error("branch singularity at t = {t}, u = {u}: {detail}")]
    Branch { t: f64, u: f64, detail: String },

    /// A monomial or exponent pair could not be mapped between layouts.
    #[error("layout mapping failed: {0}")]
    Layout(String),

    /// Expression parsing or evaluation failed.
    #[error("expression error: {0}")]
    Expression(String),

    /// Lookup in a strategy registry failed.
    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    /// A strategy exists but does not apply to the given model.
    #[error("{kind} `{name}` does not apply: {reason}")]
    NotApplicable {
        kind: &'static str,
        name: String,
        reason: String,
    },

    /// A named file could not be read.
    #[error("cannot read `{path}`: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn model(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Model {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag used by the CLI's structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Contract(_) => "contract",
            Error::Model { .. } => "schema",
            Error::Domain(_) => "domain",
            Error::Capability { .. } => "capability",
            Error::Evaluation(_) => "evaluation",
            Error::Explosion { .. } => "explosion",
            Error::Branch { .. } => "branch",
            Error::Layout(_) => "layout",
            Error::Expression(_) => "expression",
            Error::UnknownStrategy { .. } => "unknown_strategy",
            Error::NotApplicable { .. } => "not_applicable",
            Error::File { .. } | Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}
