//! Characteristic functions of affine jump-diffusions as power series in the
//! operator symbol, with exact rational coefficients, plus reference oracles
//! (Riccati integration and closed forms) and generalized-symbol expansions
//! around solvable baselines.

pub mod error;
pub mod gensym;
pub mod multiindex;
pub mod oracle;
pub mod registry;
pub mod series;
pub mod symalg;
pub mod symbol;

pub use error::{Error, Result};
