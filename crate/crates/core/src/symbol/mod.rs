//! Affine models, the symbol `sigma(x, xi)`, its slope symbols and their
//! `xi`-derivatives.

pub mod classify;
pub mod jumps;
pub mod model;
pub mod table;

pub use classify::{classify_boundedness, sup_bound, Boundedness, Classification};
pub use jumps::{JumpSpec, Truncation, UserJump};
pub use model::{imag, AffineModel};
pub use table::SymbolTable;
