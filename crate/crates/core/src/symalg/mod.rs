//! Exact polynomial algebra over symbol atoms, the series terms `d_k`, their
//! coefficient tables and the counting triangle.

pub mod atom;
pub mod coeffs;
pub mod counting;
pub mod dump;
pub mod leibniz;
pub mod poly;

pub use atom::{AtomKey, Family};
pub use coeffs::{coefficient_recursion, cross_check, CoefficientRow, CrossCheckReport};
pub use counting::{cardinality_bound, counting_triangle, lemma_triangle, CountingTriangle};
pub use leibniz::{d_series, LeibnizRecursion};
pub use poly::{Monomial, SymPoly};
