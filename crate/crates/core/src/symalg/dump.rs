//! JSON dumps of series terms and coefficient rows, one exact fraction per
//! entry. Output is sorted so dumps are byte-stable.

use num_rational::BigRational;
use serde_json::{json, Value};

use super::coeffs::CoefficientRow;
use super::poly::SymPoly;

fn fraction(c: &BigRational) -> Value {
    json!({ "num": c.numer().to_string(), "den": c.denom().to_string() })
}

/// `[{ "order": k, "terms": [{ "monomial", "num", "den" }, ...] }, ...]`.
pub fn series_to_json(dim: usize, series: &[SymPoly]) -> Value {
    let orders: Vec<Value> = series
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let terms: Vec<Value> = p
                .sorted_terms()
                .into_iter()
                .map(|(m, c)| {
                    let mut v = fraction(c);
                    v["monomial"] = Value::String(m.to_string());
                    v
                })
                .collect();
            json!({ "order": k, "terms": terms })
        })
        .collect();
    json!({ "dimension": dim, "series": orders })
}

/// `[{ "order": k, "entries": [{ "alpha", "beta", "num", "den" }, ...] }, ...]`.
/// Multivariate `beta` is written as one `d`-tuple per alpha slot.
pub fn coefficients_to_json(dim: usize, rows: &[CoefficientRow]) -> Value {
    let orders: Vec<Value> = rows
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, row)| {
            let entries: Vec<Value> = row
                .iter()
                .map(|(pair, c)| {
                    let mut v = fraction(c);
                    v["alpha"] = json!(pair.alpha);
                    v["beta"] = if dim == 1 {
                        json!(pair.beta)
                    } else {
                        json!(pair.beta_tuples())
                    };
                    v
                })
                .collect();
            json!({ "order": k, "entries": entries })
        })
        .collect();
    json!({ "dimension": dim, "rows": orders })
}
