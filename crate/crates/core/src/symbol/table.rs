use num_complex::Complex64;

use super::model::{imag, AffineModel};
use crate::error::Result;
use crate::multiindex::{FlatIndexer, MultiIndex};

/// Values of `d^eps sigma(x, xi)` and `d^eps sigma_l(xi)` for `|eps| <= K`.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    pub max_order: u32,
    indexer: FlatIndexer,
    base: Vec<Complex64>,
    /// `slopes[l - 1][slot]`.
    slopes: Vec<Vec<Complex64>>,
}

impl SymbolTable {
    /// Table at a complex symbol argument.
    pub fn at(model: &AffineModel, x: &[f64], xi: &[Complex64], max_order: u32) -> Result<Self> {
        model.symbol_at(x, xi)?;
        Self::at_unchecked(model, x, xi, max_order)
    }

    /// As [`SymbolTable::at`] without the state-domain check.
    pub fn at_unchecked(
        model: &AffineModel,
        x: &[f64],
        xi: &[Complex64],
        max_order: u32,
    ) -> Result<Self> {
        let d = model.dim();
        let slopes = (1..=d)
            .map(|l| model.component_derivatives(l, xi, max_order))
            .collect::<Result<Vec<_>>>()?;
        let mut base = model.component_derivatives(0, xi, max_order)?;
        for (l, s) in slopes.iter().enumerate() {
            if x[l] != 0.0 {
                for (b, v) in base.iter_mut().zip(s) {
                    *b += x[l] * v;
                }
            }
        }
        Ok(SymbolTable {
            max_order,
            indexer: FlatIndexer::new(d, max_order),
            base,
            slopes,
        })
    }

    /// Table at `xi = i u`.
    pub fn new(model: &AffineModel, x: &[f64], u: &[f64], max_order: u32) -> Result<Self> {
        Self::at(model, x, &imag(u), max_order)
    }

    pub fn dim(&self) -> usize {
        self.slopes.len()
    }

    pub fn indexer(&self) -> &FlatIndexer {
        &self.indexer
    }

    /// `d^eps sigma(x, xi)`.
    pub fn base(&self, eps: &MultiIndex) -> Complex64 {
        self.base[self.slot(eps)]
    }

    /// `d^eps sigma_l(xi)` for 1-based `l`.
    pub fn slope(&self, l: usize, eps: &MultiIndex) -> Complex64 {
        self.slopes[l - 1][self.slot(eps)]
    }

    pub fn base_values(&self) -> &[Complex64] {
        &self.base
    }

    pub fn slope_values(&self, l: usize) -> &[Complex64] {
        &self.slopes[l - 1]
    }

    fn slot(&self, eps: &MultiIndex) -> usize {
        self.indexer
            .slot(eps)
            .unwrap_or_else(|| panic!("{eps} exceeds table order {}", self.max_order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_derivatives() {
        let mut m = AffineModel::zero(1);
        m.a0 = vec![vec![1.0]];
        let t = SymbolTable::new(&m, &[0.0], &[1.0], 3).unwrap();
        let e = |k| MultiIndex::new([k]);
        assert!((t.base(&e(0)) - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert!((t.base(&e(1)) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((t.base(&e(2)) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(t.base(&e(3)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn base_is_constant_plus_slopes() {
        let mut m = AffineModel::zero(2);
        m.a0 = vec![vec![0.2, 0.05], vec![0.05, 0.1]];
        m.a_slope[1] = vec![vec![0.3, 0.0], vec![0.0, 0.4]];
        m.b0 = vec![0.1, 0.2];
        m.b_slope = vec![vec![-0.5, 0.1], vec![0.0, -1.0]];
        m.state_domain = vec![[None, None], [Some(0.0), None]];
        m.validate().unwrap();
        let (x, u) = ([0.4, 1.3], [0.8, -1.1]);
        let t = SymbolTable::new(&m, &x, &u, 2).unwrap();
        let s = m.eval_symbol(&x, &u).unwrap();
        assert!((t.base(&MultiIndex::zero(2)) - s).norm() < 1e-14);
        let s0 = m.eval_symbol(&[0.0, 0.0], &u).unwrap();
        let lin = x[0] * t.slope(1, &MultiIndex::zero(2)) + x[1] * t.slope(2, &MultiIndex::zero(2));
        assert!((s - s0 - lin).norm() < 1e-13);
    }
}
