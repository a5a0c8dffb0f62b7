use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::compiled::CompiledSeries;
use crate::error::Result;
use crate::symalg::{AtomKey, Family, LeibnizRecursion, SymPoly};
use crate::symbol::{AffineModel, SymbolTable};

/// The series terms `d_0..d_K` of one model, with atoms that vanish
/// identically for the model pruned away.
pub struct PlainSeries {
    model: Arc<AffineModel>,
    symbolic: Vec<SymPoly>,
    compiled: CompiledSeries,
    x_derivatives: OnceLock<Vec<CompiledSeries>>,
}

/// Whether a plain atom can be nonzero for the model.
pub fn atom_alive(model: &AffineModel, atom: &AtomKey) -> bool {
    match atom.direction() {
        None => (0..=model.dim()).any(|c| model.component_may_be_nonzero(c, &atom.deriv)),
        Some(l) => model.component_may_be_nonzero(l + 1, &atom.deriv),
    }
}

impl PlainSeries {
    pub fn build(model: Arc<AffineModel>, max_order: usize) -> Self {
        let m1 = model.clone();
        let m2 = model.clone();
        let mut rec = LeibnizRecursion::new(
            model.dim(),
            move |eps| {
                let a = AtomKey::sigma(eps.clone());
                if atom_alive(&m1, &a) {
                    vec![a]
                } else {
                    Vec::new()
                }
            },
            move |a| atom_alive(&m2, a),
        );
        rec.extend_to(max_order);
        let symbolic = rec.series();
        let compiled = CompiledSeries::compile(&symbolic);
        PlainSeries {
            model,
            symbolic,
            compiled,
            x_derivatives: OnceLock::new(),
        }
    }

    pub fn model(&self) -> &Arc<AffineModel> {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.symbolic.len() - 1
    }

    pub fn symbolic(&self) -> &[SymPoly] {
        &self.symbolic
    }

    pub fn compiled(&self) -> &CompiledSeries {
        &self.compiled
    }

    /// `d_k(x, xi)` for `k = 0..=K`.
    pub fn terms_at(&self, x: &[f64], xi: &[Complex64]) -> Result<Vec<Complex64>> {
        let table = SymbolTable::at(&self.model, x, xi, self.compiled.max_deriv_order())?;
        Ok(self
            .compiled
            .evaluate(&atom_values(self.compiled.atoms(), &table)))
    }

    /// `[l][k] = d_{x_l} d_k(x, xi)`.
    pub fn x_derivatives_at(&self, x: &[f64], xi: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        let derivs = self.x_derivatives.get_or_init(|| {
            (0..self.model.dim())
                .map(|l| {
                    let polys: Vec<SymPoly> = self.symbolic.iter().map(|p| p.derive_x(l)).collect();
                    CompiledSeries::compile(&polys)
                })
                .collect()
        });
        let order = derivs
            .iter()
            .map(|c| c.max_deriv_order())
            .max()
            .unwrap_or(0);
        let table = SymbolTable::at(&self.model, x, xi, order)?;
        Ok(derivs
            .iter()
            .map(|c| c.evaluate(&atom_values(c.atoms(), &table)))
            .collect())
    }
}

/// Numeric values of plain atoms from a symbol table.
pub fn atom_values(atoms: &[AtomKey], table: &SymbolTable) -> Vec<Complex64> {
    atoms
        .iter()
        .map(|a| {
            debug_assert_eq!(a.family, Family::Sigma);
            match a.direction() {
                None => table.base(&a.deriv),
                Some(l) => table.slope(l + 1, &a.deriv),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levy_model_prunes_to_powers_of_sigma() {
        let mut m = AffineModel::zero(1);
        m.a0 = vec![vec![1.0]];
        let s = PlainSeries::build(Arc::new(m), 10);
        for k in 0..=10 {
            assert!(s.symbolic()[k].len() <= 1);
        }
        let v = s.terms_at(&[0.0], &[Complex64::new(0.0, 1.0)]).unwrap();
        let fact: f64 = (1..=4).map(f64::from).product();
        assert!((v[4] - Complex64::new(0.5f64.powi(4) / fact, 0.0)).norm() < 1e-16);
    }
}
