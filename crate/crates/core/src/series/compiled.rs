use num_complex::Complex64;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::symalg::{AtomKey, SymPoly};

type Factors = SmallVec<[(u32, u32); 4]>;

/// A list of polynomials flattened for repeated numeric evaluation: atoms are
/// numbered once, coefficients are converted to `f64`.
#[derive(Debug, Clone)]
pub struct CompiledSeries {
    atoms: Vec<AtomKey>,
    polys: Vec<Vec<(f64, Factors)>>,
}

impl CompiledSeries {
    pub fn compile(polys: &[SymPoly]) -> Self {
        let mut index: FxHashMap<AtomKey, u32> = FxHashMap::default();
        let mut atoms = Vec::new();
        let compiled = polys
            .iter()
            .map(|p| {
                p.sorted_terms()
                    .into_iter()
                    .map(|(m, c)| {
                        let factors = m
                            .factors()
                            .iter()
                            .map(|(k, e)| {
                                let id = *index.entry(k.clone()).or_insert_with(|| {
                                    atoms.push(k.clone());
                                    atoms.len() as u32 - 1
                                });
                                (id, *e)
                            })
                            .collect();
                        (c.to_f64().expect("finite coefficient"), factors)
                    })
                    .collect()
            })
            .collect();
        CompiledSeries {
            atoms,
            polys: compiled,
        }
    }

    pub fn atoms(&self) -> &[AtomKey] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Largest derivative order among the atoms.
    pub fn max_deriv_order(&self) -> u32 {
        self.atoms
            .iter()
            .map(|a| a.deriv.order())
            .max()
            .unwrap_or(0)
    }

    pub fn term_count(&self) -> usize {
        self.polys.iter().map(Vec::len).sum()
    }

    /// Value of every polynomial given one value per atom (in `atoms()` order).
    pub fn evaluate(&self, values: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.atoms.len());
        self.polys
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|(c, factors)| {
                        factors
                            .iter()
                            .fold(Complex64::new(*c, 0.0), |acc, &(i, e)| {
                                acc * pow(values[i as usize], e)
                            })
                    })
                    .sum()
            })
            .collect()
    }
}

fn pow(z: Complex64, e: u32) -> Complex64 {
    match e {
        1 => z,
        2 => z * z,
        _ => z.powu(e),
    }
}
