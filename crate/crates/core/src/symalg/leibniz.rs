//! The series terms `d_k` from the Leibniz recursion
//!
//! ```text
//! d_0 = 1,   d_{k+1} = 1/(k+1) * sum_{|eps| <= k} C_eps * (1/eps!) d^eps_x d_k
//! ```
//!
//! where `C_eps` is a sum of atoms (for the plain series, the single atom
//! `d^eps_xi sigma`). The recursion runs on `N_k = k! d_k`, whose coefficients
//! are integers: with `G_eps = d^eps_x N_k / eps!` we have
//! `G_{eps + e_l} = d_{x_l} G_eps / (eps_l + 1)` as an exact integer division,
//! and `N_{k+1} = sum_eps C_eps * G_eps`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use super::atom::AtomKey;
use super::poly::{Monomial, SymPoly};
use crate::multiindex::{enumerate_up_to, MultiIndex};

type IntTerms = FxHashMap<Monomial, BigInt>;

type CoeffFn<'a> = Box<dyn Fn(&MultiIndex) -> Vec<AtomKey> + Send + Sync + 'a>;
type AliveFn<'a> = Box<dyn Fn(&AtomKey) -> bool + Send + Sync + 'a>;

/// Incremental driver: orders already computed are kept and reused.
pub struct LeibnizRecursion<'a> {
    dim: usize,
    coeff_atoms: CoeffFn<'a>,
    alive: AliveFn<'a>,
    scaled: Vec<IntTerms>,
}

impl<'a> LeibnizRecursion<'a> {
    /// `coeff_atoms(eps)` lists the atoms whose sum is `C_eps`. Atoms for which
    /// `alive` is false are identically zero and are dropped whenever they
    /// would be created.
    pub fn new(
        dim: usize,
        coeff_atoms: impl Fn(&MultiIndex) -> Vec<AtomKey> + Send + Sync + 'a,
        alive: impl Fn(&AtomKey) -> bool + Send + Sync + 'a,
    ) -> Self {
        let mut one = IntTerms::default();
        one.insert(Monomial::one(), BigInt::one());
        LeibnizRecursion {
            dim,
            coeff_atoms: Box::new(coeff_atoms),
            alive: Box::new(alive),
            scaled: vec![one],
        }
    }

    /// The plain series in the atoms `d^eps sigma`, `d^eps sigma_l`.
    pub fn plain(dim: usize) -> Self {
        Self::new(dim, |eps| vec![AtomKey::sigma(eps.clone())], |_| true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.scaled.len() - 1
    }

    pub fn extend_to(&mut self, max_order: usize) {
        while self.scaled.len() <= max_order {
            let next = self.step();
            self.scaled.push(next);
        }
    }

    fn step(&self) -> IntTerms {
        let k = self.scaled.len() - 1;
        let current = &self.scaled[k];
        let mut divided: FxHashMap<MultiIndex, IntTerms> = FxHashMap::default();
        let mut next = IntTerms::default();
        for eps in enumerate_up_to(self.dim, k as u32) {
            let g = if eps.is_zero() {
                current.clone()
            } else {
                let l = eps.first_nonzero().expect("nonzero index");
                let parent = eps.lowered(l).expect("entry is positive");
                match divided.get(&parent) {
                    Some(p) => self.divided_derivative(p, l, eps.get(l)),
                    None => continue,
                }
            };
            if g.is_empty() {
                continue;
            }
            for atom in (self.coeff_atoms)(&eps) {
                if !(self.alive)(&atom) {
                    continue;
                }
                for (m, c) in &g {
                    add_int(&mut next, m.times(&atom, 1), c.clone());
                }
            }
            divided.insert(eps, g);
        }
        next
    }

    /// `d_{x_l} terms / divisor`, exact.
    fn divided_derivative(&self, terms: &IntTerms, l: usize, divisor: u32) -> IntTerms {
        let mut out = IntTerms::default();
        for (m, c) in terms {
            for (i, (atom, p)) in m.factors().iter().enumerate() {
                let Some(s) = atom.derive_x(l) else { continue };
                if !(self.alive)(&s) {
                    continue;
                }
                add_int(&mut out, m.exchange(i, &s), c * BigInt::from(*p));
            }
        }
        let divisor = BigInt::from(divisor);
        for c in out.values_mut() {
            let (q, r) = c.div_rem(&divisor);
            debug_assert!(r.is_zero(), "divided derivative is not integral");
            *c = q;
        }
        out
    }

    /// `k! d_k` with integer coefficients.
    pub fn scaled_term(&self, k: usize) -> SymPoly {
        SymPoly::from_terms(
            self.scaled[k]
                .iter()
                .map(|(m, c)| (m.clone(), BigRational::from_integer(c.clone()))),
        )
    }

    /// `d_k` with rational coefficients.
    pub fn term(&self, k: usize) -> SymPoly {
        let f = factorial(k);
        SymPoly::from_terms(
            self.scaled[k]
                .iter()
                .map(|(m, c)| (m.clone(), BigRational::new(c.clone(), f.clone()))),
        )
    }

    pub fn series(&self) -> Vec<SymPoly> {
        (0..self.scaled.len()).map(|k| self.term(k)).collect()
    }
}

fn add_int(map: &mut IntTerms, m: Monomial, c: BigInt) {
    use std::collections::hash_map::Entry;
    match map.entry(m) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
    }
}

pub(crate) fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// `d_0, ..., d_K` of the plain series in dimension `dim`.
pub fn d_series(dim: usize, max_order: usize) -> Vec<SymPoly> {
    let mut r = LeibnizRecursion::plain(dim);
    r.extend_to(max_order);
    r.series()
}
