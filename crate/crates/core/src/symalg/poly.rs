use std::fmt;
use std::ops::{AddAssign, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::atom::AtomKey;

/// A product of atom powers, kept sorted by atom so that equal products hash
/// equally.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[(AtomKey, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn atom(key: AtomKey) -> Self {
        Self::one().times(&key, 1)
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (AtomKey, u32)>) -> Self {
        factors
            .into_iter()
            .fold(Self::one(), |m, (k, p)| m.times(&k, p))
    }

    pub fn factors(&self) -> &[(AtomKey, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// `self * key^pow`.
    pub fn times(&self, key: &AtomKey, pow: u32) -> Self {
        if pow == 0 {
            return self.clone();
        }
        let mut out = self.clone();
        match out.0.binary_search_by(|(k, _)| k.cmp(key)) {
            Ok(i) => out.0[i].1 += pow,
            Err(i) => out.0.insert(i, (key.clone(), pow)),
        }
        out
    }

    /// Replace one power of factor `i` by `replacement`.
    pub fn exchange(&self, i: usize, replacement: &AtomKey) -> Self {
        let mut out = self.clone();
        if out.0[i].1 == 1 {
            out.0.remove(i);
        } else {
            out.0[i].1 -= 1;
        }
        out.times(replacement, 1)
    }

    pub fn power_of(&self, key: &AtomKey) -> u32 {
        self.0
            .binary_search_by(|(k, _)| k.cmp(key))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, p)| p).sum()
    }

    /// Total power of base atoms.
    pub fn base_count(&self) -> u32 {
        self.0
            .iter()
            .filter(|(k, _)| k.is_base())
            .map(|(_, p)| p)
            .sum()
    }

    /// Total power of slope atoms.
    pub fn slope_count(&self) -> u32 {
        self.degree() - self.base_count()
    }

    /// Total power of base atoms carrying at least one derivative.
    pub fn derived_base_count(&self) -> u32 {
        self.0
            .iter()
            .filter(|(k, _)| k.is_base() && !k.deriv.is_zero())
            .map(|(_, p)| p)
            .sum()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    /// `sig^2*sig_1`, or `1` for the empty product.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (k, p)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *p == 1 {
                write!(f, "{k}")?;
            } else {
                write!(f, "{k}^{p}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial in atoms with exact rational coefficients. Zero
/// coefficients are never stored; `BigRational` keeps lowest terms.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SymPoly {
    terms: FxHashMap<Monomial, BigRational>,
}

impl SymPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Terms sorted by monomial, for deterministic output.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SymPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_atom(&self, key: &AtomKey, pow: u32) -> Self {
        SymPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.times(key, pow), v.clone()))
                .collect(),
        }
    }

    /// `d_{x_l}` with the affine rule: base atoms map to slope atoms of
    /// direction `l` (0-based), slope atoms are constant.
    pub fn derive_x(&self, l: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (i, (k, p)) in m.factors().iter().enumerate() {
                if let Some(s) = k.derive_x(l) {
                    out.add_term(
                        m.exchange(i, &s),
                        c * BigRational::from_integer(BigInt::from(*p)),
                    );
                }
            }
        }
        out
    }

    /// Set every atom matching `vanishes` to zero.
    pub fn substitute_zero(&self, vanishes: impl Fn(&AtomKey) -> bool) -> Self {
        SymPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.factors().iter().any(|(k, _)| vanishes(k)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Sum of all coefficients.
    pub fn coefficient_sum(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c)
    }
}

impl AddAssign<&SymPoly> for SymPoly {
    fn add_assign(&mut self, rhs: &SymPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Mul<&SymPoly> for &SymPoly {
    type Output = SymPoly;

    fn mul(self, rhs: &SymPoly) -> SymPoly {
        let mut out = SymPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = mb
                    .factors()
                    .iter()
                    .fold(ma.clone(), |m, (k, p)| m.times(k, *p));
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl fmt::Debug for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}
