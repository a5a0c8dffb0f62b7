//! Closed-form coefficient recursion for `c_(alpha, beta)`, the layout map from
//! monomials to exponent pairs, and the cross-check between the two routes.
//!
//! For a target pair at order `k + 1` the recursion reads
//!
//! ```text
//! c(alpha, beta) = 1/(k+1) * sum_{|eps| <= k} sum_lambda
//!     prod_j a_j! / ((a_j - sum_l lambda_{l,j})! prod_l lambda_{l,j}!) * c(a, b)
//! a = alpha - 1_{slot(eps)} + sum_l lambda_l,   b_{j,l} = beta_{j,l} - lambda_{l,j}
//! ```
//!
//! where `lambda_l` distributes `eps_l` over the slots of order `k` and the
//! predecessor `(a, b)` must vanish outside those slots.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::atom::Family;
use super::leibniz::factorial;
use super::poly::{Monomial, SymPoly};
use crate::error::{Error, Result};
use crate::multiindex::{
    binomial_count, count_below_order, is_member, project, ExponentPair, FlatIndexer, Layout,
};

/// `c_(alpha, beta)` for one order, sorted by pair.
pub type CoefficientRow = BTreeMap<ExponentPair, BigRational>;

/// Rows `0..=max_order`; row `0` holds the empty pair with value `1`.
pub fn coefficient_recursion(dim: usize, max_order: u32) -> Vec<CoefficientRow> {
    let layout = Layout::for_dim(dim);
    let indexer = FlatIndexer::new(dim, max_order.saturating_sub(1));
    let mut rows = Vec::with_capacity(max_order as usize + 1);
    let mut first = CoefficientRow::new();
    first.insert(ExponentPair::zero(layout, 0), BigRational::one());
    rows.push(first);
    for k in 0..max_order {
        let prev = &rows[k as usize];
        let targets = candidates(prev, &indexer, layout, k);
        let mut row = CoefficientRow::new();
        for t in targets {
            let c = pull(&t, prev, &indexer, k);
            if !c.is_zero() {
                row.insert(t, c);
            }
        }
        rows.push(row);
    }
    rows
}

/// Every pair at order `k + 1` reachable from the support of row `k`.
fn candidates(
    prev: &CoefficientRow,
    indexer: &FlatIndexer,
    layout: Layout,
    k: u32,
) -> BTreeSet<ExponentPair> {
    let d = layout.dim();
    let lk = count_below_order(d, k);
    let lk1 = count_below_order(d, k + 1);
    let mut out = BTreeSet::new();
    for pair in prev.keys() {
        for f in 0..lk1 {
            let eps = indexer.index(f);
            // lambda_{l, j} <= a_j jointly over l
            for lambda in distributions(eps.entries(), &pair.alpha[..lk], None) {
                let mut alpha = vec![0i64; lk1];
                let mut beta = vec![0i64; lk1 * d];
                alpha[..lk].copy_from_slice(&pair.alpha);
                beta[..lk * d].copy_from_slice(&pair.beta);
                for (l, lam) in lambda.iter().enumerate() {
                    for (j, &v) in lam.iter().enumerate() {
                        alpha[j] -= v;
                        beta[j * d + l] += v;
                    }
                }
                if alpha.iter().any(|&a| a < 0) {
                    continue;
                }
                alpha[f] += 1;
                out.insert(ExponentPair {
                    layout,
                    order: k + 1,
                    alpha,
                    beta,
                });
            }
        }
    }
    out
}

fn pull(
    target: &ExponentPair,
    prev: &CoefficientRow,
    indexer: &FlatIndexer,
    k: u32,
) -> BigRational {
    let d = target.dim();
    let lk = count_below_order(d, k);
    let lk1 = count_below_order(d, k + 1);
    let mut acc = BigRational::zero();
    for f in 0..lk1 {
        if target.alpha[f] < 1 {
            continue;
        }
        let eps = indexer.index(f);
        let bounds: Vec<Vec<i64>> = (0..d)
            .map(|l| (0..lk).map(|j| target.beta_at(j, l)).collect())
            .collect();
        for lambda in distributions(eps.entries(), &[], Some(&bounds)) {
            let mut a = target.alpha.clone();
            let mut b = target.beta.clone();
            a[f] -= 1;
            let mut weight = BigInt::one();
            for j in 0..lk {
                let kept = a[j];
                let taken: i64 = lambda.iter().map(|lam| lam[j]).sum();
                if taken == 0 {
                    continue;
                }
                a[j] += taken;
                let mut w = factorial(a[j] as usize) / factorial(kept as usize);
                for lam in &lambda {
                    w /= factorial(lam[j] as usize);
                }
                weight *= w;
                for (l, lam) in lambda.iter().enumerate() {
                    b[j * d + l] -= lam[j];
                }
            }
            if a[lk..].iter().any(|&v| v != 0) || b[lk * d..].iter().any(|&v| v != 0) {
                continue;
            }
            let pred = ExponentPair {
                layout: target.layout,
                order: k + 1,
                alpha: a,
                beta: b,
            };
            let pred = project(&pred, k).expect("projection to a lower order");
            if let Some(c) = prev.get(&pred) {
                acc += c * BigRational::from_integer(weight);
            }
        }
    }
    acc / BigRational::from_integer(BigInt::from(k + 1))
}

/// All `lambda` with `lambda[l]` a composition of `totals[l]` into the slots.
/// `joint` bounds the column sums `sum_l lambda[l][j]`; `per` bounds entries.
fn distributions(totals: &[u32], joint: &[i64], per: Option<&Vec<Vec<i64>>>) -> Vec<Vec<Vec<i64>>> {
    let slots = match per {
        Some(p) => p.first().map_or(0, |r| r.len()),
        None => joint.len(),
    };
    let mut out = Vec::new();
    let mut current: Vec<Vec<i64>> = Vec::with_capacity(totals.len());
    let mut used = vec![0i64; slots];
    fn rec(
        l: usize,
        totals: &[u32],
        joint: &[i64],
        per: Option<&Vec<Vec<i64>>>,
        used: &mut Vec<i64>,
        current: &mut Vec<Vec<i64>>,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) {
        if l == totals.len() {
            out.push(current.clone());
            return;
        }
        let bounds: Vec<i64> = (0..used.len())
            .map(|j| match per {
                Some(p) => p[l][j],
                None => joint[j] - used[j],
            })
            .collect();
        for comp in bounded_compositions(i64::from(totals[l]), &bounds) {
            for (u, c) in used.iter_mut().zip(&comp) {
                *u += c;
            }
            current.push(comp.clone());
            rec(l + 1, totals, joint, per, used, current, out);
            current.pop();
            for (u, c) in used.iter_mut().zip(&comp) {
                *u -= c;
            }
        }
    }
    rec(0, totals, joint, per, &mut used, &mut current, &mut out);
    out
}

/// Compositions of `total` into `bounds.len()` parts with `part_j <= bounds[j]`.
pub fn bounded_compositions(total: i64, bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; bounds.len()];
    fn rec(j: usize, left: i64, bounds: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if j == bounds.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let capacity: i64 = bounds[j..].iter().map(|&b| b.max(0)).sum();
        if capacity < left {
            return;
        }
        for v in 0..=left.min(bounds[j]) {
            cur[j] = v;
            rec(j + 1, left - v, bounds, cur, out);
        }
        cur[j] = 0;
    }
    if bounds.is_empty() {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, total, bounds, &mut cur, &mut out);
    out
}

/// Number of `k`-tuples of nonnegative integers summing to `j`, counted by
/// enumeration. Equals `C(j + k - 1, k - 1)`.
pub fn lambda_sum_cardinality(j: u32, k: u32) -> usize {
    bounded_compositions(i64::from(j), &vec![i64::from(j); k as usize]).len()
}

/// The closed-form count `C(j + k - 1, k - 1)`.
pub fn lambda_sum_binomial(j: u32, k: u32) -> usize {
    binomial_count(j as usize + k as usize - 1, k as usize - 1)
}

/// Exponent pair of a plain-series monomial of time order `order`.
pub fn monomial_to_pair(
    m: &Monomial,
    dim: usize,
    order: u32,
    indexer: &FlatIndexer,
) -> Result<ExponentPair> {
    let layout = Layout::for_dim(dim);
    let mut pair = ExponentPair::zero(layout, order);
    let slots = pair.alpha.len();
    for (atom, p) in m.factors() {
        if atom.family != Family::Sigma {
            return Err(Error::Layout(format!(
                "atom {atom} is not a plain symbol atom"
            )));
        }
        if atom.dim() != dim {
            return Err(Error::Layout(format!(
                "atom {atom} has dimension {}",
                atom.dim()
            )));
        }
        let slot = indexer
            .slot(&atom.deriv)
            .filter(|&s| s < slots)
            .ok_or_else(|| Error::Layout(format!("atom {atom} has no slot at order {order}")))?;
        match atom.direction() {
            None => pair.alpha[slot] += i64::from(*p),
            Some(l) => pair.beta[slot * dim + l] += i64::from(*p),
        }
    }
    Ok(pair)
}

/// A coefficient on which the two routes disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub pair: ExponentPair,
    pub series: BigRational,
    pub recursion: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckReport {
    pub order: u32,
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
    /// Pairs of `d_k` that fail the membership test.
    pub non_members: Vec<ExponentPair>,
}

impl CrossCheckReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.non_members.is_empty()
    }
}

/// Compare the monomial coefficients of `d_k` with the recursion row `k`.
pub fn cross_check(
    d_k: &SymPoly,
    row: &CoefficientRow,
    dim: usize,
    k: u32,
) -> Result<CrossCheckReport> {
    let indexer = FlatIndexer::new(dim, k.saturating_sub(1));
    let mut from_series = CoefficientRow::new();
    for (m, c) in d_k.iter() {
        let pair = monomial_to_pair(m, dim, k, &indexer)?;
        if from_series.insert(pair.clone(), c.clone()).is_some() {
            return Err(Error::Layout(format!("two monomials map to {pair}")));
        }
    }
    let mut keys: BTreeSet<&ExponentPair> = from_series.keys().collect();
    keys.extend(row.keys());
    let mut mismatches = Vec::new();
    let zero = BigRational::zero();
    for key in &keys {
        let s = from_series.get(*key).unwrap_or(&zero);
        let r = row.get(*key).unwrap_or(&zero);
        if s != r {
            mismatches.push(Mismatch {
                pair: (*key).clone(),
                series: s.clone(),
                recursion: r.clone(),
            });
        }
    }
    let non_members = from_series
        .keys()
        .filter(|p| k > 0 && !is_member(p))
        .cloned()
        .collect();
    Ok(CrossCheckReport {
        order: k,
        compared: keys.len(),
        mismatches,
        non_members,
    })
}
