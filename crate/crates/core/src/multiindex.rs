//! Multi-indices, their enumeration, and the exponent pairs `(alpha, beta)`
//! that index series coefficients.
//!
//! Multi-indices of equal order are enumerated in graded reverse-lexicographic
//! order, largest first: for `d = 2, k = 2` the list is `(2,0), (1,1), (0,2)`.
//! Exponent tuples are positional, so this order is part of the file formats
//! produced by the CLI and must never change.
//!
//! Exponent pairs use one flattened layout for every dimension: slot `j` of an
//! order-`k` tuple is the `j`-th multi-index in the concatenation of the
//! enumerations of orders `0, 1, ..., k - 1`. For `d = 1` this is the plain
//! derivative order.

use std::cmp::Ordering;
use std::fmt;

use num_integer::binomial;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A `d`-tuple of nonnegative integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(SmallVec<[u32; 4]>);

impl MultiIndex {
    pub fn new(entries: impl IntoIterator<Item = u32>) -> Self {
        MultiIndex(entries.into_iter().collect())
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, dim))
    }

    /// Unit index `e_l` (0-based `l`).
    pub fn unit(dim: usize, l: usize) -> Self {
        let mut m = Self::zero(dim);
        m.0[l] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|eps| = sum of entries`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, l: usize) -> u32 {
        self.0[l]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `eps!` as a float.
    pub fn factorial_f64(&self) -> f64 {
        self.0
            .iter()
            .map(|&e| (1..=e).map(f64::from).product::<f64>())
            .product()
    }

    /// `self + e_l`.
    pub fn raised(&self, l: usize) -> Self {
        let mut m = self.clone();
        m.0[l] += 1;
        m
    }

    /// `self - e_l`, or `None` when entry `l` is zero.
    pub fn lowered(&self, l: usize) -> Option<Self> {
        if self.0[l] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.0[l] -= 1;
        Some(m)
    }

    /// Position of the first nonzero entry.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }
}

impl Ord for MultiIndex {
    /// Graded, then reverse-lexicographic within a degree; an index sorts
    /// earlier when its trailing coordinates are smaller.
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
            .then_with(|| self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of one dimension and one order, in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub dim: usize,
    pub order: u32,
    pub indices: Vec<MultiIndex>,
}

impl Enumeration {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `N_k = C(k + d - 1, d - 1)`.
pub fn count_of_order(dim: usize, order: u32) -> usize {
    assert!(dim >= 1, "dimension must be positive");
    binomial(order as usize + dim - 1, dim - 1)
}

/// `C(n, k)` as a machine integer.
pub fn binomial_count(n: usize, k: usize) -> usize {
    if k > n {
        0
    } else {
        binomial(n, k)
    }
}

/// Number of multi-indices with `|eps| < order`, i.e. `C(order - 1 + d, d)`.
pub fn count_below_order(dim: usize, order: u32) -> usize {
    if order == 0 {
        0
    } else {
        binomial(order as usize - 1 + dim, dim)
    }
}

/// Every multi-index of dimension `dim` and order exactly `order`, sorted.
pub fn enumerate(dim: usize, order: u32) -> Enumeration {
    assert!(dim >= 1, "dimension must be positive");
    let mut indices = Vec::with_capacity(count_of_order(dim, order));
    let mut current = vec![0u32; dim];
    fill(&mut current, 0, order, &mut indices);
    indices.sort();
    Enumeration {
        dim,
        order,
        indices,
    }
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.iter().copied()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

/// Every multi-index with `|eps| <= max_order`, graded.
pub fn enumerate_up_to(dim: usize, max_order: u32) -> Vec<MultiIndex> {
    (0..=max_order)
        .flat_map(|k| enumerate(dim, k).indices)
        .collect()
}

/// Bidirectional map between multi-indices and their flattened slot.
#[derive(Debug, Clone)]
pub struct FlatIndexer {
    dim: usize,
    max_order: u32,
    list: Vec<MultiIndex>,
    slots: FxHashMap<MultiIndex, usize>,
}

impl FlatIndexer {
    /// Covers every multi-index with `|eps| <= max_order`.
    pub fn new(dim: usize, max_order: u32) -> Self {
        let list = enumerate_up_to(dim, max_order);
        let slots = list
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        FlatIndexer {
            dim,
            max_order,
            list,
            slots,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn slot(&self, eps: &MultiIndex) -> Option<usize> {
        self.slots.get(eps).copied()
    }

    pub fn index(&self, slot: usize) -> &MultiIndex {
        &self.list[slot]
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

/// Tuple layout of an [`ExponentPair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// `alpha^k`, `beta^k` indexed by derivative order `0..k`.
    Univariate,
    /// `alpha^{N_k}` indexed by flattened multi-index, `beta^k_d` by
    /// (flattened multi-index, direction).
    Multivariate(usize),
}

impl Layout {
    pub fn for_dim(dim: usize) -> Self {
        if dim == 1 {
            Layout::Univariate
        } else {
            Layout::Multivariate(dim)
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Layout::Univariate => 1,
            Layout::Multivariate(d) => d,
        }
    }

    /// Length of the alpha tuple for series order `k`.
    pub fn alpha_len(self, k: u32) -> usize {
        count_below_order(self.dim(), k)
    }
}

/// Which entry of an exponent pair to address.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Alpha(usize),
    /// Flattened multi-index slot and 0-based direction.
    Beta(usize, usize),
}

/// The index `(alpha, beta)` of one series coefficient. Entries may go
/// negative transiently; such pairs are never members.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentPair {
    pub layout: Layout,
    pub order: u32,
    pub alpha: Vec<i64>,
    /// Flattened as `beta[j * d + l]`.
    pub beta: Vec<i64>,
}

impl PartialOrd for Layout {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Layout {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim().cmp(&other.dim())
    }
}

impl ExponentPair {
    pub fn zero(layout: Layout, order: u32) -> Self {
        let n = layout.alpha_len(order);
        ExponentPair {
            layout,
            order,
            alpha: vec![0; n],
            beta: vec![0; n * layout.dim()],
        }
    }

    /// Univariate pair from explicit tuples; the order is the tuple length.
    pub fn univariate(alpha: &[i64], beta: &[i64]) -> Self {
        assert_eq!(alpha.len(), beta.len(), "alpha and beta lengths differ");
        ExponentPair {
            layout: Layout::Univariate,
            order: alpha.len() as u32,
            alpha: alpha.to_vec(),
            beta: beta.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn beta_at(&self, j: usize, l: usize) -> i64 {
        self.beta[j * self.dim() + l]
    }

    pub fn get(&self, slot: Slot) -> i64 {
        match slot {
            Slot::Alpha(j) => self.alpha[j],
            Slot::Beta(j, l) => self.beta_at(j, l),
        }
    }

    pub fn has_negative(&self) -> bool {
        self.alpha.iter().chain(self.beta.iter()).any(|&e| e < 0)
    }

    pub fn total(&self) -> i64 {
        self.alpha.iter().sum::<i64>() + self.beta.iter().sum::<i64>()
    }

    /// Beta entries of the pair as `d`-tuples, one per alpha slot.
    pub fn beta_tuples(&self) -> Vec<Vec<i64>> {
        self.beta.chunks(self.dim()).map(|c| c.to_vec()).collect()
    }
}

/// Truncate both tuples to series order `target`.
pub fn project(pair: &ExponentPair, target: u32) -> Result<ExponentPair> {
    if target > pair.order {
        return Err(Error::Contract(format!(
            "cannot project an order-{} pair to order {target}",
            pair.order
        )));
    }
    let n = pair.layout.alpha_len(target);
    Ok(ExponentPair {
        layout: pair.layout,
        order: target,
        alpha: pair.alpha[..n].to_vec(),
        beta: pair.beta[..n * pair.dim()].to_vec(),
    })
}

/// Add `delta` to one entry. Negative results are kept.
pub fn shift(pair: &ExponentPair, slot: Slot, delta: i64) -> Result<ExponentPair> {
    let mut out = pair.clone();
    match slot {
        Slot::Alpha(j) if j < out.alpha.len() => out.alpha[j] += delta,
        Slot::Beta(j, l) if l < out.dim() && j * out.dim() + l < out.beta.len() => {
            let d = out.dim();
            out.beta[j * d + l] += delta;
        }
        _ => {
            return Err(Error::Contract(format!(
                "slot {slot:?} out of range for an order-{} pair",
                pair.order
            )))
        }
    }
    Ok(out)
}

/// Membership in `M_k`: nonnegative entries, total `k`, the slope exponents
/// dominate the exponents of derivative-bearing base atoms, and for `k >= 1`
/// at least one base atom is present (so `((0),(1))` is not in `M_1`).
pub fn is_member(pair: &ExponentPair) -> bool {
    if pair.has_negative() || pair.total() != i64::from(pair.order) {
        return false;
    }
    let slope: i64 = pair.beta.iter().sum();
    let base: i64 = pair.alpha.iter().sum();
    let derived = base - pair.alpha.first().copied().unwrap_or(0);
    slope >= derived && (pair.order == 0 || base >= 1)
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", tuple_string(&self.alpha), self.beta_string())
    }
}

impl ExponentPair {
    pub fn alpha_string(&self) -> String {
        tuple_string(&self.alpha)
    }

    pub fn beta_string(&self) -> String {
        if self.dim() == 1 {
            tuple_string(&self.beta)
        } else {
            let inner: Vec<String> = self.beta_tuples().iter().map(|t| tuple_string(t)).collect();
            format!("({})", inner.join(","))
        }
    }
}

fn tuple_string(t: &[i64]) -> String {
    let parts: Vec<String> = t.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(","))
}
