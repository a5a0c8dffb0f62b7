//! Counting triangle of the univariate series.
//!
//! Row `n` groups the monomials of `d_n` by the number of base-atom factors
//! (their spatial order) and records, for spatial order `n, n-1, ...`, the sum
//! of the weights `n! * c` over the group. The weights are the number of
//! Leibniz-recursion paths producing the monomial, so row sums count every
//! term the recursion generates.

use num_traits::ToPrimitive;

use super::leibniz::LeibnizRecursion;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingTriangle {
    /// `rows[n - 1][i]` is the count at spatial order `n - i`.
    pub rows: Vec<Vec<u128>>,
}

impl CountingTriangle {
    pub fn row(&self, n: usize) -> &[u128] {
        &self.rows[n - 1]
    }

    /// `R_n`.
    pub fn row_sum(&self, n: usize) -> u128 {
        self.row(n).iter().sum()
    }

    /// `R_n / n!`.
    pub fn ratio(&self, n: usize) -> f64 {
        self.row_sum(n) as f64 / factorial_u128(n) as f64
    }
}

pub fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Rows `1..=max_row`.
pub fn counting_triangle(max_row: usize) -> CountingTriangle {
    assert!(max_row >= 1, "at least one row");
    let mut r = LeibnizRecursion::plain(1);
    r.extend_to(max_row);
    let rows = (1..=max_row)
        .map(|n| {
            let mut by_order = vec![0u128; n + 1];
            for (m, c) in r.scaled_term(n).iter() {
                let w = c.to_integer().to_u128().expect("count fits in u128");
                by_order[m.base_count() as usize] += w;
            }
            let lowest = by_order.iter().position(|&v| v > 0).unwrap_or(n);
            by_order[lowest..].iter().rev().copied().collect()
        })
        .collect();
    CountingTriangle { rows }
}

/// `(R_k, k!)`.
pub fn cardinality_bound(k: usize) -> (u128, u128) {
    let t = counting_triangle(k);
    (t.row_sum(k), factorial_u128(k))
}

/// The three-term recursion `Q^n_0 = 1`,
/// `Q^n_k = sum_{l=0}^{k} C(n-1-l, k-l) Q^{n-1}_{k-1-l}`, with entries outside
/// `0 <= k <= n-1` read as zero. Row `n` lists `Q^n_0, Q^n_1, ...` with trailing
/// zeros removed.
pub fn lemma_triangle(max_row: usize) -> Vec<Vec<u128>> {
    let mut rows: Vec<Vec<u128>> = vec![vec![1]];
    for n in 2..=max_row {
        let prev = &rows[n - 2];
        let get = |m: i64| -> u128 {
            if m < 0 {
                0
            } else {
                prev.get(m as usize).copied().unwrap_or(0)
            }
        };
        let mut row = vec![1u128];
        for k in 1..n {
            let mut acc = 0u128;
            for l in 0..=k {
                if n < 1 + l {
                    continue;
                }
                acc += binom(n - 1 - l, k - l) * get(k as i64 - 1 - l as i64);
            }
            row.push(acc);
        }
        while row.len() > 1 && *row.last().unwrap() == 0 {
            row.pop();
        }
        rows.push(row);
    }
    rows
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// An entry where two triangles differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleDiscrepancy {
    pub row: usize,
    pub position: usize,
    pub left: Option<u128>,
    pub right: Option<u128>,
}

/// Entry-wise comparison; rows of different length report the missing side
/// as `None`.
pub fn compare_rows(left: &[Vec<u128>], right: &[Vec<u128>]) -> Vec<TriangleDiscrepancy> {
    let mut out = Vec::new();
    for (i, (a, b)) in left.iter().zip(right).enumerate() {
        for p in 0..a.len().max(b.len()) {
            let (x, y) = (a.get(p).copied(), b.get(p).copied());
            if x != y {
                out.push(TriangleDiscrepancy {
                    row: i + 1,
                    position: p,
                    left: x,
                    right: y,
                });
            }
        }
    }
    out
}
