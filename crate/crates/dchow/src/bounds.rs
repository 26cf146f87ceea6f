//! Order and degree bounds for the Chow-form search.
//!
//! The order search needs an upper bound on the order of the ideal
//! presented by a characteristic set `A`. Under an orderly ranking the
//! order is known exactly — the sum of the leaders' derivation orders.
//! Under an arbitrary ranking the Jacobi number of the order matrix
//! (maximum weight of an injective row→column assignment) bounds it from
//! above, and that bound is tight on known families where the older
//! column-maxima bound overshoots by a factor of two.
//!
//! The degree search needs, for each candidate order `h`, an upper bound
//! on the total degree of the Chow form; both published formulas (the
//! orderly-ranking one with per-element exponents and the
//! arbitrary-ranking one with a uniform exponent) are evaluated in exact
//! big-integer arithmetic since they are exponential in `h` and `d`.

use num::BigUint;
use thiserror::Error;

use crate::dpoly::BaseVar;
use crate::reduction::CharSet;

/// Errors from order-matrix construction and assignment search.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("order matrix is ragged: row {row} has {found} entries, expected {expected}")]
    RaggedMatrix { row: usize, found: usize, expected: usize },
    #[error("no feasible assignment: every injective row-to-column matching hits an absent entry")]
    NoFeasibleAssignment,
    #[error("assignment search supports at most {max} rows, got {rows}")]
    TooManyRows { rows: usize, max: usize },
}

/// The matrix of derivation orders `e_ij = ord(A_i, y_j)`, with `None`
/// where `y_j` does not occur in `A_i` (the "minus infinity" entries that
/// an assignment must avoid).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderMatrix {
    entries: Vec<Vec<Option<u32>>>,
    cols: usize,
}

impl OrderMatrix {
    /// Builds a matrix from explicit rows, which must all share one width.
    pub fn new(entries: Vec<Vec<Option<u32>>>) -> Result<Self, BoundsError> {
        let cols = entries.first().map_or(0, Vec::len);
        for (row, r) in entries.iter().enumerate() {
            if r.len() != cols {
                return Err(BoundsError::RaggedMatrix { row, found: r.len(), expected: cols });
            }
        }
        Ok(OrderMatrix { entries, cols })
    }

    /// The |A| × n order matrix of a characteristic set: one row per
    /// element, one column per ambient variable `y1..yn`.
    pub fn from_charset(a: &CharSet) -> Self {
        let cols = a.num_vars() as usize;
        let entries = a
            .elements()
            .iter()
            .map(|f| {
                (1..=a.num_vars())
                    .map(|j| f.order_in(BaseVar::Y { index: j }))
                    .collect()
            })
            .collect();
        OrderMatrix { entries, cols }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> Option<u32> {
        self.entries[row][col]
    }
}

/// The Jacobi number: the maximum of `Σ_i e_{i,σ(i)}` over injective
/// assignments `σ` of every row to a distinct column, where absent entries
/// may not be chosen. For rectangular matrices (fewer rows than columns)
/// the assignment is partial on columns but still covers every row —
/// generic hyperplane rows would contribute order 0 and change nothing.
///
/// Computed by dynamic programming over row subsets (exact maximum-weight
/// bipartite matching); characteristic sets are small, so correctness
/// outranks asymptotics here.
pub fn jacobi_number(e: &OrderMatrix) -> Result<u32, BoundsError> {
    let rows = e.rows();
    let cols = e.cols();
    if rows == 0 {
        return Ok(0);
    }
    if rows > cols {
        return Err(BoundsError::NoFeasibleAssignment);
    }
    if rows > 24 {
        return Err(BoundsError::TooManyRows { rows, max: 24 });
    }
    let full: usize = (1 << rows) - 1;
    // best[mask] = maximum weight assigning exactly the rows in `mask`
    // to distinct columns among those already scanned.
    let mut best: Vec<Option<u64>> = vec![None; full + 1];
    best[0] = Some(0);
    for col in 0..cols {
        let mut next = best.clone();
        for (mask, weight) in best.iter().enumerate() {
            let Some(w) = weight else { continue };
            for row in 0..rows {
                if mask & (1 << row) != 0 {
                    continue;
                }
                let Some(order) = e.entry(row, col) else { continue };
                let cand = w + u64::from(order);
                let slot = &mut next[mask | (1 << row)];
                if slot.is_none_or(|cur| cand > cur) {
                    *slot = Some(cand);
                }
            }
        }
        best = next;
    }
    match best[full] {
        Some(w) => Ok(u32::try_from(w).expect("order sums stay within u32")),
        None => Err(BoundsError::NoFeasibleAssignment),
    }
}

/// The column-maxima bound: take each column's largest order (0 where the
/// column is entirely absent), sort descending, and sum the top |A| of
/// them. Always ≥ the Jacobi number, and strictly larger on known
/// families.
pub fn conjectured_bound(e: &OrderMatrix) -> u32 {
    let mut maxima: Vec<u32> = (0..e.cols())
        .map(|j| (0..e.rows()).filter_map(|i| e.entry(i, j)).max().unwrap_or(0))
        .collect();
    maxima.sort_unstable_by(|a, b| b.cmp(a));
    maxima.iter().take(e.rows()).sum()
}

/// Upper bound on the order of the presented ideal: exact (`ord(A)`) under
/// an orderly ranking, the Jacobi number otherwise. The search itself
/// starts from [`CharSet::ord`] regardless of ranking.
pub fn order_bound(a: &CharSet) -> u32 {
    if a.ranking().is_orderly() {
        a.ord()
    } else {
        jacobi_number(&OrderMatrix::from_charset(a))
            .expect("the leader assignment of a characteristic set is feasible")
    }
}

fn bpow(base: u64, exp: u64) -> BigUint {
    num::pow::pow(BigUint::from(base), usize::try_from(exp).expect("exponent fits usize"))
}

fn element_degrees(a: &CharSet) -> Vec<u64> {
    a.elements()
        .iter()
        .map(|f| u64::from(f.total_degree().expect("chain elements are nonzero")))
        .collect()
}

/// Shared trailing factor `2·Σ(m_i − 1) + 1` of both degree bounds.
fn spread_factor(degrees: &[u64]) -> BigUint {
    BigUint::from(2 * degrees.iter().map(|m| m - 1).sum::<u64>() + 1)
}

/// Degree bound for the Chow form under an orderly ranking, where the
/// order `h = Σ e_i` is known exactly:
///
/// ```text
/// 2^((h+1)(d+1)) · ∏ m_i^(h − e_i + 1) · (2·Σ(m_i − 1) + 1)
/// ```
///
/// with `m_i = deg(A_i)`, `e_i` the leader orders, `d` the dimension.
pub fn degree_bound_orderly(a: &CharSet) -> BigUint {
    let h = u64::from(a.ord());
    let d = u64::from(a.dimension());
    let degrees = element_degrees(a);
    let mut bound = bpow(2, (h + 1) * (d + 1));
    for (m, anat) in degrees.iter().zip(a.anatomies()) {
        bound *= bpow(*m, h - u64::from(anat.leader.order) + 1);
    }
    bound * spread_factor(&degrees)
}

/// Degree bound for the Chow form at a candidate order `h` under an
/// arbitrary ranking:
///
/// ```text
/// ∏ m_i^(h+1) · 2^((h+1)(d+1)) · (2·Σ(m_i − 1) + 1)
/// ```
pub fn degree_bound_at(a: &CharSet, h: u32) -> BigUint {
    let h = u64::from(h);
    let d = u64::from(a.dimension());
    let degrees = element_degrees(a);
    let mut bound = bpow(2, (h + 1) * (d + 1));
    for m in &degrees {
        bound *= bpow(*m, h + 1);
    }
    bound * spread_factor(&degrees)
}
