//! Exact rational linear algebra for the coefficient search.
//!
//! Each search cell reduces to one question: which choices of the ansatz
//! coefficients `c` make the reduced polynomial `F2` vanish identically?
//! Since `F2` is linear homogeneous in `c`, collecting the coefficient of
//! each distinct non-`c` monomial yields a linear system `M·c = 0`, and
//! the answer is the exact nullspace of `M`.
//!
//! The implementation keeps rows sparse and integer: each row is cleared
//! of denominators, stripped to content 1, and sign-normalized. Elimination
//! is fraction-free (cross-multiplication with per-row content stripping),
//! which keeps entries small without ever leaving exact arithmetic. The
//! reduced row echelon form is unique, so the nullspace basis — one vector
//! per free column, in ascending column order — is deterministic
//! regardless of internal evaluation order.

use std::collections::BTreeMap;

use num::{bigint::Sign, BigInt, Integer, One, Zero};
use thiserror::Error;

use crate::dpoly::{AuxName, BaseVar, DerivativeVar, DiffPoly, Monomial, Rat};

/// Errors from system assembly and solution extraction.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    /// A term of the assembled polynomial does not contain exactly one
    /// coefficient variable at degree 1.
    #[error("term {term} is not linear homogeneous in the coefficient variables")]
    NotLinearInCoefficients { term: String },
    /// A coefficient variable occurs that is missing from the declared list.
    #[error("coefficient variable {var} is not in the declared list")]
    UnknownCoefficient { var: DerivativeVar },
    /// canonical_solution on a trivial nullspace.
    #[error("the nullspace is trivial; no nonzero solution exists")]
    EmptyNullspace,
}

/// One sparse integer row: (column, entry) pairs sorted by column,
/// content 1, first entry positive, no zero entries.
type SparseRow = Vec<(usize, BigInt)>;

/// Divide out the content and make the leading entry positive. Empty rows
/// stay empty.
fn normalize_row(row: &mut SparseRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
    }
    if g.is_zero() {
        return;
    }
    if row[0].1.sign() == Sign::Minus {
        g = -g;
    }
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// The sparse combination `a_scale·a + b_scale·b`, normalized.
fn combine(a_scale: &BigInt, a: &[(usize, BigInt)], b_scale: &BigInt, b: &[(usize, BigInt)]) -> SparseRow {
    let mut out: SparseRow = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                i += 1;
                j += 1;
                (*ca, a_scale * va + b_scale * vb)
            }
            (Some((ca, va)), Some((cb, _))) if ca < cb => {
                i += 1;
                (*ca, a_scale * va)
            }
            (Some(_), Some((cb, vb))) => {
                j += 1;
                (*cb, b_scale * vb)
            }
            (Some((ca, va)), None) => {
                i += 1;
                (*ca, a_scale * va)
            }
            (None, Some((cb, vb))) => {
                j += 1;
                (*cb, b_scale * vb)
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    normalize_row(&mut out);
    out
}

/// The linear homogeneous system `M·c = 0` extracted from a polynomial
/// that is linear in the coefficient variables.
///
/// Two row counts coexist: [`LinearSystem::raw_rows`] counts one row per
/// distinct non-`c` monomial (the convention under which published
/// equation counts are stated), while solving uses rows with identical
/// coefficient vectors merged — the row space, hence the nullspace, is
/// unchanged by the merge.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    rows: Vec<SparseRow>,
    raw_rows: usize,
    cols: usize,
}

impl LinearSystem {
    /// Builds a system from dense rational rows (testing and oracles).
    pub fn from_dense(rows: Vec<Vec<Rat>>, cols: usize) -> Self {
        let mut sparse = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        let raw_rows = rows.len();
        for row in &rows {
            debug_assert_eq!(row.len(), cols);
            let entries: Vec<(usize, Rat)> = row
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (c, v.clone()))
                .collect();
            let r = integerize(&entries);
            if !r.is_empty() && seen.insert(r.clone()) {
                sparse.push(r);
            }
        }
        LinearSystem { rows: sparse, raw_rows, cols }
    }

    /// Rows kept for solving (identical rows merged, zero rows dropped).
    pub fn solve_rows(&self) -> usize {
        self.rows.len()
    }

    /// One row per distinct non-`c` monomial, duplicates and all — the
    /// count comparable with published equation tallies.
    pub fn raw_rows(&self) -> usize {
        self.raw_rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Exact dot product of a solving row with a candidate vector.
    fn apply(&self, row: &SparseRow, x: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (c, v) in row {
            acc += Rat::from(v.clone()) * &x[*c];
        }
        acc
    }

    /// Whether `M·x = 0` exactly.
    pub fn annihilates(&self, x: &[Rat]) -> bool {
        self.rows.iter().all(|r| self.apply(r, x).is_zero())
    }
}

/// Clears denominators and normalizes one row of rationals.
fn integerize(entries: &[(usize, Rat)]) -> SparseRow {
    let mut lcm = BigInt::one();
    for (_, v) in entries {
        lcm = lcm.lcm(v.denom());
    }
    let mut row: SparseRow = entries
        .iter()
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    normalize_row(&mut row);
    row
}

/// Groups a polynomial by its non-coefficient monomials: one equation per
/// distinct monomial, rows emitted in canonical monomial order.
///
/// Every term must contain exactly one coefficient variable, at degree 1,
/// drawn from `c_vars`; anything else is a defect in the caller's ansatz.
pub fn assemble(f2: &DiffPoly, c_vars: &[DerivativeVar]) -> Result<LinearSystem, LinalgError> {
    let col_of: BTreeMap<DerivativeVar, usize> =
        c_vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut groups: BTreeMap<Monomial, Vec<(usize, Rat)>> = BTreeMap::new();
    for (mono, coeff) in f2.terms() {
        let mut c_var: Option<(DerivativeVar, u32)> = None;
        let mut rest: Vec<(DerivativeVar, u32)> = Vec::new();
        for (v, e) in mono.factors() {
            if matches!(v.base, BaseVar::Aux(AuxName::Coeff(_))) {
                if c_var.is_some() {
                    return Err(LinalgError::NotLinearInCoefficients {
                        term: DiffPoly::term(coeff.clone(), mono.clone()).to_string(),
                    });
                }
                c_var = Some((*v, *e));
            } else {
                rest.push((*v, *e));
            }
        }
        let Some((v, 1)) = c_var else {
            return Err(LinalgError::NotLinearInCoefficients {
                term: DiffPoly::term(coeff.clone(), mono.clone()).to_string(),
            });
        };
        let Some(&col) = col_of.get(&v) else {
            return Err(LinalgError::UnknownCoefficient { var: v });
        };
        groups
            .entry(Monomial::from_powers(rest))
            .or_default()
            .push((col, coeff.clone()));
    }
    let raw_rows = groups.len();
    let mut rows = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (_, mut entries) in groups {
        entries.sort_by_key(|(c, _)| *c);
        let row = integerize(&entries);
        if !row.is_empty() && seen.insert(row.clone()) {
            rows.push(row);
        }
    }
    Ok(LinearSystem { rows, raw_rows, cols: c_vars.len() })
}

/// An exact basis of the nullspace `{x : M·x = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullspaceBasis {
    vectors: Vec<Vec<Rat>>,
    cols: usize,
}

impl NullspaceBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Rat>] {
        &self.vectors
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// Exact nullspace via fraction-free elimination to the (unique) reduced
/// row echelon form; pivots are chosen as the first nonzero entry in
/// canonical column order, and the basis carries one vector per free
/// column, free columns ascending.
pub fn nullspace(s: &LinearSystem) -> NullspaceBasis {
    // Forward pass: fold every row into a sparse echelon set indexed by
    // pivot column.
    let mut echelon: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for row in &s.rows {
        let mut r = row.clone();
        while !r.is_empty() {
            let lead = r[0].0;
            match echelon.get(&lead) {
                None => {
                    echelon.insert(lead, r);
                    break;
                }
                Some(p) => {
                    let r_lead = r[0].1.clone();
                    let p_lead = p[0].1.clone();
                    r = combine(&p_lead, &r[1..], &-r_lead, &p[1..]);
                }
            }
        }
    }
    // Backward pass: clear every pivot column from the rows above it,
    // producing the unique RREF (up to the fixed integer normalization).
    let pivots: Vec<usize> = echelon.keys().copied().collect();
    for (idx, &pc) in pivots.iter().enumerate().rev() {
        let prow = echelon[&pc].clone();
        for &qc in &pivots[..idx] {
            let qrow = echelon.get_mut(&qc).expect("pivot row exists");
            if let Ok(pos) = qrow.binary_search_by_key(&pc, |(c, _)| *c) {
                let q_at = qrow[pos].1.clone();
                let p_lead = prow[0].1.clone();
                *qrow = combine(&p_lead, qrow, &-q_at, &prow);
            }
        }
    }
    // Basis extraction: one vector per free column.
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; s.cols];
        for &p in &pivots {
            v[p] = true;
        }
        v
    };
    let mut vectors = Vec::new();
    for free in (0..s.cols).filter(|c| !is_pivot[*c]) {
        let mut x = vec![Rat::zero(); s.cols];
        x[free] = Rat::one();
        for (&pc, prow) in &echelon {
            if let Ok(pos) = prow.binary_search_by_key(&free, |(c, _)| *c) {
                x[pc] = -Rat::from(prow[pos].1.clone()) / Rat::from(prow[0].1.clone());
            }
        }
        vectors.push(x);
    }
    NullspaceBasis { vectors, cols: s.cols }
}

/// A deterministic representative of a nontrivial nullspace: the first
/// basis vector, rescaled to integer entries with content 1 and a
/// positive first nonzero entry.
pub fn canonical_solution(b: &NullspaceBasis) -> Result<Vec<Rat>, LinalgError> {
    let first = b.vectors.first().ok_or(LinalgError::EmptyNullspace)?;
    let entries: Vec<(usize, Rat)> = first
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (c, v.clone()))
        .collect();
    let row = integerize(&entries);
    let mut out = vec![Rat::zero(); b.cols];
    for (c, v) in row {
        out[c] = Rat::from(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpoly::{rat, DerivativeVar, DiffPoly};
    use crate::ranking::Ranking;
    use crate::reduction::{diff_rem_only, CharSet};
    use itertools::Itertools;

    fn y(i: u32, k: u32) -> DiffPoly {
        DiffPoly::var(DerivativeVar::y(i, k))
    }

    fn u(i: u32, j: u32, k: u32) -> DiffPoly {
        DiffPoly::var(DerivativeVar::u(i, j, k))
    }

    fn c(k: u32) -> DiffPoly {
        DiffPoly::var(DerivativeVar::coeff(k))
    }

    fn n(v: i64) -> DiffPoly {
        DiffPoly::int(v)
    }

    fn dense(rows: &[&[i64]], cols: usize) -> LinearSystem {
        LinearSystem::from_dense(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
            cols,
        )
    }

    /// Assembles the worked linear-ODE cell at a given ansatz degree and
    /// returns (system, coefficient list): ansatz over u0^[1], hyperplane
    /// substitution u00 ↦ −u01·y1 (derivation-closed), reduction by
    /// {y1' − 4y1}.
    fn worked_cell(t: usize) -> (LinearSystem, Vec<DerivativeVar>) {
        let v = [
            DerivativeVar::u(0, 0, 0),
            DerivativeVar::u(0, 1, 0),
            DerivativeVar::u(0, 0, 1),
            DerivativeVar::u(0, 1, 1),
        ];
        let mut f0 = DiffPoly::zero();
        let mut c_vars = Vec::new();
        for (k, combo) in v.iter().combinations_with_replacement(t).enumerate() {
            let c_var = DerivativeVar::coeff(k as u32 + 1);
            c_vars.push(c_var);
            let mut term = DiffPoly::var(c_var);
            for var in combo {
                term = &term * &DiffPoly::var(*var);
            }
            f0 += &term;
        }
        let minus_u01_y = (&u(0, 1, 0) * &y(1, 0)).neg();
        let subs: std::collections::BTreeMap<_, _> = [
            (DerivativeVar::u(0, 0, 0), minus_u01_y.clone()),
            (DerivativeVar::u(0, 0, 1), minus_u01_y.derive()),
        ]
        .into();
        let f1 = f0.substitute(&subs);
        let a = CharSet::new(
            vec![&y(1, 1) - &(&n(4) * &y(1, 0))],
            Ranking::default_orderly(1),
            1,
        )
        .unwrap();
        let f2 = diff_rem_only(&f1, &a);
        (assemble(&f2, &c_vars).unwrap(), c_vars)
    }

    #[test]
    fn worked_cell_degree_one_has_no_solution() {
        let (system, c_vars) = worked_cell(1);
        assert_eq!(c_vars.len(), 4);
        assert_eq!(system.cols(), 4);
        assert_eq!(system.raw_rows(), 4);
        let basis = nullspace(&system);
        assert_eq!(basis.dimension(), 0);
        assert_eq!(
            canonical_solution(&basis),
            Err(LinalgError::EmptyNullspace)
        );
    }

    #[test]
    fn worked_cell_degree_two_yields_the_known_vector() {
        let (system, c_vars) = worked_cell(2);
        assert_eq!(c_vars.len(), 10);
        let basis = nullspace(&system);
        assert_eq!(basis.dimension(), 1);
        let sol = canonical_solution(&basis).unwrap();
        let expected: Vec<Rat> = [0, 4, 0, 1, 0, -1, 0, 0, 0, 0].iter().map(|&v| rat(v)).collect();
        assert_eq!(sol, expected);
        assert!(system.annihilates(&sol));
    }

    #[test]
    fn assemble_groups_by_distinct_monomials() {
        // F2 = c1·(u00 + 2·u01) + 3·c2·u01 has monomials u00 and u01.
        let f2 = &(&c(1) * &(&u(0, 0, 0) + &(&n(2) * &u(0, 1, 0))))
            + &(&(&n(3) * &c(2)) * &u(0, 1, 0));
        let s = assemble(&f2, &[DerivativeVar::coeff(1), DerivativeVar::coeff(2)]).unwrap();
        assert_eq!(s.raw_rows(), 2);
        assert_eq!(s.cols(), 2);
        let basis = nullspace(&s);
        assert_eq!(basis.dimension(), 0);
    }

    #[test]
    fn assemble_rejects_nonlinear_terms() {
        let quadratic = &(&c(1) * &c(1)) * &u(0, 0, 0);
        assert!(matches!(
            assemble(&quadratic, &[DerivativeVar::coeff(1)]),
            Err(LinalgError::NotLinearInCoefficients { .. })
        ));
        let mixed = &(&c(1) * &c(2)) * &u(0, 0, 0);
        assert!(matches!(
            assemble(&mixed, &[DerivativeVar::coeff(1), DerivativeVar::coeff(2)]),
            Err(LinalgError::NotLinearInCoefficients { .. })
        ));
        let bare = u(0, 0, 0);
        assert!(matches!(
            assemble(&bare, &[DerivativeVar::coeff(1)]),
            Err(LinalgError::NotLinearInCoefficients { .. })
        ));
        let unknown = &c(7) * &u(0, 0, 0);
        assert!(matches!(
            assemble(&unknown, &[DerivativeVar::coeff(1)]),
            Err(LinalgError::UnknownCoefficient { .. })
        ));
    }

    #[test]
    fn empty_polynomial_gives_the_full_nullspace() {
        let s = assemble(&DiffPoly::zero(), &[DerivativeVar::coeff(1), DerivativeVar::coeff(2)])
            .unwrap();
        assert_eq!(s.raw_rows(), 0);
        let basis = nullspace(&s);
        assert_eq!(basis.dimension(), 2);
        assert_eq!(canonical_solution(&basis).unwrap(), vec![rat(1), rat(0)]);
    }

    #[test]
    fn identity_matrix_has_trivial_nullspace() {
        let s = dense(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], 3);
        assert_eq!(nullspace(&s).dimension(), 0);
    }

    #[test]
    fn rank_deficient_matrix_solves_exactly() {
        // x + y + z = 0, 2x + 2y + 2z = 0, x − y = 0
        let s = dense(&[&[1, 1, 1], &[2, 2, 2], &[1, -1, 0]], 3);
        assert_eq!(s.solve_rows(), 2); // proportional rows normalize equal
        let basis = nullspace(&s);
        assert_eq!(basis.dimension(), 1);
        let sol = canonical_solution(&basis).unwrap();
        assert_eq!(sol, vec![rat(1), rat(1), rat(-2)]);
        assert!(s.annihilates(&sol));
    }

    #[test]
    fn canonical_solution_normalizes_content_and_sign() {
        let s = dense(&[&[2, -1]], 2);
        let basis = nullspace(&s);
        let sol = canonical_solution(&basis).unwrap();
        assert_eq!(sol, vec![rat(1), rat(2)]);

        let s = dense(&[&[-4, -2]], 2);
        assert_eq!(
            canonical_solution(&nullspace(&s)).unwrap(),
            vec![rat(1), rat(-2)]
        );
    }

    #[test]
    fn fractional_rows_are_cleared_exactly() {
        let rows = vec![vec![
            Rat::new(1.into(), 2.into()),
            Rat::new(1.into(), 3.into()),
        ]];
        let s = LinearSystem::from_dense(rows, 2);
        let basis = nullspace(&s);
        assert_eq!(basis.dimension(), 1);
        let sol = canonical_solution(&basis).unwrap();
        assert_eq!(sol, vec![rat(2), rat(-3)]);
    }

    #[test]
    fn rank_plus_nullity_equals_columns() {
        let s = dense(
            &[
                &[1, 2, 3, 4],
                &[2, 4, 6, 8],
                &[0, 1, 1, 0],
                &[1, 3, 4, 4],
            ],
            4,
        );
        let basis = nullspace(&s);
        // rank 2 (rows 2 and 4 are combinations), so nullity 2.
        assert_eq!(basis.dimension(), 2);
        for v in basis.vectors() {
            assert!(s.annihilates(v));
        }
    }

    #[test]
    fn nullspace_is_deterministic() {
        let s = dense(&[&[3, 1, 0], &[0, 2, 5]], 3);
        let a = nullspace(&s);
        let b = nullspace(&s);
        assert_eq!(a, b);
        assert_eq!(canonical_solution(&a), canonical_solution(&b));
    }
}
