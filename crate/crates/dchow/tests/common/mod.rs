//! Shared fixtures for the integration suites: constructors for the
//! running examples, independent oracles (Cramer elimination for
//! codimension-one ideals, textbook RREF nullspace, permutation brute
//! force for the Jacobi number), pinned random generators, and the
//! property suites themselves (shared between the property tests and the
//! acceptance gate).
#![allow(dead_code)] // each test binary uses its own subset

use num::{BigInt, One, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use dchow::bounds::{jacobi_number, BoundsError, OrderMatrix};
use dchow::dpoly::{BaseVar, DerivativeVar, DiffPoly, Monomial, Rat};
use dchow::frontend::{format_diffpoly, parse_diffpoly, parse_uform, FormatStyle};
use dchow::linalg::{nullspace, LinearSystem};
use dchow::ranking::{is_reduced, Ranking};
use dchow::reduction::{algebraic_prem, diff_rem, CharSet};

pub fn u(i: u32, j: u32, k: u32) -> DiffPoly {
    DiffPoly::var(DerivativeVar::u(i, j, k))
}

pub fn y(i: u32, k: u32) -> DiffPoly {
    DiffPoly::var(DerivativeVar::y(i, k))
}

pub fn int(v: i64) -> DiffPoly {
    DiffPoly::int(v)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------
// The running examples.

/// `{y1' − 4y1}` under the orderly ranking.
pub fn linear_ode() -> CharSet {
    CharSet::new(vec![&y(1, 1) - &(&int(4) * &y(1, 0))], Ranking::default_orderly(1), 1).unwrap()
}

/// Its published Chow form `4·u00·u01 + u00·u01' − u01·u00'`.
pub fn linear_ode_chow() -> DiffPoly {
    parse_uform("4*u0_0*u0_1 + u0_0*u0_1' - u0_1*u0_0'").unwrap()
}

/// `{y2 − y1'}` under the elimination ranking `y1 < y2`.
pub fn derivative_graph() -> CharSet {
    CharSet::new(vec![&y(2, 0) - &y(1, 1)], Ranking::elimination(vec![1, 2]).unwrap(), 2).unwrap()
}

/// Its published 16-term Chow form (two typographical corrections:
/// `c02·u02` read as `c02·u01`, `u01 2` read as `u01²`).
pub fn derivative_graph_chow() -> DiffPoly {
    parse_uform(concat!(
        "u0_0*u0_1*u1_1*u1_2 - u0_0*u0_2*u1_1^2 - u0_0*u0_2*u1_1*u1_2' + u0_0*u0_2*u1_2*u1_1'",
        " + u0_0*u1_1*u1_2*u0_2' - u0_0*u1_2^2*u0_1' - u0_1^2*u1_0*u1_2 + u0_1*u0_2*u1_0*u1_1",
        " + u0_1*u0_2*u1_0*u1_2' - u0_1*u0_2*u1_2*u1_0' - u0_1*u1_0*u1_2*u0_2' + u0_1*u1_2^2*u0_0'",
        " - u0_2^2*u1_0*u1_1' + u0_2^2*u1_1*u1_0' + u0_2*u1_0*u1_2*u0_1' - u0_2*u1_1*u1_2*u0_0'",
    ))
    .unwrap()
}

/// `{(y1')²·y2'' − y1}` under the elimination ranking `y2 < y1`.
pub fn steep_system() -> CharSet {
    let a = &(&(&y(1, 1) * &y(1, 1)) * &y(2, 2)) - &y(1, 0);
    CharSet::new(vec![a], Ranking::elimination(vec![2, 1]).unwrap(), 2).unwrap()
}

/// The order-gap system `{y2·y3 + 1, y1^(k)·y2^(k) + y3}` whose Jacobi
/// number is `k` while the conjectured bound is `2k`.
pub fn order_gap_system(k: u32) -> CharSet {
    let first = &(&y(2, 0) * &y(3, 0)) + &int(1);
    let second = &(&y(1, k) * &y(2, k)) + &y(3, 0);
    CharSet::new_weak(vec![first, second], Ranking::elimination(vec![3, 2, 1]).unwrap(), 3)
        .unwrap()
}

// ---------------------------------------------------------------------
// Cramer oracle: codimension-one ideals only (|A| = 1, d = n − 1).
//
// The n generic hyperplanes determine the generic point by Cramer's
// rule: y_j = det(M_j)/det(M) with M the coefficient matrix and M_j the
// column-j replacement by −(u_{00},…,u_{d0}). Substituting the point's
// jets into the single chain element and clearing denominators yields
// the Chow form up to content — independently of the search pipeline.

fn poly_det(m: &[Vec<DiffPoly>]) -> DiffPoly {
    match m.len() {
        0 => DiffPoly::one(),
        1 => m[0][0].clone(),
        size => {
            let mut acc = DiffPoly::zero();
            for (col, entry) in m[0].iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<DiffPoly>> = (1..size)
                    .map(|r| {
                        (0..size).filter(|&c| c != col).map(|c| m[r][c].clone()).collect()
                    })
                    .collect();
                let cof = &poly_det(&minor) * entry;
                if col % 2 == 0 {
                    acc += &cof;
                } else {
                    acc -= &cof;
                }
            }
            acc
        }
    }
}

/// The Chow form of `sat(A)` for a single-element chain over `n`
/// variables, by Cramer elimination. `None` when the shape is not
/// codimension one.
pub fn cramer_chow_oracle(a: &CharSet) -> Option<DiffPoly> {
    if a.len() != 1 {
        return None;
    }
    let n = a.num_vars();
    let element = a.element(0);
    let matrix: Vec<Vec<DiffPoly>> = (0..n)
        .map(|i| (1..=n).map(|j| u(i, j, 0)).collect())
        .collect();
    let w = poly_det(&matrix);
    let numerators: Vec<DiffPoly> = (0..n as usize)
        .map(|j| {
            let mut replaced = matrix.clone();
            for (i, row) in replaced.iter_mut().enumerate() {
                row[j] = u(i as u32, 0, 0).neg();
            }
            poly_det(&replaced)
        })
        .collect();
    // Jet numerators over w^(k+1): N_{k+1} = N_k'·w − (k+1)·N_k·w'.
    let w_prime = w.derive();
    let mut jets: Vec<Vec<DiffPoly>> = numerators.iter().map(|p| vec![p.clone()]).collect();
    let max_order = element.vars().iter().map(|v| v.order).max().unwrap_or(0);
    for table in &mut jets {
        for k in 0..max_order {
            let last = &table[k as usize];
            let next = &(&last.derive() * &w) - &(&(&int(i64::from(k) + 1) * &w_prime) * last);
            table.push(next);
        }
    }
    let den_exp = |m: &Monomial| -> u32 {
        m.factors()
            .iter()
            .filter_map(|&(v, e)| v.base.is_y().then_some((v.order + 1) * e))
            .sum()
    };
    let k_max = element.terms().map(|(m, _)| den_exp(m)).max().unwrap_or(0);
    let mut cleared = DiffPoly::zero();
    for (m, c) in element.terms() {
        let mut factor = DiffPoly::constant(c.clone());
        for &(v, e) in m.factors() {
            match v.base {
                BaseVar::Y { index } => {
                    factor = &factor * &jets[(index - 1) as usize][v.order as usize].pow(e);
                }
                _ => factor = &factor * &DiffPoly::var(v).pow(e),
            }
        }
        let deficit = k_max - den_exp(m);
        if deficit > 0 {
            factor = &factor * &w.pow(deficit);
        }
        cleared += &factor;
    }
    Some(cleared.content_normalized())
}

// ---------------------------------------------------------------------
// Textbook RREF oracle for rank and nullspace dimension.

/// Row-reduces a copy of `m` and returns its rank. Plain Gauss–Jordan
/// over exact rationals, no pivoting subtleties — deliberately naive.
pub fn rref_rank(m: &[Vec<Rat>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, pivot);
        let inv = a[rank][col].clone();
        for x in &mut a[rank] {
            *x = &*x / &inv;
        }
        for r in 0..rows {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..cols {
                    let delta = &f * &a[rank][c];
                    a[r][c] = &a[r][c] - &delta;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

// ---------------------------------------------------------------------
// Permutation brute force for the Jacobi number.

/// Maximum of `Σ m[i][σ(i)]` over injective column assignments, or
/// `None` when every assignment hits an absent entry. Exponential —
/// callers keep the matrices at 6×6 or smaller.
pub fn jacobi_brute_force(m: &[Vec<Option<u32>>]) -> Option<u32> {
    let rows = m.len();
    let cols = m[0].len();
    let mut best: Option<u32> = None;
    let mut chosen = vec![false; cols];
    fn recurse(
        m: &[Vec<Option<u32>>],
        row: usize,
        sum: u32,
        chosen: &mut [bool],
        best: &mut Option<u32>,
    ) {
        if row == m.len() {
            *best = Some(best.map_or(sum, |b| b.max(sum)));
            return;
        }
        for col in 0..chosen.len() {
            if !chosen[col] {
                if let Some(v) = m[row][col] {
                    chosen[col] = true;
                    recurse(m, row + 1, sum + v, chosen, best);
                    chosen[col] = false;
                }
            }
        }
    }
    recurse(m, 0, 0, &mut chosen, &mut best);
    let _ = rows;
    best
}

// ---------------------------------------------------------------------
// Pinned random generators.

/// Random polynomial in the jets `y_i^{(k)}`, `i ≤ n`, `k ≤ max_order`,
/// with up to `max_terms` monomials of total degree ≤ `max_degree` and
/// small rational coefficients. Never returns zero.
pub fn random_ypoly(
    rng: &mut ChaCha8Rng,
    n: u32,
    max_order: u32,
    max_degree: u32,
    max_terms: usize,
) -> DiffPoly {
    loop {
        let mut f = DiffPoly::zero();
        for _ in 0..rng.gen_range(1..=max_terms) {
            let mut term = int(rng.gen_range(-4i64..=4));
            if rng.gen_bool(0.25) {
                term = &term * &DiffPoly::constant(Rat::new(BigInt::one(), BigInt::from(rng.gen_range(2i64..=3))));
            }
            for _ in 0..rng.gen_range(0..=max_degree) {
                let v = DerivativeVar::y(rng.gen_range(1..=n), rng.gen_range(0..=max_order));
                term = &term * &DiffPoly::var(v);
            }
            f += &term;
        }
        if !f.is_zero() {
            return f;
        }
    }
}

/// Random polynomial in the hyperplane coefficients `u{i}_{j}^{(k)}`.
pub fn random_upoly(
    rng: &mut ChaCha8Rng,
    blocks: u32,
    coords: u32,
    max_order: u32,
    max_degree: u32,
    max_terms: usize,
) -> DiffPoly {
    loop {
        let mut f = DiffPoly::zero();
        for _ in 0..rng.gen_range(1..=max_terms) {
            let mut term = int(rng.gen_range(-4i64..=4));
            for _ in 0..rng.gen_range(0..=max_degree) {
                let v = DerivativeVar::u(
                    rng.gen_range(0..blocks),
                    rng.gen_range(0..=coords),
                    rng.gen_range(0..=max_order),
                );
                term = &term * &DiffPoly::var(v);
            }
            f += &term;
        }
        if !f.is_zero() {
            return f;
        }
    }
}

/// Random solved-form chain over `n` variables: element `i` is
/// `y_i^{(o_i)} + tail`, `o_i ≤ max_order`, monic and linear in its
/// leader, with the tail a small polynomial of degree ≤ `max_tail_degree`
/// in strictly lower-ranked jets. Such a chain is automatically
/// auto-reduced with unit initials and separants, and it presents a prime
/// ideal (the leader solves rationally in the lower jets), which the
/// search algorithms require of their inputs.
pub fn random_monic_chain(
    rng: &mut ChaCha8Rng,
    n: u32,
    max_order: u32,
    max_tail_degree: u32,
) -> CharSet {
    let orders: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_order)).collect();
    let mut elements = Vec::new();
    for i in 1..=n {
        let o = orders[(i - 1) as usize];
        // Allowed tail jets: j < o_k for every k (never a derivative of
        // any leader, so the set stays auto-reduced) and strictly below
        // y_i^{(o)} in the orderly ranking (so the leader really leads).
        let mut pool: Vec<DerivativeVar> = Vec::new();
        for k in 1..=n {
            for j in 0..orders[(k - 1) as usize] {
                if j < o || (j == o && k < i) {
                    pool.push(DerivativeVar::y(k, j));
                }
            }
        }
        let mut tail = int(rng.gen_range(-3i64..=3));
        for _ in 0..rng.gen_range(1..=3usize) {
            let mut term = int(rng.gen_range(-3i64..=3));
            if term.is_zero() {
                continue;
            }
            for _ in 0..rng.gen_range(1..=max_tail_degree) {
                term = &term * &DiffPoly::var(*pool.choose(rng).expect("nonempty pool"));
            }
            tail += &term;
        }
        elements.push(&y(i, o) + &tail);
    }
    CharSet::new(elements, Ranking::default_orderly(n), n).expect("solved form is a chain")
}

/// A random codimension-one linear chain: one monic first-order element
/// over two variables under the elimination ranking `y2 < y1`.
pub fn random_linear_codim1(rng: &mut ChaCha8Rng) -> CharSet {
    let mut f = y(1, 1);
    for (i, k) in [(2u32, 1u32), (1, 0), (2, 0)] {
        f += &(&int(rng.gen_range(-3i64..=3)) * &y(i, k));
    }
    f += &int(rng.gen_range(-2i64..=2));
    CharSet::new(vec![f], Ranking::elimination(vec![2, 1]).unwrap(), 2).unwrap()
}

// ---------------------------------------------------------------------
// Property suites (shared between tests/properties.rs and the
// acceptance gate). Each panics on the first violation.

/// Leibniz rule, linearity, and the order shift of the derivation.
pub fn suite_derivation(cases: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let f = random_ypoly(&mut r, 3, 2, 3, 5);
        let g = random_ypoly(&mut r, 3, 2, 3, 5);
        let leibniz = &(&f * &g).derive() - &(&(&f.derive() * &g) + &(&f * &g.derive()));
        assert!(leibniz.is_zero(), "Leibniz violated at case {case}");
        let linear = &(&f + &g).derive() - &(&f.derive() + &g.derive());
        assert!(linear.is_zero(), "additivity violated at case {case}");
        if let Some(before) = f.vars().iter().map(|v| v.order).max() {
            let df = f.derive();
            let after = df.vars().iter().map(|v| v.order).max();
            assert_eq!(after, Some(before + 1), "order shift violated at case {case}");
        }
    }
}

/// Pseudo-division identity `lc(g,x)^(k+1)·f = q·g + r` re-expanded.
pub fn suite_prem_identity(cases: usize, seed: u64) {
    let mut r = rng(seed);
    let mut done = 0;
    while done < cases {
        let f = random_ypoly(&mut r, 2, 1, 4, 6);
        let g = random_ypoly(&mut r, 2, 1, 3, 4);
        let x = DerivativeVar::y(1, 1);
        let dg = g.degree_in(x);
        if dg == 0 {
            continue;
        }
        let (q, rem) = algebraic_prem(&f, &g, x).unwrap();
        let df = f.degree_in(x);
        let exponent = if df < dg { 0 } else { df - dg + 1 };
        let lhs = &f * &g.lc_in(x).pow(exponent);
        let rhs = &(&q * &g) + &rem;
        assert_eq!(lhs, rhs, "pseudo-division identity violated at case {done}");
        assert!(rem.degree_in(x) < dg, "remainder degree not reduced at case {done}");
        done += 1;
    }
}

/// Differential reduction: the remainder is reduced against every chain
/// element, membership of constructed combinations is detected exactly,
/// and the certificate re-expands to the input.
pub fn suite_diff_rem(cases: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let n = r.gen_range(1..=2);
        let a = random_monic_chain(&mut r, n, 2, 2);
        // A member: Σ random-poly · δ^k(A_i). Unit initials, so the
        // remainder must vanish identically.
        let mut member = DiffPoly::zero();
        for element in a.elements() {
            let k = r.gen_range(0..=2u32);
            let factor = random_ypoly(&mut r, n, 1, 2, 3);
            member += &(&factor * &element.derive_n(k));
        }
        let cert = diff_rem(&member, &a);
        assert!(
            cert.remainder.is_zero(),
            "constructed member not detected at case {case}: remainder {}",
            cert.remainder
        );
        // An arbitrary polynomial: remainder reduced, certificate exact.
        let f = random_ypoly(&mut r, n, 2, 3, 4);
        let cert = diff_rem(&f, &a);
        for element in a.elements() {
            assert!(
                is_reduced(&cert.remainder, element, a.ranking()),
                "remainder not reduced at case {case}"
            );
        }
        assert!(
            cert.verify(&f, a.elements(), a.ranking()),
            "certificate identity violated at case {case}"
        );
    }
}

/// The reduction degree bound: `deg r ≤ (m+1)^(p(h+1))·(D+1) − 1`.
pub fn suite_degree_bound(cases: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let n = r.gen_range(1..=2);
        let a = random_monic_chain(&mut r, n, 2, 2);
        let f = random_ypoly(&mut r, n, 2, 4, 5);
        let rem = dchow::reduction::diff_rem_only(&f, &a);
        if rem.is_zero() {
            continue;
        }
        let p = a.len() as u32;
        let h = f.vars().iter().map(|v| v.order).max().unwrap_or(0);
        let m = a
            .elements()
            .iter()
            .filter_map(|e| e.total_degree())
            .max()
            .unwrap_or(0);
        let d = f.total_degree().unwrap_or(0);
        let bound = (m + 1).pow(p * (h + 1)) * (d + 1) - 1;
        let got = rem.total_degree().unwrap_or(0);
        assert!(
            got <= bound,
            "degree bound violated at case {case}: {got} > {bound}"
        );
    }
}

/// Jacobi number against the permutation brute force.
pub fn suite_jacobi(cases: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let rows = r.gen_range(1..=6usize);
        let cols = r.gen_range(rows..=6usize);
        let m: Vec<Vec<Option<u32>>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| r.gen_bool(0.75).then(|| r.gen_range(0..=6u32)))
                    .collect()
            })
            .collect();
        let brute = jacobi_brute_force(&m);
        let fast = match jacobi_number(&OrderMatrix::new(m.clone()).unwrap()) {
            Ok(j) => Some(j),
            Err(BoundsError::NoFeasibleAssignment) => None,
            Err(e) => panic!("unexpected error at case {case}: {e}"),
        };
        assert_eq!(fast, brute, "jacobi mismatch at case {case} on {m:?}");
    }
}

/// Nullspace soundness (`A·v = 0` exactly for every basis vector) and
/// completeness (dimension equals `cols − rank` by the RREF oracle).
pub fn suite_nullspace(cases: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let rows = r.gen_range(1..=7usize);
        let cols = r.gen_range(1..=7usize);
        let m: Vec<Vec<Rat>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| {
                        Rat::new(
                            BigInt::from(r.gen_range(-5i64..=5)),
                            BigInt::from(r.gen_range(1i64..=3)),
                        )
                    })
                    .collect()
            })
            .collect();
        let system = LinearSystem::from_dense(m.clone(), cols);
        let basis = nullspace(&system);
        for v in basis.vectors() {
            for (i, row) in m.iter().enumerate() {
                let dot = row
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (a, b)| &acc + &(a * b));
                assert!(dot.is_zero(), "A·v ≠ 0 at case {case}, row {i}");
            }
            assert!(v.iter().any(|x| !x.is_zero()), "zero basis vector at case {case}");
        }
        assert_eq!(
            basis.dimension(),
            cols - rref_rank(&m),
            "nullity mismatch at case {case}"
        );
    }
}

/// Exactness: coefficient differences far below any floating-point
/// epsilon still decide ranks and zero-ness correctly.
pub fn suite_zero_tolerance() {
    // 10^-40 difference: a doubles nullspace would call singular.
    let tiny = Rat::new(BigInt::one(), BigInt::from(10u8).pow(40));
    let one = Rat::one();
    let m = vec![
        vec![one.clone(), one.clone()],
        vec![one.clone(), &one + &tiny],
    ];
    let system = LinearSystem::from_dense(m, 2);
    assert_eq!(
        nullspace(&system).dimension(),
        0,
        "exact rank lost a 10^-40 distinction"
    );
    // And the ideal-membership zero test is literal, not approximate:
    // (3·(f/3) − f) must be the zero polynomial, bit for bit.
    let f = &(&y(1, 1) * &y(1, 0)) + &int(7);
    let third = DiffPoly::constant(Rat::new(BigInt::one(), BigInt::from(3)));
    let g = &(&int(3) * &(&third * &f)) - &f;
    assert!(g.is_zero());
}

/// Grammar round trip: `parse(format(f)) = f` over random polynomials in
/// both variable families.
pub fn suite_grammar_round_trip(cases: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases / 2 {
        let f = random_ypoly(&mut r, 3, 3, 4, 6);
        let text = format_diffpoly(&f, FormatStyle::Plain);
        let back = parse_diffpoly(&text, 3)
            .unwrap_or_else(|e| panic!("y round trip failed at case {case} on `{text}`: {e}"));
        assert_eq!(back, f, "y round trip changed the polynomial at case {case}");
    }
    for case in 0..cases / 2 {
        let f = random_upoly(&mut r, 2, 2, 3, 4, 6);
        let text = format_diffpoly(&f, FormatStyle::Plain);
        let back = parse_uform(&text)
            .unwrap_or_else(|e| panic!("u round trip failed at case {case} on `{text}`: {e}"));
        assert_eq!(back, f, "u round trip changed the polynomial at case {case}");
    }
}
