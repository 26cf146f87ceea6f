//! Differential Chow forms: generic hyperplanes, the ansatz pipeline, the
//! three search algorithms, and the verification ladder.
//!
//! The object computed here is the differential Chow form `F` of a prime
//! differential ideal of dimension `d`, presented by a characteristic set
//! `A` over `y1..yn`: the unique (up to a rational scalar) irreducible
//! polynomial in the coefficients of `d+1` generic hyperplanes
//! `P_i = u_{i0} + u_{i1}·y1 + … + u_{in}·yn` that vanishes exactly when
//! the hyperplanes meet the solution variety.
//!
//! All three algorithms share one cell evaluation: fix a candidate order
//! `h` and total degree `t`, write the generic ansatz `F0 = Σ c_k·μ_k`
//! over all degree-`t` monomials in the `u`-derivatives up to order `h`,
//! substitute `u_{i0}^{(k)}` away using the hyperplanes, differentially
//! reduce by `A`, and solve the resulting linear system for `c`. They
//! differ only in how the `(h, t)` lattice is swept and how much
//! verification a nonzero solution must survive:
//!
//! * [`dchowform1`] — orderly rankings only, where `h = ord(A)` is exact;
//!   sweeps `t` upward.
//! * [`dchowform2`] — order-major sweep from `ord(A)` up to the Jacobi
//!   number; first nonzero solution wins.
//! * [`dchowform3`] — degree-major sweep; every nonzero solution must pass
//!   the verification ladder (differential homogeneity, reduction of `A`
//!   and the hyperplanes to zero against the candidate's characteristic
//!   set, non-vanishing of the initial–separant product, block-swap
//!   symmetry), and a failure lowers the order cap to `h − 1`.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num::{BigInt, BigUint, One, ToPrimitive};
use thiserror::Error;

use crate::bounds::{degree_bound_at, degree_bound_orderly, jacobi_number, OrderMatrix};
use crate::dpoly::{BaseVar, DerivativeVar, DiffPoly, Monomial, Rat};
use crate::linalg::{assemble, canonical_solution, nullspace};
use crate::ranking::Ranking;
use crate::reduction::{diff_rem_only, CharSet};

/// Errors from the Chow-form search.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ChowError {
    #[error("this algorithm requires an orderly ranking, got {ranking}")]
    NotOrderlyRanking { ranking: String },
    /// The sweep ran past its theoretical bound. The bounds are proven for
    /// prime inputs, so this signals invalid input (or an internal defect),
    /// never a legitimate "not found".
    #[error("search exhausted its bound after cell (h={h}, t={t}); the input likely does not present a prime ideal")]
    BoundExceeded { h: u32, t: u32 },
    #[error("cell (h={h}, t={t}) needs {required} ansatz columns, over the budget of {budget}")]
    ColumnBudgetExceeded { h: u32, t: u32, required: u128, budget: u64 },
    /// The accepting cell of algorithms 1/2 must have a one-dimensional
    /// nullspace (the Chow form generates all members of its order and
    /// degree); more dimensions means the input was not prime.
    #[error("nullspace dimension {nullity} at acceptance cell (h={h}, t={t}); expected exactly 1")]
    NullityViolation { h: u32, t: u32, nullity: usize },
    #[error("the polynomial does not involve u0_0^({h}); its characteristic set is degenerate")]
    DegenerateSeparant { h: u32 },
    #[error("candidate verification failed at (h={h}, t={t}): {}", failures.join("; "))]
    CandidateRejected { h: u32, t: u32, failures: Vec<String> },
    #[error("a candidate polynomial requires jump_to to name its (h, t) cell")]
    CandidateNeedsTarget,
}

/// Optional controls for the search loops, used by long-running inputs.
#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Skip every cell strictly before this `(h, t)` in the algorithm's
    /// own priority order.
    pub jump_to: Option<(u32, u32)>,
    /// Abort with [`ChowError::ColumnBudgetExceeded`] instead of building
    /// an ansatz wider than this.
    pub max_columns: Option<u64>,
    /// Verify this externally produced polynomial at the `jump_to` cell
    /// (running the full verification ladder and the membership reduction)
    /// instead of solving the cell, and stop there.
    pub candidate: Option<DiffPoly>,
}

/// What happened at one `(h, t)` cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellVerdict {
    /// Only the zero solution: keep sweeping.
    TrivialNullspace,
    /// Nonzero solution accepted as the Chow form.
    Accepted,
    /// Nonzero solution failed a ladder check (algorithm 3).
    LadderFailed { check: String },
    /// An externally supplied candidate passed full verification here.
    CandidateVerified,
}

impl fmt::Display for CellVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellVerdict::TrivialNullspace => write!(f, "rejected"),
            CellVerdict::Accepted => write!(f, "accepted"),
            CellVerdict::LadderFailed { check } => write!(f, "ladder-failed: {check}"),
            CellVerdict::CandidateVerified => write!(f, "candidate-verified"),
        }
    }
}

/// One row of the search trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub h: u32,
    pub t: u32,
    /// Equations counted as one per distinct non-`c` monomial (no merging
    /// of duplicate rows) — comparable with published tallies.
    pub rows: usize,
    /// Ansatz coefficient count.
    pub cols: usize,
    pub nullity: usize,
    pub verdict: CellVerdict,
}

/// A computed differential Chow form with its metadata and search trace.
#[derive(Clone, Debug)]
pub struct ChowResult {
    /// The Chow form: nonzero, `u`-derivatives only, integer coefficients
    /// of content 1, leading coefficient positive.
    pub chow_form: DiffPoly,
    /// Its order `h`.
    pub order: u32,
    /// Its total degree `t`.
    pub total_degree: u32,
    /// The common differential-homogeneity degree of each `u_i` block.
    pub per_block_degree: u32,
    /// Dimension `d` of the presented ideal.
    pub dimension: u32,
    /// The order of the ideal, read off the Chow form (equals `order`).
    pub ideal_order: u32,
    pub trace: Vec<TraceEntry>,
    pub warnings: Vec<String>,
}

/// The `d+1` generic hyperplanes `P_i = u_{i0} + Σ_j u_{ij}·y_j`.
#[derive(Clone, Debug)]
pub struct HyperplaneSystem {
    hyperplanes: Vec<DiffPoly>,
    n: u32,
    d: u32,
}

/// Builds the generic hyperplane system for `n` variables and dimension
/// `d`. Requires `d < n` (a characteristic set has at least one element).
pub fn generic_hyperplanes(n: u32, d: u32) -> HyperplaneSystem {
    assert!(n >= 1 && d < n, "need 0 <= d < n, got n={n}, d={d}");
    let hyperplanes = (0..=d)
        .map(|i| {
            let mut p = DiffPoly::var(DerivativeVar::u(i, 0, 0));
            for j in 1..=n {
                p += &(&DiffPoly::var(DerivativeVar::u(i, j, 0))
                    * &DiffPoly::var(DerivativeVar::y(j, 0)));
            }
            p
        })
        .collect();
    HyperplaneSystem { hyperplanes, n, d }
}

impl HyperplaneSystem {
    pub fn hyperplanes(&self) -> &[DiffPoly] {
        &self.hyperplanes
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// The ansatz variable list `∪_i u_i^[h]`: every `u_{ij}^{(k)}` for
    /// `i ≤ d`, `j ≤ n`, `k ≤ h`, enumerated derivation-order-major, then
    /// by hyperplane, then by coordinate — the published listing order.
    pub fn u_vars(&self, h: u32) -> Vec<DerivativeVar> {
        let mut v = Vec::with_capacity(((self.d + 1) * (self.n + 1) * (h + 1)) as usize);
        for k in 0..=h {
            for i in 0..=self.d {
                for j in 0..=self.n {
                    v.push(DerivativeVar::u(i, j, k));
                }
            }
        }
        v
    }

    /// The derivation-closed substitution sending each `u_{i0}^{(k)}`
    /// (`k ≤ h`) to the `k`-th derivative of `−Σ_j u_{ij}·y_j`.
    pub fn u0_substitution(&self, h: u32) -> BTreeMap<DerivativeVar, DiffPoly> {
        let mut map = BTreeMap::new();
        for i in 0..=self.d {
            let mut image = DiffPoly::zero();
            for j in 1..=self.n {
                image -= &(&DiffPoly::var(DerivativeVar::u(i, j, 0))
                    * &DiffPoly::var(DerivativeVar::y(j, 0)));
            }
            for k in 0..=h {
                map.insert(DerivativeVar::u(i, 0, k), image.clone());
                if k < h {
                    image = image.derive();
                }
            }
        }
        map
    }
}

/// Exact binomial coefficient.
fn binomial(n: u64, k: u64) -> BigUint {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 1..=k {
        r = r * BigUint::from(n - k + i) / BigUint::from(i);
    }
    r
}

/// The generic homogeneous ansatz of degree `t` over the variable list
/// `v`: `F0 = Σ c_k·μ_k` with one fresh coefficient per degree-`t`
/// monomial, monomials enumerated as non-decreasing index tuples in
/// lexicographic order. Returns the ansatz and the coefficient list
/// (`|c| = C(|v|+t−1, t)`).
pub fn generic_ansatz(t: u32, v: &[DerivativeVar]) -> (DiffPoly, Vec<DerivativeVar>) {
    assert!(t >= 1 && !v.is_empty(), "ansatz needs t >= 1 and variables");
    let mut f0 = DiffPoly::zero();
    let mut c_vars = Vec::new();
    for idx in (0..v.len()).combinations_with_replacement(t as usize) {
        let k = u32::try_from(c_vars.len() + 1).expect("coefficient count fits u32");
        let c = DerivativeVar::coeff(k);
        c_vars.push(c);
        let mono = Monomial::from_powers(idx.iter().map(|&p| (v[p], 1)).chain([(c, 1)]));
        f0.add_term(mono, Rat::one());
    }
    (f0, c_vars)
}

/// Substitutes every `u_{i0}^{(k)}` (`k ≤ h`) by the `k`-th derivative of
/// `−Σ_j u_{ij}·y_j`, eliminating the affine coefficients in favor of the
/// remaining `u`-variables and `y`.
pub fn substitute_u0(f0: &DiffPoly, hs: &HyperplaneSystem, h: u32) -> DiffPoly {
    let f1 = f0.substitute(&hs.u0_substitution(h));
    debug_assert!(
        f1.vars().iter().all(|v| !matches!(v.base, BaseVar::U { coord: 0, .. })),
        "substitution left an affine u-coefficient behind"
    );
    f1
}

/// Verdict of the differential-homogeneity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomogeneityVerdict {
    /// Every block is differentially homogeneous of the same degree.
    Pass { degree: u32 },
    Fail { reason: String },
}

impl HomogeneityVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, HomogeneityVerdict::Pass { .. })
    }
}

/// Plain total degree of `m` in the variables of `u`-block `i`.
fn block_degree_of_monomial(m: &Monomial, block: u32) -> u32 {
    m.factors()
        .iter()
        .filter(|(v, _)| matches!(v.base, BaseVar::U { hyperplane, .. } if hyperplane == block))
        .map(|(_, e)| *e)
        .sum()
}

/// Tests differential homogeneity of `f` in each listed `u`-block: block
/// `i` passes with degree `r` when substituting
/// `u_{ij}^{(k)} ↦ Σ_{l≤k} C(k,l)·λ^{(l)}·u_{ij}^{(k−l)}`
/// (λ a fresh differential indeterminate) turns `f` into exactly
/// `λ^r · f`. The overall verdict requires every block to pass with one
/// common degree.
pub fn is_diff_homogeneous(f: &DiffPoly, blocks: &[u32]) -> HomogeneityVerdict {
    if f.is_zero() {
        return HomogeneityVerdict::Fail { reason: "the zero polynomial has no degree".into() };
    }
    if let Some(v) = f.vars().iter().find(|v| !v.base.is_u()) {
        return HomogeneityVerdict::Fail { reason: format!("non-u variable {v} present") };
    }
    let mut common: Option<u32> = None;
    for &block in blocks {
        // Candidate degree: the block degree of any one term.
        let (first_mono, _) = f.terms().next().expect("nonzero");
        let r = block_degree_of_monomial(first_mono, block);
        let mut map = BTreeMap::new();
        for v in f.vars() {
            let BaseVar::U { hyperplane, coord } = v.base else { continue };
            if hyperplane != block {
                continue;
            }
            let mut image = DiffPoly::zero();
            for l in 0..=v.order {
                let coeff = Rat::from(BigInt::from(binomial(u64::from(v.order), u64::from(l))));
                let mono = Monomial::from_powers([
                    (DerivativeVar::lambda(l), 1),
                    (DerivativeVar::u(hyperplane, coord, v.order - l), 1),
                ]);
                image.add_term(mono, coeff);
            }
            map.insert(v, image);
        }
        let substituted = f.substitute(&map);
        let expected = f.mul_monomial(&Monomial::from_powers([(DerivativeVar::lambda(0), r)]));
        if substituted != expected {
            let diff = &substituted - &expected;
            let witness = diff
                .display_terms()
                .first()
                .map(|(m, c)| DiffPoly::term((*c).clone(), (*m).clone()).to_string())
                .unwrap_or_default();
            return HomogeneityVerdict::Fail {
                reason: format!("block {block} is not homogeneous of degree {r}; witness term {witness}"),
            };
        }
        match common {
            None => common = Some(r),
            Some(prev) if prev != r => {
                return HomogeneityVerdict::Fail {
                    reason: format!("block degrees differ: {prev} vs {r} (block {block})"),
                };
            }
            Some(_) => {}
        }
    }
    HomogeneityVerdict::Pass { degree: common.unwrap_or(0) }
}

/// The characteristic set a genuine Chow form of order `h` induces:
/// `{F, S·y_1 − ∂F/∂u_{01}^{(h)}, …, S·y_n − ∂F/∂u_{0n}^{(h)}}` with
/// `S = ∂F/∂u_{00}^{(h)}`, triangular under the chain ranking (all `u`
/// below `y1 < … < yn`).
pub fn char_set_cf(f: &DiffPoly, h: u32, n: u32) -> Result<Vec<DiffPoly>, ChowError> {
    let sep = f.partial(DerivativeVar::u(0, 0, h));
    if sep.is_zero() {
        return Err(ChowError::DegenerateSeparant { h });
    }
    let mut cf = vec![f.clone()];
    for j in 1..=n {
        let dj = f.partial(DerivativeVar::u(0, j, h));
        cf.push(&(&sep * &DiffPoly::var(DerivativeVar::y(j, 0))) - &dj);
    }
    Ok(cf)
}

/// `f` with `u`-blocks `a` and `b` interchanged (same coordinates and
/// derivation orders).
pub fn swap_blocks(f: &DiffPoly, a: u32, b: u32) -> DiffPoly {
    let mut map = BTreeMap::new();
    for v in f.vars() {
        let BaseVar::U { hyperplane, coord } = v.base else { continue };
        let target = if hyperplane == a {
            b
        } else if hyperplane == b {
            a
        } else {
            continue;
        };
        map.insert(v, DiffPoly::var(DerivativeVar::u(target, coord, v.order)));
    }
    f.substitute(&map)
}

/// Outcome of the algorithm-3 verification ladder.
struct LadderReport {
    failures: Vec<String>,
    per_block_degree: Option<u32>,
}

/// The generic point cut out by the candidate's characteristic set
/// `{F, S·y_j − T_j}`: each coordinate is the fraction `y_j = p_j / q_j`,
/// and `y_j^{(k)}` is its k-th derivative. Reducing a polynomial by the
/// linear elements and their prolongations is exactly this substitution
/// with denominators cleared, so the ladder's membership checks run on
/// the cleared numerator against the candidate's prolongations alone.
struct GenericPoint {
    /// `(p_j, q_j)` for coordinate `y_{j+1}`.
    fractions: Vec<(DiffPoly, DiffPoly)>,
}

/// Determinant of a small square matrix of polynomials, by Laplace
/// expansion along the first row. The hyperplane-coefficient matrices
/// this sees are at most a handful of rows.
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
                        (0..size)
                            .filter(|&c| c != col)
                            .map(|c| m[r][c].clone())
                            .collect()
                    })
                    .collect();
                let cofactor = &poly_det(&minor) * entry;
                if col % 2 == 0 {
                    acc += &cofactor;
                } else {
                    acc -= &cofactor;
                }
            }
            acc
        }
    }
}

/// Builds the generic point of `{F, S·y_j − T_j}`. The raw fractions
/// `T_j / S` always work, but on structured candidates they carry a huge
/// common factor that makes every later product explode. When there are
/// as many hyperplanes as coordinates, the hyperplanes themselves
/// determine the point by Cramer's rule in essentially lowest terms; the
/// Cramer fractions are adopted whenever they agree with the partials
/// (`q·T_j = p_j·S`, one exact sparse product per coordinate — a genuine
/// Chow form always satisfies it, and anything else falls back to the
/// raw fractions).
fn generic_point(sep: &DiffPoly, partials: &[DiffPoly], hs: &HyperplaneSystem) -> GenericPoint {
    let n = hs.n() as usize;
    if hs.d() + 1 == hs.n() {
        let matrix: Vec<Vec<DiffPoly>> = (0..hs.n())
            .map(|i| (1..=hs.n()).map(|j| DiffPoly::var(DerivativeVar::u(i, j, 0))).collect())
            .collect();
        let q = poly_det(&matrix);
        let cramer: Vec<DiffPoly> = (0..n)
            .map(|j| {
                let mut replaced = matrix.clone();
                for (i, row) in replaced.iter_mut().enumerate() {
                    row[j] = DiffPoly::var(DerivativeVar::u(i as u32, 0, 0)).neg();
                }
                poly_det(&replaced)
            })
            .collect();
        let agrees = (0..n)
            .all(|j| (&(&q * &partials[j]) - &(&cramer[j] * sep)).is_zero());
        if agrees {
            return GenericPoint {
                fractions: cramer.into_iter().map(|p| (p, q.clone())).collect(),
            };
        }
    }
    GenericPoint {
        fractions: partials.iter().map(|t| (t.clone(), sep.clone())).collect(),
    }
}

/// Numerators of the derivatives of `p/q`: entry `k` sits over the
/// denominator `q^(k+1)`, via `N_{k+1} = N_k'·q − (k+1)·N_k·q'`.
fn jet_numerators(p: &DiffPoly, q: &DiffPoly, max_order: u32) -> Vec<DiffPoly> {
    let q_prime = q.derive();
    let mut jets = vec![p.clone()];
    for k in 0..max_order {
        let last = &jets[jets.len() - 1];
        let scale = DiffPoly::constant(Rat::from(BigInt::from(i64::from(k) + 1)));
        let next = &(&last.derive() * q) - &(&(&scale * &q_prime) * last);
        jets.push(next);
    }
    jets
}

/// `g` with every `y_j^{(k)}` replaced by the k-th derivative of the
/// generic point's j-th fraction, multiplied through by the least common
/// denominator power `∏_j q_j^{K_j}`: a polynomial that vanishes exactly
/// when `g` does at the generic point. Content-normalized.
fn clear_at_generic_point(g: &DiffPoly, point: &GenericPoint) -> DiffPoly {
    let n = point.fractions.len() as u32;
    // Per coordinate: the highest derivative of y_j in g, hence the jet
    // table depth and the worst-case denominator exponent K_j.
    let mut max_order = vec![None::<u32>; n as usize];
    for v in g.vars() {
        if let BaseVar::Y { index } = v.base {
            let slot = &mut max_order[(index - 1) as usize];
            *slot = Some(slot.map_or(v.order, |o| o.max(v.order)));
        }
    }
    let jets: Vec<Option<Vec<DiffPoly>>> = max_order
        .iter()
        .enumerate()
        .map(|(j, mo)| {
            mo.map(|o| {
                let (p, q) = &point.fractions[j];
                jet_numerators(p, q, o)
            })
        })
        .collect();
    let denominator_exponent = |m: &Monomial, j: u32| -> u32 {
        m.factors()
            .iter()
            .filter_map(|&(v, e)| match v.base {
                BaseVar::Y { index } if index == j + 1 => Some((v.order + 1) * e),
                _ => None,
            })
            .sum()
    };
    let k_max: Vec<u32> = (0..n)
        .map(|j| g.terms().map(|(m, _)| denominator_exponent(m, j)).max().unwrap_or(0))
        .collect();
    let mut cleared = DiffPoly::zero();
    for (m, c) in g.terms() {
        let mut factor = DiffPoly::constant(c.clone());
        let mut u_part = Monomial::one();
        for &(v, e) in m.factors() {
            match v.base {
                BaseVar::Y { index } => {
                    let j = (index - 1) as usize;
                    let table = jets[j].as_ref().expect("jet table built for occurring y");
                    factor = &factor * &table[v.order as usize].pow(e);
                }
                _ => u_part = u_part.mul(&Monomial::from_powers([(v, e)])),
            }
        }
        for j in 0..n {
            let deficit = k_max[j as usize] - denominator_exponent(m, j);
            if deficit > 0 {
                factor = &factor * &point.fractions[j as usize].1.pow(deficit);
            }
        }
        cleared += &factor.mul_monomial(&u_part);
    }
    cleared.content_normalized()
}

/// Ritt reduction of a `u`-polynomial against the candidate and its
/// derivatives: repeatedly pseudo-divide by `δ^k F` in the highest
/// occurring derivative of the candidate's leader, content-stripped.
/// The remainder is a scalar-content multiple of the exact one, so its
/// zero-ness is the membership verdict.
fn reduce_by_candidate(num: &DiffPoly, f: &DiffPoly, lead: DerivativeVar) -> DiffPoly {
    let f_degree = f.degree_in(lead);
    let mut r = num.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let top = r
            .vars()
            .iter()
            .filter(|v| v.base == lead.base && v.order >= lead.order)
            .map(|v| v.order)
            .max();
        let Some(order) = top else { return r };
        let k = order - lead.order;
        let x = DerivativeVar { base: lead.base, order };
        if k == 0 && r.degree_in(x) < f_degree {
            return r;
        }
        let divisor = if k == 0 { f.clone() } else { f.derive_n(k) };
        r = crate::reduction::prem_zero_test(&r, &divisor, x)
            .expect("prolongation has positive degree in its leader");
    }
}

/// Renders a reduction remainder for a diagnostic, truncating long ones.
fn short(p: &DiffPoly) -> String {
    let s = p.to_string();
    if s.len() > 160 {
        format!("{}… ({} terms)", &s[..160], p.num_terms())
    } else {
        s
    }
}

/// The verification ladder of the degree-major search: differential
/// homogeneity, reduction of every chain element and every hyperplane to
/// zero against the candidate's characteristic set, non-vanishing of the
/// initial–separant product, and block-swap antisymmetry.
fn ladder(
    f: &DiffPoly,
    a: &CharSet,
    hs: &HyperplaneSystem,
    h: u32,
    fail_fast: bool,
) -> LadderReport {
    let mut report = LadderReport { failures: Vec::new(), per_block_degree: None };
    let blocks: Vec<u32> = (0..=hs.d()).collect();
    match is_diff_homogeneous(f, &blocks) {
        HomogeneityVerdict::Pass { degree } => report.per_block_degree = Some(degree),
        HomogeneityVerdict::Fail { reason } => {
            report.failures.push(format!("homogeneity: {reason}"));
            if fail_fast {
                return report;
            }
        }
    }
    if let Err(e) = char_set_cf(f, h, hs.n()) {
        report.failures.push(format!("candidate chain: {e}"));
        return report;
    }
    let sep = f.partial(DerivativeVar::u(0, 0, h));
    let partials: Vec<DiffPoly> =
        (1..=hs.n()).map(|j| f.partial(DerivativeVar::u(0, j, h))).collect();
    let lead = Ranking::chow_chain(hs.n())
        .leader_of(f)
        .expect("a nonzero u-polynomial has a leader");
    let point = generic_point(&sep, &partials, hs);
    let reduce = |g: &DiffPoly| {
        let num = clear_at_generic_point(g, &point);
        reduce_by_candidate(&num, f, lead)
    };
    for (i, elem) in a.elements().iter().enumerate() {
        let r = reduce(elem);
        if !r.is_zero() {
            report.failures.push(format!(
                "chain element #{i} does not reduce to zero (remainder {})",
                short(&r)
            ));
            if fail_fast {
                return report;
            }
        }
    }
    for (i, p) in hs.hyperplanes().iter().enumerate() {
        let r = reduce(p);
        if !r.is_zero() {
            report.failures.push(format!(
                "hyperplane #{i} does not reduce to zero (remainder {})",
                short(&r)
            ));
            if fail_fast {
                return report;
            }
        }
    }
    let is_product = a.initial_separant_product();
    if reduce(&is_product).is_zero() {
        report.failures.push(
            "the initial-separant product reduces to zero against the candidate".to_string(),
        );
        if fail_fast {
            return report;
        }
    }
    if hs.d() >= 1 {
        for b1 in 0..=hs.d() {
            for b2 in b1 + 1..=hs.d() {
                let swapped = swap_blocks(f, b1, b2);
                if swapped != *f && swapped != f.neg() {
                    report.failures.push(format!(
                        "swapping blocks {b1} and {b2} does not yield the polynomial up to sign"
                    ));
                    if fail_fast {
                        return report;
                    }
                }
            }
        }
    }
    report
}

/// Verdict of [`verify_chow`]: all failed conditions, plus the order and
/// per-block degree read off the polynomial when they are well-defined.
#[derive(Clone, Debug)]
pub struct ChowVerdict {
    pub pass: bool,
    pub failures: Vec<String>,
    /// The uniform order `ord(F, u_ij)` when every occurring `u_ij`
    /// attains one common maximum derivation order.
    pub order: Option<u32>,
    pub per_block_degree: Option<u32>,
}

/// The maximum derivation order per occurring `u`-base of `f`, or a
/// failure message when they are not all equal.
fn uniform_u_order(f: &DiffPoly) -> Result<u32, String> {
    let mut per_base: BTreeMap<BaseVar, u32> = BTreeMap::new();
    for v in f.vars() {
        if v.base.is_u() {
            let e = per_base.entry(v.base).or_insert(0);
            *e = (*e).max(v.order);
        }
    }
    let mut values: Vec<u32> = per_base.values().copied().collect();
    values.sort_unstable();
    values.dedup();
    match values[..] {
        [] => Err("no u-variables occur".to_string()),
        [h] => Ok(h),
        _ => Err(format!(
            "occurring u-variables attain different maximum orders: {}",
            per_base
                .iter()
                .map(|(b, o)| format!("{b}:{o}"))
                .collect::<Vec<_>>()
                .join(", ")
        )),
    }
}

/// Full verification that `f` is the differential Chow form of the ideal
/// presented by `a`: shape checks (nonzero, `u`-variables of the right
/// blocks only, one uniform order), membership of the substituted form in
/// the ideal, the whole verification ladder, differential homogeneity,
/// and block-swap symmetry. Never errors — every defect is a listed
/// failure.
pub fn verify_chow(f: &DiffPoly, a: &CharSet) -> ChowVerdict {
    let mut failures = Vec::new();
    let d = a.dimension();
    let n = a.num_vars();
    if f.is_zero() {
        return ChowVerdict {
            pass: false,
            failures: vec!["the zero polynomial is not a Chow form".into()],
            order: None,
            per_block_degree: None,
        };
    }
    for v in f.vars() {
        match v.base {
            BaseVar::U { hyperplane, coord } if hyperplane <= d && coord <= n => {}
            _ => failures.push(format!("variable {v} does not belong to u-blocks 0..={d}")),
        }
    }
    if !failures.is_empty() {
        return ChowVerdict { pass: false, failures, order: None, per_block_degree: None };
    }
    let order = match uniform_u_order(f) {
        Ok(h) => Some(h),
        Err(msg) => {
            failures.push(format!("order profile: {msg}"));
            None
        }
    };
    let h = order.unwrap_or_else(|| f.vars().iter().map(|v| v.order).max().unwrap_or(0));
    let hs = generic_hyperplanes(n, d);
    let substituted = substitute_u0(f, &hs, h);
    let membership = diff_rem_only(&substituted, a);
    if !membership.is_zero() {
        failures.push(format!(
            "substituted form does not reduce to zero (remainder {})",
            short(&membership)
        ));
    }
    let report = ladder(f, a, &hs, h, false);
    failures.extend(report.failures);
    ChowVerdict {
        pass: failures.is_empty(),
        failures,
        order,
        per_block_degree: report.per_block_degree,
    }
}

/// What one solved search cell produced.
enum CellOutcome {
    Trivial { rows: usize, cols: usize },
    Solved { rows: usize, cols: usize, nullity: usize, f: DiffPoly },
}

/// Evaluates one `(h, t)` cell: ansatz over `∪ u_i^[h]`, hyperplane
/// substitution, differential reduction by `a`, system assembly, exact
/// nullspace. A nonzero nullspace yields the canonical solution
/// substituted back into the ansatz, content-normalized.
fn solve_cell(
    a: &CharSet,
    hs: &HyperplaneSystem,
    h: u32,
    t: u32,
    opts: &SearchOptions,
) -> Result<CellOutcome, ChowError> {
    let v = hs.u_vars(h);
    let ncols = binomial(v.len() as u64 + u64::from(t) - 1, u64::from(t));
    if let Some(budget) = opts.max_columns {
        if ncols > BigUint::from(budget) {
            return Err(ChowError::ColumnBudgetExceeded {
                h,
                t,
                required: ncols.to_u128().unwrap_or(u128::MAX),
                budget,
            });
        }
    }
    let (f0, c_vars) = generic_ansatz(t, &v);
    let f1 = substitute_u0(&f0, hs, h);
    let f2 = diff_rem_only(&f1, a);
    let system =
        assemble(&f2, &c_vars).expect("the reduced ansatz is linear in its coefficients");
    let basis = nullspace(&system);
    let (rows, cols) = (system.raw_rows(), system.cols());
    if basis.dimension() == 0 {
        return Ok(CellOutcome::Trivial { rows, cols });
    }
    let solution = canonical_solution(&basis).expect("nonzero dimension");
    let map: BTreeMap<DerivativeVar, DiffPoly> = c_vars
        .iter()
        .zip(&solution)
        .map(|(c, q)| (*c, DiffPoly::constant(q.clone())))
        .collect();
    let f = f0.substitute(&map).content_normalized();
    debug_assert!(!f.is_zero());
    Ok(CellOutcome::Solved { rows, cols, nullity: basis.dimension(), f })
}

/// Shared final assembly of a [`ChowResult`].
fn finish(
    f: DiffPoly,
    h: u32,
    t: u32,
    a: &CharSet,
    hs: &HyperplaneSystem,
    per_block_degree: Option<u32>,
    trace: Vec<TraceEntry>,
    mut warnings: Vec<String>,
) -> ChowResult {
    let per_block = per_block_degree.unwrap_or_else(|| {
        let blocks: Vec<u32> = (0..=hs.d()).collect();
        match is_diff_homogeneous(&f, &blocks) {
            HomogeneityVerdict::Pass { degree } => degree,
            HomogeneityVerdict::Fail { reason } => {
                warnings.push(format!("output is not differentially homogeneous: {reason}"));
                f.terms()
                    .next()
                    .map(|(m, _)| block_degree_of_monomial(m, 0))
                    .unwrap_or(0)
            }
        }
    });
    ChowResult {
        chow_form: f,
        order: h,
        total_degree: t,
        per_block_degree: per_block,
        dimension: a.dimension(),
        ideal_order: h,
        trace,
        warnings,
    }
}

/// Converts a big bound to an inclusive `u32` sweep limit.
fn bound_to_u32(b: &BigUint) -> u32 {
    b.to_u32().unwrap_or(u32::MAX)
}

/// Verifies an externally supplied candidate at a fixed cell and returns
/// it as the result — the early-exit mode for inputs whose accepting cell
/// is far beyond desk-scale linear algebra.
fn verify_candidate(
    a: &CharSet,
    hs: &HyperplaneSystem,
    h: u32,
    t: u32,
    candidate: &DiffPoly,
) -> Result<ChowResult, ChowError> {
    let f = candidate.content_normalized();
    let verdict = verify_chow(&f, a);
    let mut failures = verdict.failures;
    if verdict.order != Some(h) {
        failures.push(format!(
            "candidate order {:?} does not match the target cell order {h}",
            verdict.order
        ));
    }
    match f.total_degree() {
        Some(deg) if deg == t => {}
        deg => failures.push(format!(
            "candidate total degree {deg:?} does not match the target cell degree {t}"
        )),
    }
    if !failures.is_empty() {
        return Err(ChowError::CandidateRejected { h, t, failures });
    }
    let trace = vec![TraceEntry {
        h,
        t,
        rows: 0,
        cols: 0,
        nullity: 0,
        verdict: CellVerdict::CandidateVerified,
    }];
    Ok(finish(f, h, t, a, hs, verdict.per_block_degree, trace, Vec::new()))
}

/// Pulls the candidate/jump pair out of the options, if consistent.
fn candidate_target(opts: &SearchOptions) -> Result<Option<(u32, u32, DiffPoly)>, ChowError> {
    match (&opts.candidate, opts.jump_to) {
        (None, _) => Ok(None),
        (Some(_), None) => Err(ChowError::CandidateNeedsTarget),
        (Some(f), Some((h, t))) => Ok(Some((h, t, f.clone()))),
    }
}

/// The orderly-ranking search: the order is known exactly (`h = ord(A)`),
/// so only the degree is swept, `t = 1, 2, …` up to the orderly degree
/// bound. Exceeding the bound is a defect, not a search miss.
pub fn dchowform1(a: &CharSet) -> Result<ChowResult, ChowError> {
    dchowform1_with(a, &SearchOptions::default())
}

pub fn dchowform1_with(a: &CharSet, opts: &SearchOptions) -> Result<ChowResult, ChowError> {
    if !a.ranking().is_orderly() {
        return Err(ChowError::NotOrderlyRanking { ranking: a.ranking().to_string() });
    }
    let h = a.ord();
    let hs = generic_hyperplanes(a.num_vars(), a.dimension());
    if let Some((ch, ct, f)) = candidate_target(opts)? {
        return verify_candidate(a, &hs, ch, ct, &f);
    }
    let bound = bound_to_u32(&degree_bound_orderly(a));
    let t_start = opts.jump_to.map_or(1, |(_, t)| t.max(1));
    let mut trace = Vec::new();
    for t in t_start..=bound {
        match solve_cell(a, &hs, h, t, opts)? {
            CellOutcome::Trivial { rows, cols } => {
                trace.push(TraceEntry {
                    h,
                    t,
                    rows,
                    cols,
                    nullity: 0,
                    verdict: CellVerdict::TrivialNullspace,
                });
            }
            CellOutcome::Solved { rows, cols, nullity, f } => {
                if nullity != 1 {
                    return Err(ChowError::NullityViolation { h, t, nullity });
                }
                trace.push(TraceEntry {
                    h,
                    t,
                    rows,
                    cols,
                    nullity,
                    verdict: CellVerdict::Accepted,
                });
                return Ok(finish(f, h, t, a, &hs, None, trace, Vec::new()));
            }
        }
    }
    Err(ChowError::BoundExceeded { h, t: bound })
}

/// The order-major search: `h` sweeps from `ord(A)` up to the Jacobi
/// number; per order, `t` sweeps to that order's degree bound. The first
/// nonzero solution is the Chow form.
pub fn dchowform2(a: &CharSet) -> Result<ChowResult, ChowError> {
    dchowform2_with(a, &SearchOptions::default())
}

pub fn dchowform2_with(a: &CharSet, opts: &SearchOptions) -> Result<ChowResult, ChowError> {
    let hs = generic_hyperplanes(a.num_vars(), a.dimension());
    if let Some((ch, ct, f)) = candidate_target(opts)? {
        return verify_candidate(a, &hs, ch, ct, &f);
    }
    let h_start = a.ord();
    let h_cap = if a.ranking().is_orderly() {
        a.ord()
    } else {
        jacobi_number(&OrderMatrix::from_charset(a))
            .expect("characteristic sets have a feasible leader assignment")
    };
    let mut trace = Vec::new();
    let mut last = (h_start, 0);
    for h in h_start..=h_cap {
        let t_bound = bound_to_u32(&degree_bound_at(a, h));
        for t in 1..=t_bound {
            if let Some((jh, jt)) = opts.jump_to {
                if (h, t) < (jh, jt) {
                    continue;
                }
            }
            last = (h, t);
            match solve_cell(a, &hs, h, t, opts)? {
                CellOutcome::Trivial { rows, cols } => {
                    trace.push(TraceEntry {
                        h,
                        t,
                        rows,
                        cols,
                        nullity: 0,
                        verdict: CellVerdict::TrivialNullspace,
                    });
                }
                CellOutcome::Solved { rows, cols, nullity, f } => {
                    if nullity != 1 {
                        return Err(ChowError::NullityViolation { h, t, nullity });
                    }
                    trace.push(TraceEntry {
                        h,
                        t,
                        rows,
                        cols,
                        nullity,
                        verdict: CellVerdict::Accepted,
                    });
                    let mut warnings = Vec::new();
                    if a.dimension() >= 1 {
                        for b1 in 0..=a.dimension() {
                            for b2 in b1 + 1..=a.dimension() {
                                let swapped = swap_blocks(&f, b1, b2);
                                if swapped != f && swapped != f.neg() {
                                    warnings.push(format!(
                                        "blocks {b1} and {b2} are not symmetric up to sign"
                                    ));
                                }
                            }
                        }
                    }
                    return Ok(finish(f, h, t, a, &hs, None, trace, warnings));
                }
            }
        }
    }
    Err(ChowError::BoundExceeded { h: last.0, t: last.1 })
}

/// The degree-major search: `t` sweeps outward; per degree, `h` sweeps
/// from `ord(A)` up to the current order cap `ĥ` (initially the Jacobi
/// number). A nonzero solution must pass the verification ladder; a
/// ladder failure proves no Chow form of order ≥ `h` exists, so the cap
/// drops to `h − 1` and the degree advances.
pub fn dchowform3(a: &CharSet) -> Result<ChowResult, ChowError> {
    dchowform3_with(a, &SearchOptions::default())
}

pub fn dchowform3_with(a: &CharSet, opts: &SearchOptions) -> Result<ChowResult, ChowError> {
    let hs = generic_hyperplanes(a.num_vars(), a.dimension());
    if let Some((ch, ct, f)) = candidate_target(opts)? {
        return verify_candidate(a, &hs, ch, ct, &f);
    }
    let h_start = a.ord();
    let mut h_cap = jacobi_number(&OrderMatrix::from_charset(a))
        .expect("characteristic sets have a feasible leader assignment");
    let mut trace = Vec::new();
    let mut t = 1u32;
    let mut last = (h_start, 0);
    loop {
        if t > bound_to_u32(&degree_bound_at(a, h_cap)) || h_cap < h_start {
            return Err(ChowError::BoundExceeded { h: last.0, t: last.1 });
        }
        'degree: for h in h_start..=h_cap {
            if let Some((jh, jt)) = opts.jump_to {
                if (t, h) < (jt, jh) {
                    continue;
                }
            }
            last = (h, t);
            match solve_cell(a, &hs, h, t, opts)? {
                CellOutcome::Trivial { rows, cols } => {
                    trace.push(TraceEntry {
                        h,
                        t,
                        rows,
                        cols,
                        nullity: 0,
                        verdict: CellVerdict::TrivialNullspace,
                    });
                }
                CellOutcome::Solved { rows, cols, nullity, f } => {
                    let report = ladder(&f, a, &hs, h, true);
                    match report.failures.first() {
                        None => {
                            trace.push(TraceEntry {
                                h,
                                t,
                                rows,
                                cols,
                                nullity,
                                verdict: CellVerdict::Accepted,
                            });
                            return Ok(finish(
                                f,
                                h,
                                t,
                                a,
                                &hs,
                                report.per_block_degree,
                                trace,
                                Vec::new(),
                            ));
                        }
                        Some(check) => {
                            trace.push(TraceEntry {
                                h,
                                t,
                                rows,
                                cols,
                                nullity,
                                verdict: CellVerdict::LadderFailed { check: check.clone() },
                            });
                            // No Chow form of order ≥ h exists: cap the
                            // order there and advance the degree.
                            h_cap = match h.checked_sub(1) {
                                Some(cap) => cap,
                                None => return Err(ChowError::BoundExceeded { h, t }),
                            };
                            break 'degree;
                        }
                    }
                }
            }
        }
        t += 1;
    }
}
