//! Ritt–Kolchin reduction: algebraic pseudo-remainders, triangular-chain
//! reduction, prolongation, and the differential remainder.
//!
//! The central identity: for every polynomial `f` and auto-reduced set
//! `A = {A_1, …, A_p}` there are exponents `d_i, e_i ≥ 0` and quotients
//! `q_j` against derivatives of the `A_i` with
//!
//! ```text
//! ∏ S_i^{d_i} · ∏ I_i^{e_i} · f  =  Σ q_j · δ^{k_j}(A_{i_j})  +  r
//! ```
//!
//! where `r` — the *differential remainder* — is reduced with respect to
//! every element of `A`. Every reduction here returns a
//! [`ReductionCertificate`] carrying the data of that identity, which can
//! be re-expanded and checked exactly.
//!
//! Reduction strategy: find the highest-ranked *offending* derivative (a
//! proper derivative of some chain leader, or a leader occurring to excess
//! degree), eliminate it by one algebraic pseudo-division against the
//! appropriate derivative of the chain element, and repeat to fixpoint.
//! Each pseudo-division only introduces symbols ranked strictly below the
//! offender, so the loop terminates for any chain with pairwise-distinct
//! leaders — full auto-reducedness is not required for termination, only
//! for the classical characteristic-set semantics.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::dpoly::{DerivativeVar, DiffPoly, Monomial};
use crate::ranking::{anatomy, validate_autoreduced, PolyAnatomy, Ranking};

/// Errors from pseudo-division and chain construction.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ReductionError {
    /// Pseudo-division needs a divisor with positive degree in the pivot.
    #[error("divisor has degree 0 in {var}; pseudo-division needs a positive-degree pivot")]
    NotUnivariateLeader { var: DerivativeVar },
    /// A chain operation was handed a list that is not triangular.
    #[error("chain is not triangular: {detail}")]
    NotTriangular { detail: String },
}

/// Errors from characteristic-set construction.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CharSetError {
    #[error("a characteristic set needs at least one element")]
    Empty,
    #[error("{count} elements exceed the {n} declared variables")]
    TooManyElements { count: usize, n: u32 },
    #[error("element #{index} ({poly}) has no leader under the ranking")]
    Leaderless { index: usize, poly: String },
    #[error("elements #{first} and #{second} lead with the same variable")]
    LeaderCollision { first: usize, second: usize },
    #[error("set is not auto-reduced: {detail}")]
    NotAutoReduced { detail: String },
    #[error("element indices {index} out of range for y1..y{n}")]
    VariableOutOfRange { index: u32, n: u32 },
}

/// Exact quotient-free pseudo-division of `f` by `g` in the symbol `x`:
/// returns `(q, r)` with
///
/// ```text
/// lc(g, x)^(k+1) · f = q·g + r,   deg(r, x) < deg(g, x),
/// k = max(deg(f, x) − deg(g, x), −1).
/// ```
///
/// The exponent is exactly `k + 1` (not minimized); when
/// `deg(f, x) < deg(g, x)` the result is `(0, f)` with exponent 0.
pub fn algebraic_prem(
    f: &DiffPoly,
    g: &DiffPoly,
    x: DerivativeVar,
) -> Result<(DiffPoly, DiffPoly), ReductionError> {
    let (q, r, _) = prem_core(f, g, x, true, false)?;
    Ok((q.expect("quotient tracked"), r))
}

/// Pseudo-division core. Returns `(quotient if tracked, remainder,
/// multiplier exponent k+1)`, maintaining `lc(g,x)^(k+1)·f = q·g + r`.
///
/// With `reduce_content` set (zero-test paths only — it forfeits the
/// identity up to a scalar and skips the exponent-padding factor), the
/// running remainder is stripped to content 1 after every elimination
/// step, which keeps coefficient growth linear instead of exponential.
fn prem_core(
    f: &DiffPoly,
    g: &DiffPoly,
    x: DerivativeVar,
    track_quotient: bool,
    reduce_content: bool,
) -> Result<(Option<DiffPoly>, DiffPoly, u32), ReductionError> {
    let d_g = g.degree_in(x);
    if d_g == 0 {
        return Err(ReductionError::NotUnivariateLeader { var: x });
    }
    let d_f = f.degree_in(x);
    if d_f < d_g {
        let q = track_quotient.then(DiffPoly::zero);
        return Ok((q, f.clone(), 0));
    }
    let exponent = d_f - d_g + 1;
    let lc_g = g.lc_in(x);
    let mut r = f.clone();
    let mut q = track_quotient.then(DiffPoly::zero);
    let mut performed = 0u32;
    while !r.is_zero() && r.degree_in(x) >= d_g {
        let d_r = r.degree_in(x);
        let lc_r = r.lc_in(x);
        let shifted = lc_r.mul_monomial(&Monomial::from_powers([(x, d_r - d_g)]));
        r = &(&lc_g * &r) - &(&shifted * g);
        if reduce_content {
            r.strip_content_in_place();
        }
        if let Some(acc) = q.take() {
            q = Some(&(&lc_g * &acc) + &shifted);
        }
        performed += 1;
    }
    // Pad up to the exact exponent k + 1: each missing round is one more
    // factor of lc(g, x) on both sides of the identity. Content-reduced
    // division skips the padding — it is a nonzero polynomial factor, so
    // zero-ness of the remainder is unaffected.
    if performed < exponent && !reduce_content {
        let boost = lc_g.pow(exponent - performed);
        r = &r * &boost;
        q = q.map(|acc| &acc * &boost);
    }
    Ok((q, r, exponent))
}

/// Pseudo-remainder of `f` by `g` in `x` for zero-testing only: the
/// running remainder is content-stripped throughout, so the result is a
/// scalar multiple of the exact pseudo-remainder (same zero-ness, far
/// smaller coefficients).
pub(crate) fn prem_zero_test(
    f: &DiffPoly,
    g: &DiffPoly,
    x: DerivativeVar,
) -> Result<DiffPoly, ReductionError> {
    let (_, r, _) = prem_core(f, g, x, false, true)?;
    Ok(r)
}

/// Whether the recorded multiplier is the element's initial or separant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplierKind {
    /// Leading coefficient of the element in its own leader (used when the
    /// element itself divides).
    Initial,
    /// Partial derivative in the leader — the leading coefficient of every
    /// proper derivative of the element (used when a derivative divides).
    Separant,
}

impl fmt::Display for MultiplierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplierKind::Initial => write!(f, "I"),
            MultiplierKind::Separant => write!(f, "S"),
        }
    }
}

/// One pseudo-division in a reduction: `multiplier^exponent · (running
/// remainder) = quotient · δ^derivative(element) + (next remainder)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    /// Index of the chain element involved (listing order of the chain).
    pub element: usize,
    /// Which derivative of it was divided by (0 = the element itself).
    pub derivative: u32,
    /// Initial (derivative 0) or separant (derivative ≥ 1).
    pub kind: MultiplierKind,
    /// Power of the multiplier contributed to the certificate.
    pub exponent: u32,
    /// Quotient against `δ^derivative(element)`, fully scaled so the final
    /// certificate identity holds verbatim.
    pub quotient: DiffPoly,
}

/// The data of one reduction identity
/// `(∏ multipliers) · f = Σ quotient_j · δ^{k_j}(element_{i_j}) + remainder`.
///
/// Multipliers are recorded symbolically as (element, kind, exponent);
/// [`ReductionCertificate::verify`] expands them lazily.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub remainder: DiffPoly,
    pub steps: Vec<ReductionStep>,
}

impl ReductionCertificate {
    fn unreduced(f: &DiffPoly) -> Self {
        ReductionCertificate { remainder: f.clone(), steps: Vec::new() }
    }

    /// Expands `∏ multiplier^exponent` over the given chain.
    pub fn multiplier_product(&self, chain: &[DiffPoly], r: &Ranking) -> DiffPoly {
        let mut product = DiffPoly::one();
        for step in &self.steps {
            let m = step_multiplier(&chain[step.element], step, r);
            product = &product * &m.pow(step.exponent);
        }
        product
    }

    /// Re-expands the certificate identity against the original input and
    /// chain: exact equality, no tolerance.
    pub fn verify(&self, f: &DiffPoly, chain: &[DiffPoly], r: &Ranking) -> bool {
        let mut rhs = self.remainder.clone();
        for step in &self.steps {
            let g = chain[step.element].derive_n(step.derivative);
            rhs += &(&step.quotient * &g);
        }
        let lhs = &self.multiplier_product(chain, r) * f;
        lhs == rhs
    }
}

/// The multiplier a step contributed: leading coefficient of
/// `δ^derivative(element)` in its leader.
fn step_multiplier(element: &DiffPoly, step: &ReductionStep, r: &Ranking) -> DiffPoly {
    let g = element.derive_n(step.derivative);
    let a = anatomy(&g, r).expect("chain derivatives keep their leaders");
    a.initial
}

/// A triangular list with cached anatomies: pairwise-distinct leader
/// variables, listed in strictly increasing leader rank. This is the
/// machinery type behind both characteristic sets and the verification
/// ladder's chains (whose first element leads with a `u`-derivative).
#[derive(Clone, Debug)]
pub(crate) struct Chain {
    pub(crate) elements: Vec<DiffPoly>,
    pub(crate) anatomies: Vec<PolyAnatomy>,
    pub(crate) ranking: Ranking,
}

impl Chain {
    /// Builds a chain, sorting into increasing leader rank. Reports whether
    /// the input had to be re-sorted.
    pub(crate) fn new_sorted(
        elements: Vec<DiffPoly>,
        ranking: Ranking,
    ) -> Result<(Chain, bool), CharSetError> {
        if elements.is_empty() {
            return Err(CharSetError::Empty);
        }
        let mut annotated: Vec<(DiffPoly, PolyAnatomy)> = Vec::with_capacity(elements.len());
        for (index, f) in elements.into_iter().enumerate() {
            let a = anatomy(&f, &ranking).map_err(|_| CharSetError::Leaderless {
                index,
                poly: f.to_string(),
            })?;
            annotated.push((f, a));
        }
        for i in 0..annotated.len() {
            for j in i + 1..annotated.len() {
                if annotated[i].1.leader.base == annotated[j].1.leader.base {
                    return Err(CharSetError::LeaderCollision { first: i, second: j });
                }
            }
        }
        let already_sorted = annotated
            .windows(2)
            .all(|w| ranking.compare(w[0].1.leader, w[1].1.leader) == Ordering::Less);
        annotated.sort_by(|a, b| ranking.compare(a.1.leader, b.1.leader));
        let (elements, anatomies) = annotated.into_iter().unzip();
        Ok((Chain { elements, anatomies, ranking }, !already_sorted))
    }

    /// The highest-ranked offending derivative in `f` together with the
    /// element it offends: a proper derivative of a leader, or a leader
    /// occurring at degree ≥ its element's leader degree.
    fn highest_offender(&self, f: &DiffPoly) -> Option<(DerivativeVar, usize)> {
        let mut best: Option<(DerivativeVar, usize)> = None;
        for v in f.vars() {
            for (i, a) in self.anatomies.iter().enumerate() {
                if v.base != a.leader.base {
                    continue;
                }
                let offends = if v.order > a.leader.order {
                    true
                } else {
                    v == a.leader && f.degree_in(v) >= a.leader_degree
                };
                if offends {
                    let better = match best {
                        None => true,
                        Some((b, _)) => self.ranking.compare(v, b) == Ordering::Greater,
                    };
                    if better {
                        best = Some((v, i));
                    }
                }
            }
        }
        best
    }

    /// Ritt–Kolchin reduction of `f` to a differential remainder, deriving
    /// chain elements on demand. Total: every polynomial reduces.
    pub(crate) fn diff_rem(&self, f: &DiffPoly, track_certificate: bool) -> ReductionCertificate {
        let mut cert = ReductionCertificate::unreduced(f);
        while let Some((theta, i)) = self.highest_offender(&cert.remainder) {
            let a = &self.anatomies[i];
            let k = theta.order - a.leader.order;
            let divisor = self.elements[i].derive_n(k);
            debug_assert!(
                k == 0 || divisor.lc_in(theta) == a.separant,
                "every proper derivative is led by the separant"
            );
            let (q, r, exponent) =
                prem_core(&cert.remainder, &divisor, theta, track_certificate, !track_certificate)
                    .expect("offenders occur at positive degree");
            if exponent > 0 && track_certificate {
                let multiplier = divisor.lc_in(theta).pow(exponent);
                for step in &mut cert.steps {
                    step.quotient = &step.quotient * &multiplier;
                }
                cert.steps.push(ReductionStep {
                    element: i,
                    derivative: k,
                    kind: if k == 0 { MultiplierKind::Initial } else { MultiplierKind::Separant },
                    exponent,
                    quotient: q.expect("quotient tracked"),
                });
            }
            cert.remainder = r;
        }
        cert
    }
}

/// Algebraic pseudo-remainder of `f` against a triangular list, reducing
/// from the highest leader downward. The list must be in strictly
/// increasing leader rank (as [`prolong`] returns it).
pub fn prem_chain(
    f: &DiffPoly,
    chain: &[DiffPoly],
    r: &Ranking,
) -> Result<ReductionCertificate, ReductionError> {
    let mut anatomies = Vec::with_capacity(chain.len());
    for g in chain {
        let a = anatomy(g, r).map_err(|e| ReductionError::NotTriangular {
            detail: e.to_string(),
        })?;
        anatomies.push(a);
    }
    for w in anatomies.windows(2) {
        if r.compare(w[0].leader, w[1].leader) != Ordering::Less {
            return Err(ReductionError::NotTriangular {
                detail: format!(
                    "leaders {} and {} are not strictly increasing",
                    w[0].leader, w[1].leader
                ),
            });
        }
    }
    let mut cert = ReductionCertificate::unreduced(f);
    for (i, g) in chain.iter().enumerate().rev() {
        let x = anatomies[i].leader;
        if cert.remainder.degree_in(x) < anatomies[i].leader_degree {
            continue;
        }
        let (q, rem, exponent) =
            prem_core(&cert.remainder, g, x, true, false).expect("leader degree checked positive");
        if exponent > 0 {
            let multiplier = g.lc_in(x).pow(exponent);
            for step in &mut cert.steps {
                step.quotient = &step.quotient * &multiplier;
            }
            cert.steps.push(ReductionStep {
                element: i,
                derivative: 0,
                kind: MultiplierKind::Initial,
                exponent,
                quotient: q.expect("quotient tracked"),
            });
        }
        cert.remainder = rem;
    }
    Ok(cert)
}

/// An ordered auto-reduced set presenting a prime differential ideal:
/// elements in increasing leader rank with cached anatomies.
///
/// Two construction strengths exist. [`CharSet::new`] demands full pairwise
/// reducedness — what the search algorithms assume. [`CharSet::new_weak`]
/// only demands a triangular shape (distinct leaders); order and degree
/// bounds are well-defined on such weak chains, and some published
/// characteristic sets are weak in exactly this sense.
#[derive(Clone, Debug)]
pub struct CharSet {
    chain: Chain,
    n: u32,
    strict: bool,
    warnings: Vec<String>,
}

impl CharSet {
    /// Builds a validated characteristic set over `y1..yn`: triangular,
    /// pairwise reduced, listed (or re-sorted, with a warning) in
    /// increasing rank.
    pub fn new(elements: Vec<DiffPoly>, ranking: Ranking, n: u32) -> Result<Self, CharSetError> {
        let mut set = Self::new_weak(elements, ranking, n)?;
        let report = validate_autoreduced(&set.chain.elements, &set.chain.ranking);
        if let Some(v) = report.violations.first() {
            return Err(CharSetError::NotAutoReduced {
                detail: format!("{v} ({} violation(s) total)", report.violations.len()),
            });
        }
        set.strict = true;
        Ok(set)
    }

    /// Builds a weak (triangular-only) chain: every element leads with a
    /// distinct variable, but pairwise reducedness is not enforced.
    pub fn new_weak(elements: Vec<DiffPoly>, ranking: Ranking, n: u32) -> Result<Self, CharSetError> {
        if elements.len() > n as usize {
            return Err(CharSetError::TooManyElements { count: elements.len(), n });
        }
        for f in &elements {
            for v in f.vars() {
                if let crate::dpoly::BaseVar::Y { index } = v.base {
                    if index == 0 || index > n {
                        return Err(CharSetError::VariableOutOfRange { index, n });
                    }
                }
            }
        }
        let (chain, resorted) = Chain::new_sorted(elements, ranking)?;
        let mut warnings = Vec::new();
        if resorted {
            warnings.push(
                "elements were not listed in increasing leader rank; re-sorted".to_string(),
            );
        }
        Ok(CharSet { chain, n, strict: false, warnings })
    }

    pub fn elements(&self) -> &[DiffPoly] {
        &self.chain.elements
    }

    pub fn element(&self, i: usize) -> &DiffPoly {
        &self.chain.elements[i]
    }

    pub fn anatomies(&self) -> &[PolyAnatomy] {
        &self.chain.anatomies
    }

    pub fn anatomy(&self, i: usize) -> &PolyAnatomy {
        &self.chain.anatomies[i]
    }

    pub fn ranking(&self) -> &Ranking {
        &self.chain.ranking
    }

    pub fn len(&self) -> usize {
        self.chain.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty sets
    }

    /// Ambient variable count n.
    pub fn num_vars(&self) -> u32 {
        self.n
    }

    /// Differential dimension of the presented ideal: `n − |A|`.
    pub fn dimension(&self) -> u32 {
        self.n - self.chain.elements.len() as u32
    }

    /// Order of the set: the sum of the leaders' derivation orders. Under
    /// an orderly ranking this equals the order of the presented ideal;
    /// in general it is where the order search starts.
    pub fn ord(&self) -> u32 {
        self.chain.anatomies.iter().map(|a| a.leader.order).sum()
    }

    /// Whether full pairwise reducedness was verified at construction.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub(crate) fn chain(&self) -> &Chain {
        &self.chain
    }

    /// The product of every element's initial and separant — the
    /// multiplicative set the saturation ideal is taken by.
    pub fn initial_separant_product(&self) -> DiffPoly {
        let mut product = DiffPoly::one();
        for a in &self.chain.anatomies {
            product = &product * &a.initial;
            product = &product * &a.separant;
        }
        product
    }
}

/// The prolongation `{δ^k(A_i) : 0 ≤ k ≤ h}` of every element, sorted into
/// increasing leader rank — the triangular list that turns differential
/// reduction into one algebraic chain reduction.
pub fn prolong(a: &CharSet, h: u32) -> Vec<DiffPoly> {
    let mut out: Vec<(DerivativeVar, DiffPoly)> = Vec::new();
    for (i, f) in a.elements().iter().enumerate() {
        let leader = a.anatomy(i).leader;
        let mut g = f.clone();
        for k in 0..=h {
            out.push((leader.derived(k).expect("leaders are not constants"), g.clone()));
            if k < h {
                g = g.derive();
            }
        }
    }
    out.sort_by(|(u, _), (v, _)| a.ranking().compare(*u, *v));
    out.into_iter().map(|(_, g)| g).collect()
}

/// The order-capped prolongation: derivatives `δ^k(A_i)` for
/// `0 ≤ k ≤ h − ord(A_i)` (none beyond the element itself when its leader
/// already has order ≥ h), sorted into increasing leader rank. Under an
/// orderly ranking this is exactly "every derivative of total order ≤ h".
pub fn prolong_to_order(a: &CharSet, h: u32) -> Vec<DiffPoly> {
    let mut out: Vec<(DerivativeVar, DiffPoly)> = Vec::new();
    for (i, f) in a.elements().iter().enumerate() {
        let leader = a.anatomy(i).leader;
        let cap = h.saturating_sub(leader.order);
        let mut g = f.clone();
        for k in 0..=cap {
            out.push((leader.derived(k).expect("leaders are not constants"), g.clone()));
            if k < cap {
                g = g.derive();
            }
        }
    }
    out.sort_by(|(u, _), (v, _)| a.ranking().compare(*u, *v));
    out.into_iter().map(|(_, g)| g).collect()
}

/// Ritt–Kolchin differential remainder of `f` with respect to `A`, with a
/// full certificate. The remainder is reduced w.r.t. every element of `A`.
pub fn diff_rem(f: &DiffPoly, a: &CharSet) -> ReductionCertificate {
    a.chain().diff_rem(f, true)
}

/// The differential remainder alone, skipping quotient bookkeeping — the
/// hot path of the Chow-form search, where certificates of enormous
/// intermediate polynomials would dominate the cost.
pub fn diff_rem_only(f: &DiffPoly, a: &CharSet) -> DiffPoly {
    a.chain().diff_rem(f, false).remainder
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpoly::{rat, DiffPoly};
    use crate::ranking::is_reduced;

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

    fn sum(terms: &[DiffPoly]) -> DiffPoly {
        let mut acc = DiffPoly::zero();
        for t in terms {
            acc += t;
        }
        acc
    }

    fn prod(factors: &[DiffPoly]) -> DiffPoly {
        factors.iter().fold(DiffPoly::one(), |acc, f| &acc * f)
    }

    fn linear_ode_charset() -> CharSet {
        let f = &y(1, 1) - &(&n(4) * &y(1, 0));
        CharSet::new(vec![f], Ranking::default_orderly(1), 1).unwrap()
    }

    #[test]
    fn prem_divides_a_square_by_its_root() {
        let x = DerivativeVar::y(1, 0);
        let (q, r) = algebraic_prem(&y(1, 0).pow(2), &y(1, 0), x).unwrap();
        assert_eq!(q, y(1, 0));
        assert!(r.is_zero());
    }

    #[test]
    fn prem_below_degree_is_identity() {
        let g = &y(1, 1) - &(&n(4) * &y(1, 0));
        let (q, r) = algebraic_prem(&y(1, 0), &g, DerivativeVar::y(1, 1)).unwrap();
        assert!(q.is_zero());
        assert_eq!(r, y(1, 0));
    }

    #[test]
    fn prem_identity_re_expands() {
        // 2·(y'·y + 1) = y·(2y' − y) + (y² + 2)
        let f = &(&y(1, 1) * &y(1, 0)) + &n(1);
        let g = &(&n(2) * &y(1, 1)) - &y(1, 0);
        let x = DerivativeVar::y(1, 1);
        let (q, r) = algebraic_prem(&f, &g, x).unwrap();
        assert_eq!(q, y(1, 0));
        assert_eq!(r, &y(1, 0).pow(2) + &n(2));
        let lhs = &g.lc_in(x).pow(1) * &f;
        assert_eq!(lhs, &(&q * &g) + &r);
    }

    #[test]
    fn prem_uses_the_exact_exponent() {
        // deg f − deg g = 1, so the identity carries lc(g)^2 even though one
        // division round would suffice for the generic part.
        let f = y(1, 1).pow(3);
        let g = &(&y(1, 0) * &y(1, 1)) - &n(1);
        let x = DerivativeVar::y(1, 1);
        let (q, r) = algebraic_prem(&f, &g, x).unwrap();
        let lhs = &g.lc_in(x).pow(3) * &f;
        assert_eq!(lhs, &(&q * &g) + &r);
        assert!(r.degree_in(x) < g.degree_in(x));
    }

    #[test]
    fn prem_rejects_degree_zero_divisors() {
        let err = algebraic_prem(&y(1, 1), &y(1, 0), DerivativeVar::y(1, 1));
        assert!(matches!(err, Err(ReductionError::NotUnivariateLeader { .. })));
    }

    #[test]
    fn prem_chain_kills_chain_elements() {
        let a = linear_ode_charset();
        let chain = prolong(&a, 1);
        for g in &chain {
            let cert = prem_chain(g, &chain, a.ranking()).unwrap();
            assert!(cert.remainder.is_zero());
        }
    }

    #[test]
    fn prem_chain_reduces_the_second_prolongation() {
        // y'' − 16y = (y'' − 4y') + 4(y' − 4y)
        let a = linear_ode_charset();
        let chain = prolong(&a, 1);
        let f = &y(1, 2) - &(&n(16) * &y(1, 0));
        let cert = prem_chain(&f, &chain, a.ranking()).unwrap();
        assert!(cert.remainder.is_zero());
        assert!(cert.verify(&f, &chain, a.ranking()));
    }

    #[test]
    fn prem_chain_requires_triangular_input() {
        let r = Ranking::default_orderly(1);
        let bad = vec![y(1, 1), &y(1, 1) - &y(1, 0)];
        assert!(matches!(
            prem_chain(&y(1, 0), &bad, &r),
            Err(ReductionError::NotTriangular { .. })
        ));
    }

    #[test]
    fn prolongation_of_the_linear_ode() {
        let a = linear_ode_charset();
        let chain = prolong(&a, 1);
        assert_eq!(chain.len(), 2);
        assert_eq!(chain[0], &y(1, 1) - &(&n(4) * &y(1, 0)));
        assert_eq!(chain[1], &y(1, 2) - &(&n(4) * &y(1, 1)));
        assert_eq!(prolong(&a, 0), vec![a.element(0).clone()]);
    }

    #[test]
    fn prolongation_sorts_by_leader_rank() {
        let r = Ranking::elimination(vec![1, 2]).unwrap();
        let f = &y(2, 0) - &y(1, 1);
        let a = CharSet::new(vec![f.clone()], r, 2).unwrap();
        let chain = prolong(&a, 1);
        assert_eq!(chain, vec![f.clone(), f.derive()]);
    }

    #[test]
    fn order_capped_prolongation_counts_per_element() {
        // {y1' − 1, y2 − 5} orderly: at h = 1 the first element gets no
        // derivative (its leader already has order 1), the second gets one.
        let r = Ranking::default_orderly(2);
        let a = CharSet::new(
            vec![&y(1, 1) - &n(1), &y(2, 0) - &n(5)],
            r,
            2,
        )
        .unwrap();
        let chain = prolong_to_order(&a, 1);
        assert_eq!(chain.len(), 3);
        let leaders: Vec<String> = chain
            .iter()
            .map(|g| {
                anatomy(g, a.ranking()).unwrap().leader.to_string()
            })
            .collect();
        assert_eq!(leaders, vec!["y2", "y1'", "y2'"]);
    }

    #[test]
    fn charset_construction_and_metadata() {
        let a = linear_ode_charset();
        assert_eq!(a.len(), 1);
        assert_eq!(a.dimension(), 0);
        assert_eq!(a.ord(), 1);
        assert!(a.is_strict());
        assert!(a.warnings().is_empty());

        let r = Ranking::elimination(vec![1, 2]).unwrap();
        let a = CharSet::new(vec![&y(2, 0) - &y(1, 1)], r, 2).unwrap();
        assert_eq!(a.dimension(), 1);
        assert_eq!(a.ord(), 0);
    }

    #[test]
    fn charset_rejects_structural_defects() {
        let r = Ranking::default_orderly(1);
        assert!(matches!(
            CharSet::new(vec![], r.clone(), 1),
            Err(CharSetError::Empty)
        ));
        assert!(matches!(
            CharSet::new(vec![n(3)], r.clone(), 1),
            Err(CharSetError::Leaderless { .. })
        ));
        assert!(matches!(
            CharSet::new(vec![y(1, 0), &y(1, 1) - &n(1)], r.clone(), 1),
            Err(CharSetError::TooManyElements { .. })
        ));
        let r2 = Ranking::default_orderly(2);
        assert!(matches!(
            CharSet::new(vec![y(1, 0), &y(1, 1) - &n(1)], r2.clone(), 2),
            Err(CharSetError::LeaderCollision { .. })
        ));
        assert!(matches!(
            CharSet::new(vec![y(3, 0)], r2, 2),
            Err(CharSetError::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn weak_charset_admits_the_bound_example() {
        let r = Ranking::elimination(vec![3, 2, 1]).unwrap();
        let a1 = &(&y(2, 0) * &y(3, 0)) + &n(1);
        let a2 = &(&y(1, 3) * &y(2, 3)) + &y(3, 0);
        let strict = CharSet::new(vec![a1.clone(), a2.clone()], r.clone(), 3);
        assert!(matches!(strict, Err(CharSetError::NotAutoReduced { .. })));
        let weak = CharSet::new_weak(vec![a1, a2], r, 3).unwrap();
        assert!(!weak.is_strict());
        assert_eq!(weak.dimension(), 1);
        assert_eq!(weak.ord(), 3); // leader orders 0 + 3
    }

    #[test]
    fn charset_resorts_with_a_warning() {
        let r = Ranking::default_orderly(2);
        let hi = &y(2, 1) - &y(1, 0);
        let lo = &y(1, 1) - &n(1);
        let a = CharSet::new(vec![hi.clone(), lo.clone()], r, 2).unwrap();
        assert_eq!(a.elements(), &[lo, hi]);
        assert_eq!(a.warnings().len(), 1);
    }

    #[test]
    fn diff_rem_reduces_the_worked_substitution() {
        // F1 = −c01·u0_1·y + c02·u0_1 − c03·u0_1'·y − c03·u0_1·y' + c04·u0_1'
        // reduced by {y' − 4y} collapses the y'-term into the y-term.
        let a = linear_ode_charset();
        let f1 = sum(&[
            prod(&[c(1), u(0, 1, 0), y(1, 0)]).neg(),
            prod(&[c(2), u(0, 1, 0)]),
            prod(&[c(3), u(0, 1, 1), y(1, 0)]).neg(),
            prod(&[c(3), u(0, 1, 0), y(1, 1)]).neg(),
            prod(&[c(4), u(0, 1, 1)]),
        ]);
        let cert = diff_rem(&f1, &a);
        let expected = sum(&[
            prod(&[&c(1) + &(&n(4) * &c(3)), u(0, 1, 0), y(1, 0)]).neg(),
            prod(&[c(2), u(0, 1, 0)]),
            prod(&[c(3), u(0, 1, 1), y(1, 0)]).neg(),
            prod(&[c(4), u(0, 1, 1)]),
        ]);
        assert_eq!(cert.remainder, expected);
        assert!(cert.verify(&f1, a.elements(), a.ranking()));
    }

    #[test]
    fn diff_rem_annihilates_members() {
        let a = linear_ode_charset();
        let cert = diff_rem(a.element(0), &a);
        assert!(cert.remainder.is_zero());
        // y'' reduces to 16y by applying y' = 4y twice.
        let cert = diff_rem(&y(1, 2), &a);
        assert_eq!(cert.remainder, &n(16) * &y(1, 0));
        assert!(cert.verify(&y(1, 2), a.elements(), a.ranking()));
    }

    #[test]
    fn diff_rem_output_is_reduced() {
        let r = Ranking::elimination(vec![2, 1]).unwrap();
        let f = &(&y(1, 1).pow(2) * &y(2, 2)) - &y(1, 0);
        let a = CharSet::new(vec![f.clone()], r, 2).unwrap();
        let g = &(&y(1, 3) * &y(1, 1).pow(3)) + &(&y(2, 1) * &y(1, 2));
        let cert = diff_rem(&g, &a);
        for e in a.elements() {
            assert!(is_reduced(&cert.remainder, e, a.ranking()));
        }
        assert!(cert.verify(&g, a.elements(), a.ranking()));
    }

    #[test]
    fn diff_rem_tracks_multiplier_kinds() {
        let r = Ranking::elimination(vec![2, 1]).unwrap();
        let f = &(&y(1, 1).pow(2) * &y(2, 2)) - &y(1, 0);
        let a = CharSet::new(vec![f.clone()], r, 2).unwrap();
        // Reducing the first prolongation's leader needs the separant;
        // reducing an excess power of the leader itself needs the initial.
        let cert = diff_rem(&y(1, 2), &a);
        assert!(cert
            .steps
            .iter()
            .any(|s| s.kind == MultiplierKind::Separant && s.derivative == 1));
        let cert = diff_rem(&y(1, 1).pow(5), &a);
        assert!(cert
            .steps
            .iter()
            .any(|s| s.kind == MultiplierKind::Initial && s.derivative == 0));
    }

    #[test]
    fn diff_rem_matches_chain_reduction_on_prolongations() {
        let a = linear_ode_charset();
        let f = sum(&[prod(&[y(1, 2).pow(2), y(1, 0)]), &n(3) * &y(1, 1), n(2)]);
        let via_diff = diff_rem(&f, &a);
        let via_chain = prem_chain(&f, &prolong(&a, 2), a.ranking()).unwrap();
        assert_eq!(via_diff.remainder, via_chain.remainder);
        // The zero-test path strips content as it goes, so it agrees up to
        // a scalar only.
        assert_eq!(
            diff_rem_only(&f, &a).content_normalized(),
            via_diff.remainder.content_normalized()
        );
    }

    #[test]
    fn initial_separant_product_of_the_steep_example() {
        let r = Ranking::elimination(vec![2, 1]).unwrap();
        let f = &(&y(1, 1).pow(2) * &y(2, 2)) - &y(1, 0);
        let a = CharSet::new(vec![f], r, 2).unwrap();
        // I = y2'', S = 2·y1'·y2'' → product 2·y1'·(y2'')².
        let expected = (&(&y(1, 1) * &y(2, 2)) * &y(2, 2)).scale(&rat(2));
        assert_eq!(a.initial_separant_product(), expected);
    }
}
