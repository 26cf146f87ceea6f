//! Rankings on derivative symbols, and the ranking-dependent anatomy of a
//! differential polynomial: leader, initial, separant, reducedness.
//!
//! A *ranking* is a total order on the derivatives `y{i}^(k)` satisfying two
//! axioms: `δα > α` for every derivative `α`, and `α > β ⇒ δα > δβ`. Every
//! ranking used here is described finitely by the *block* family —
//! elimination between ordered blocks of variables, orderly within a block —
//! whose two extremes are the classical families:
//!
//! * **orderly**: higher derivation order always ranks higher, with a fixed
//!   variable order breaking ties (one block containing every variable);
//! * **elimination**: a later-listed variable and all of its derivatives
//!   rank above every derivative of an earlier-listed one (all blocks of
//!   size one).
//!
//! Hyperplane coefficients `u{i}_{j}` and auxiliaries are ranked below every
//! indeterminate `y{i}` so that mixed polynomials can be eliminated against
//! chains with `y`-leaders. The mutual order of the `u`-symbols is
//! irrelevant there, but the verification ladder reduces against a chain
//! *led* by a `u`-derivative; [`Ranking::chow_chain`] selects the order it
//! needs (`u{d}_0 ≺ … ≺ u0_0 ≺ y1`, zero-coordinate symbols on top).

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::dpoly::{AuxName, BaseVar, DerivativeVar, DiffPoly};

/// Errors from ranking construction and anatomy queries.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RankingError {
    /// The variable listing is not a permutation of `y1..yn`.
    #[error("ranking must list each of y1..y{n} exactly once ({detail})")]
    InvalidVariableList { n: u32, detail: String },
    /// Anatomy was requested for a polynomial with no ranked variable.
    #[error("polynomial has no leader: no ranked variable occurs in {poly}")]
    NoLeader { poly: String },
}

/// The ranking family, over the declared indeterminates.
#[derive(Clone, Debug, PartialEq, Eq)]
enum RankKind {
    /// Ordered blocks of y-indices, lowest block first; elimination between
    /// blocks, orderly inside each block.
    Blocks(Vec<Vec<u32>>),
}

/// How the hyperplane coefficients compare among themselves (always below
/// every `y`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum UPolicy {
    /// Elimination by (hyperplane, coordinate), lowest pair ranked lowest.
    /// The choice never influences results reduced against `y`-led chains;
    /// it only needs to be deterministic.
    Standard,
    /// The verification-ladder order: every zero-coordinate symbol above
    /// every nonzero-coordinate one, zero-coordinate symbols by *descending*
    /// hyperplane (`u0_0` on top), the rest by (hyperplane, coordinate).
    ChowChain,
}

/// A decidable ranking: total order on derivative symbols satisfying the
/// two ranking axioms. Immutable; cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    kind: RankKind,
    /// Human-readable flavor retained for serialization.
    family: Family,
    /// `positions[i]` = (block, slot) of `y{i+1}`.
    positions: Vec<(u32, u32)>,
    n: u32,
    u_policy: UPolicy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Orderly,
    Elimination,
    Block,
}

fn check_permutation(n: u32, listed: &[u32]) -> Result<(), RankingError> {
    let mut seen = vec![false; n as usize + 1];
    for &i in listed {
        if i == 0 || i > n {
            return Err(RankingError::InvalidVariableList {
                n,
                detail: format!("y{i} is out of range"),
            });
        }
        if seen[i as usize] {
            return Err(RankingError::InvalidVariableList {
                n,
                detail: format!("y{i} listed twice"),
            });
        }
        seen[i as usize] = true;
    }
    if listed.len() != n as usize {
        return Err(RankingError::InvalidVariableList {
            n,
            detail: format!("{} of {} variables listed", listed.len(), n),
        });
    }
    Ok(())
}

impl Ranking {
    fn build(blocks: Vec<Vec<u32>>, family: Family, u_policy: UPolicy) -> Result<Self, RankingError> {
        let listed: Vec<u32> = blocks.iter().flatten().copied().collect();
        let n = listed.iter().copied().max().unwrap_or(0);
        check_permutation(n, &listed)?;
        let mut positions = vec![(0u32, 0u32); n as usize];
        for (b, block) in blocks.iter().enumerate() {
            for (s, &i) in block.iter().enumerate() {
                positions[i as usize - 1] = (b as u32, s as u32);
            }
        }
        Ok(Ranking {
            kind: RankKind::Blocks(blocks),
            family,
            positions,
            n,
            u_policy: UPolicy::Standard,
        }
        .with_policy(u_policy))
    }

    fn with_policy(mut self, u_policy: UPolicy) -> Self {
        self.u_policy = u_policy;
        self
    }

    /// Orderly ranking with the given tie-break order, lowest first.
    pub fn orderly(vars: Vec<u32>) -> Result<Self, RankingError> {
        Self::build(vec![vars], Family::Orderly, UPolicy::Standard)
    }

    /// Elimination ranking, lowest variable first.
    pub fn elimination(vars: Vec<u32>) -> Result<Self, RankingError> {
        Self::build(
            vars.into_iter().map(|v| vec![v]).collect(),
            Family::Elimination,
            UPolicy::Standard,
        )
    }

    /// Block ranking: elimination between blocks (lowest first), orderly
    /// within each block.
    pub fn block(blocks: Vec<Vec<u32>>) -> Result<Self, RankingError> {
        Self::build(blocks, Family::Block, UPolicy::Standard)
    }

    /// The default orderly ranking `orderly(y1<…<yn)`.
    pub fn default_orderly(n: u32) -> Self {
        Self::orderly((1..=n).collect()).expect("1..=n is a permutation")
    }

    /// The ranking the verification ladder reduces under: elimination
    /// `y1 < … < yn` with every `u` below `y1`, ordered so that `u0_0`
    /// leads the zero-coordinate block (`u{d}_0 ≺ … ≺ u0_0 ≺ y1`).
    pub fn chow_chain(n: u32) -> Self {
        Self::build(
            (1..=n).map(|v| vec![v]).collect(),
            Family::Elimination,
            UPolicy::ChowChain,
        )
        .expect("1..=n is a permutation")
    }

    /// Number of declared indeterminates.
    pub fn num_vars(&self) -> u32 {
        self.n
    }

    /// Whether higher derivation order always implies higher rank. True
    /// exactly when a single block holds every variable (or only one
    /// variable is declared).
    pub fn is_orderly(&self) -> bool {
        let RankKind::Blocks(blocks) = &self.kind;
        blocks.len() <= 1 || self.n <= 1
    }

    fn y_position(&self, index: u32) -> (u32, u32) {
        assert!(
            index >= 1 && index <= self.n,
            "y{index} is not declared in this ranking (n = {})",
            self.n
        );
        self.positions[index as usize - 1]
    }

    /// Total order on derivative symbols. Indeterminates compare by the
    /// configured ranking; every `u` ranks below every `y`, auxiliaries
    /// below everything (they never lead).
    pub fn compare(&self, a: DerivativeVar, b: DerivativeVar) -> Ordering {
        fn class(v: DerivativeVar) -> u8 {
            match v.base {
                BaseVar::Y { .. } => 2,
                BaseVar::U { .. } => 1,
                BaseVar::Aux(_) => 0,
            }
        }
        class(a).cmp(&class(b)).then_with(|| match (a.base, b.base) {
            (BaseVar::Y { index: ia }, BaseVar::Y { index: ib }) => {
                let (block_a, slot_a) = self.y_position(ia);
                let (block_b, slot_b) = self.y_position(ib);
                block_a
                    .cmp(&block_b)
                    .then(a.order.cmp(&b.order))
                    .then(slot_a.cmp(&slot_b))
            }
            (
                BaseVar::U { hyperplane: ha, coord: ca },
                BaseVar::U { hyperplane: hb, coord: cb },
            ) => match self.u_policy {
                UPolicy::Standard => {
                    (ha, ca).cmp(&(hb, cb)).then(a.order.cmp(&b.order))
                }
                UPolicy::ChowChain => {
                    let zero_a = ca == 0;
                    let zero_b = cb == 0;
                    zero_a
                        .cmp(&zero_b)
                        .then_with(|| {
                            if zero_a && zero_b {
                                hb.cmp(&ha)
                            } else {
                                (ha, ca).cmp(&(hb, cb))
                            }
                        })
                        .then(a.order.cmp(&b.order))
                }
            },
            (BaseVar::Aux(xa), BaseVar::Aux(xb)) => match (xa, xb) {
                (AuxName::Lambda, AuxName::Lambda) => a.order.cmp(&b.order),
                (AuxName::Lambda, AuxName::Coeff(_)) => Ordering::Greater,
                (AuxName::Coeff(_), AuxName::Lambda) => Ordering::Less,
                (AuxName::Coeff(ka), AuxName::Coeff(kb)) => ka.cmp(&kb),
            },
            _ => unreachable!("distinct classes are already ordered"),
        })
    }

    /// The ranking-greatest symbol of `f` that is allowed to lead: an
    /// indeterminate derivative, or (for the ladder's chains) a hyperplane
    /// coefficient. Auxiliaries never lead.
    pub(crate) fn leader_of(&self, f: &DiffPoly) -> Option<DerivativeVar> {
        f.vars()
            .into_iter()
            .filter(|v| !matches!(v.base, BaseVar::Aux(_)))
            .max_by(|&a, &b| self.compare(a, b))
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let RankKind::Blocks(blocks) = &self.kind;
        match self.family {
            Family::Orderly => {
                let vars: Vec<String> =
                    blocks[0].iter().map(|i| format!("y{i}")).collect();
                write!(f, "orderly({})", vars.join("<"))
            }
            Family::Elimination => {
                let vars: Vec<String> =
                    blocks.iter().map(|b| format!("y{}", b[0])).collect();
                write!(f, "elim({})", vars.join("<"))
            }
            Family::Block => {
                let bs: Vec<String> = blocks
                    .iter()
                    .map(|b| {
                        let vars: Vec<String> =
                            b.iter().map(|i| format!("y{i}")).collect();
                        format!("[{}]", vars.join(","))
                    })
                    .collect();
                write!(f, "block({})", bs.join("<"))
            }
        }
    }
}

/// The ranking-dependent anatomy of a differential polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyAnatomy {
    /// The ranking-greatest ranked symbol occurring in the polynomial.
    pub leader: DerivativeVar,
    /// Leading coefficient of the polynomial viewed in its leader.
    pub initial: DiffPoly,
    /// Formal partial derivative with respect to the leader.
    pub separant: DiffPoly,
    /// Degree of the polynomial in its leader.
    pub leader_degree: u32,
}

/// Computes leader, initial, separant, and leader degree of `f` under `r`.
///
/// Errors with [`RankingError::NoLeader`] when no ranked symbol occurs
/// (`f` is constant up to auxiliaries).
pub fn anatomy(f: &DiffPoly, r: &Ranking) -> Result<PolyAnatomy, RankingError> {
    let leader = r.leader_of(f).ok_or_else(|| RankingError::NoLeader {
        poly: f.to_string(),
    })?;
    let leader_degree = f.degree_in(leader);
    Ok(PolyAnatomy {
        leader,
        initial: f.coeff_of(leader, leader_degree),
        separant: f.partial(leader),
        leader_degree,
    })
}

/// Whether `f` is reduced with respect to `g`: `f` contains no proper
/// derivative of `ld(g)`, and `deg(f, ld(g)) < deg(g, ld(g))`.
///
/// # Panics
/// When `g` has no leader (callers guarantee it does).
pub fn is_reduced(f: &DiffPoly, g: &DiffPoly, r: &Ranking) -> bool {
    let g_anatomy = anatomy(g, r).expect("g has a leader");
    let no_proper_derivative = f
        .vars()
        .into_iter()
        .all(|v| !v.is_proper_derivative_of(g_anatomy.leader));
    no_proper_derivative && f.degree_in(g_anatomy.leader) < g_anatomy.leader_degree
}

/// Why a pair of a would-be auto-reduced set fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReducednessViolation {
    /// Element `element` contains `witness`, a proper derivative of
    /// `against`'s leader.
    ProperDerivative {
        element: usize,
        against: usize,
        witness: DerivativeVar,
    },
    /// Element `element` has degree ≥ `against`'s leader degree in
    /// `against`'s leader.
    ExcessDegree {
        element: usize,
        against: usize,
        leader: DerivativeVar,
        found: u32,
        allowed_below: u32,
    },
}

impl fmt::Display for ReducednessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReducednessViolation::ProperDerivative { element, against, witness } => {
                write!(
                    f,
                    "element #{element} contains {witness}, a proper derivative of element #{against}'s leader"
                )
            }
            ReducednessViolation::ExcessDegree { element, against, leader, found, allowed_below } => {
                write!(
                    f,
                    "element #{element} has degree {found} in {leader}; reducedness w.r.t. element #{against} requires degree < {allowed_below}"
                )
            }
        }
    }
}

/// Outcome of [`validate_autoreduced`]. Indices refer to the listing order
/// of the input set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AutoReducedReport {
    /// Elements with no ranked symbol at all (cannot sit in a chain).
    pub leaderless: Vec<usize>,
    /// Pairs of elements whose leaders share a base variable.
    pub leader_collisions: Vec<(usize, usize)>,
    /// All ordered-pair reducedness failures.
    pub violations: Vec<ReducednessViolation>,
    /// The listing was not in increasing leader rank; downstream
    /// constructors re-sort and warn rather than reject.
    pub out_of_order: bool,
}

impl AutoReducedReport {
    /// Fully auto-reduced, correctly ordered, structurally sound.
    pub fn is_ok(&self) -> bool {
        self.leaderless.is_empty()
            && self.leader_collisions.is_empty()
            && self.violations.is_empty()
            && !self.out_of_order
    }

    /// Structurally usable as a triangular chain (distinct leaders), even
    /// if full pairwise reducedness fails. Order/degree-bound queries accept
    /// such "weak" chains; the Chow search demands `is_ok`.
    pub fn is_triangular(&self) -> bool {
        self.leaderless.is_empty() && self.leader_collisions.is_empty()
    }
}

/// Checks every ordered pair of `set` for reducedness, leader-distinctness,
/// and increasing-rank listing. Never errors: all findings go in the report.
pub fn validate_autoreduced(set: &[DiffPoly], r: &Ranking) -> AutoReducedReport {
    let mut report = AutoReducedReport::default();
    let mut anatomies: Vec<Option<PolyAnatomy>> = Vec::with_capacity(set.len());
    for (i, f) in set.iter().enumerate() {
        match anatomy(f, r) {
            Ok(a) => anatomies.push(Some(a)),
            Err(_) => {
                report.leaderless.push(i);
                anatomies.push(None);
            }
        }
    }
    for i in 0..set.len() {
        for j in 0..set.len() {
            if i == j {
                continue;
            }
            let (Some(ai), Some(aj)) = (&anatomies[i], &anatomies[j]) else {
                continue;
            };
            if i < j && ai.leader.base == aj.leader.base {
                report.leader_collisions.push((i, j));
                continue;
            }
            // Reducedness of element i against element j's leader.
            if let Some(witness) = set[i]
                .vars()
                .into_iter()
                .filter(|v| v.is_proper_derivative_of(aj.leader))
                .max_by(|&a, &b| r.compare(a, b))
            {
                report.violations.push(ReducednessViolation::ProperDerivative {
                    element: i,
                    against: j,
                    witness,
                });
            }
            let found = set[i].degree_in(aj.leader);
            if found >= aj.leader_degree {
                report.violations.push(ReducednessViolation::ExcessDegree {
                    element: i,
                    against: j,
                    leader: aj.leader,
                    found,
                    allowed_below: aj.leader_degree,
                });
            }
        }
    }
    for w in anatomies.windows(2) {
        if let [Some(a), Some(b)] = w {
            if r.compare(a.leader, b.leader) != Ordering::Less {
                report.out_of_order = true;
            }
        }
    }
    report
}
