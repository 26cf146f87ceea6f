//! Sparse exact arithmetic for differential polynomials over the rationals.
//!
//! A differential polynomial is an ordinary multivariate polynomial whose
//! variables are *derivative symbols*: a base variable together with a
//! derivation order, written `y1''` or `u0_1^(4)`. The formal derivation δ
//! acts on symbols by bumping the order by one and extends to polynomials by
//! linearity and the Leibniz rule; rational constants derive to zero.
//!
//! Three disjoint families of base variables cover everything the search
//! algorithms manipulate:
//!
//! * `y1 .. yn` — the differential indeterminates of the input ideal,
//! * `u{i}_{j}` — the symbolic coefficients of generic hyperplanes
//!   (hyperplane `i`, coordinate `j`, with `j = 0` the inhomogeneous term),
//! * auxiliaries — the unknown coefficients `c{k}` of a linear ansatz and
//!   the scaling indeterminate λ of the homogeneity test. The `c{k}` stand
//!   for unknown rational *constants*, so δ sends them to zero; λ is a
//!   genuine differential indeterminate.
//!
//! Coefficients are arbitrary-precision rationals ([`Rat`]); there is no
//! floating point anywhere in this crate. Polynomials are immutable values:
//! every operation returns a fresh polynomial, and shared references may be
//! used freely across threads.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

/// Exact rational coefficient type used throughout the crate.
pub type Rat = BigRational;

/// An integer as an exact rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Names for the auxiliary (non-geometric) indeterminates.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AuxName {
    /// The scaling indeterminate λ of the differential-homogeneity test.
    Lambda,
    /// The unknown constant coefficient `c{k}` of a generic ansatz, 1-based.
    Coeff(u32),
}

/// A base variable: which symbol family a derivative belongs to.
///
/// The derived `Ord` — auxiliaries, then hyperplane coefficients by
/// `(hyperplane, coord)`, then indeterminates by index — combined with the
/// derivation order in [`DerivativeVar`] is the *canonical variable order*.
/// Monomial normalization, linear-system row layout, and every deterministic
/// iteration in the crate rely on it. It is unrelated to rankings, which
/// order derivatives for elimination and are configured per run.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BaseVar {
    /// Auxiliary indeterminate (ansatz coefficient or λ).
    Aux(AuxName),
    /// Hyperplane coefficient `u{i}_{j}`: hyperplane `i`, coordinate `j`
    /// (`j = 0` is the inhomogeneous term).
    U { hyperplane: u32, coord: u32 },
    /// Differential indeterminate `y{index}`, 1-based.
    Y { index: u32 },
}

impl BaseVar {
    /// Whether δ annihilates this symbol (true for the unknown constants).
    pub fn is_constant(self) -> bool {
        matches!(self, BaseVar::Aux(AuxName::Coeff(_)))
    }

    /// Whether this is one of the differential indeterminates `y{i}`.
    pub fn is_y(self) -> bool {
        matches!(self, BaseVar::Y { .. })
    }

    /// Whether this is a hyperplane coefficient `u{i}_{j}`.
    pub fn is_u(self) -> bool {
        matches!(self, BaseVar::U { .. })
    }
}

impl fmt::Display for BaseVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BaseVar::Y { index } => write!(f, "y{index}"),
            BaseVar::U { hyperplane, coord } => write!(f, "u{hyperplane}_{coord}"),
            BaseVar::Aux(AuxName::Coeff(k)) => write!(f, "c{k:02}"),
            BaseVar::Aux(AuxName::Lambda) => write!(f, "lambda"),
        }
    }
}

/// One derivative symbol: a base variable differentiated `order` times.
///
/// Two symbols are equal exactly when base and order agree. The derived
/// `Ord` extends the canonical [`BaseVar`] order by derivation order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DerivativeVar {
    pub base: BaseVar,
    pub order: u32,
}

impl DerivativeVar {
    pub fn new(base: BaseVar, order: u32) -> Self {
        DerivativeVar { base, order }
    }

    /// The symbol `y{index}` differentiated `order` times.
    pub fn y(index: u32, order: u32) -> Self {
        Self::new(BaseVar::Y { index }, order)
    }

    /// The symbol `u{hyperplane}_{coord}` differentiated `order` times.
    pub fn u(hyperplane: u32, coord: u32, order: u32) -> Self {
        Self::new(BaseVar::U { hyperplane, coord }, order)
    }

    /// The ansatz coefficient `c{k}` (always order 0: a constant).
    pub fn coeff(k: u32) -> Self {
        Self::new(BaseVar::Aux(AuxName::Coeff(k)), 0)
    }

    /// The homogeneity indeterminate λ differentiated `order` times.
    pub fn lambda(order: u32) -> Self {
        Self::new(BaseVar::Aux(AuxName::Lambda), order)
    }

    /// δ^k of this symbol; `None` when the symbol is a constant (so the
    /// derivative is the zero polynomial rather than another symbol).
    pub fn derived(self, k: u32) -> Option<Self> {
        if k == 0 {
            Some(self)
        } else if self.base.is_constant() {
            None
        } else {
            Some(Self::new(self.base, self.order + k))
        }
    }

    /// Whether this symbol is δ^k(other) for some k ≥ 1.
    pub fn is_proper_derivative_of(self, other: DerivativeVar) -> bool {
        self.base == other.base && self.order > other.order
    }
}

impl fmt::Display for DerivativeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        match self.order {
            0 => Ok(()),
            k @ 1..=3 => write!(f, "{}", "'".repeat(k as usize)),
            k => write!(f, "^({k})"),
        }
    }
}

/// Position of a symbol in the *display* order; the largest symbol prints
/// first. This order exists purely for readable output and is distinct from
/// both the canonical storage order and any ranking.
///
/// Indeterminates print before hyperplane coefficients before auxiliaries.
/// Within the indeterminates, higher derivatives print first (`y1' - 4*y1`);
/// hyperplane coefficients print lowest derivative and lowest index first
/// (`4*u0_0*u0_1 + u0_0*u0_1' - u0_1*u0_0'`), matching the conventional way
/// Chow forms are written.
pub(crate) fn display_cmp(a: &DerivativeVar, b: &DerivativeVar) -> Ordering {
    fn class(v: &DerivativeVar) -> u8 {
        match v.base {
            BaseVar::Y { .. } => 2,
            BaseVar::U { .. } => 1,
            BaseVar::Aux(_) => 0,
        }
    }
    class(a).cmp(&class(b)).then_with(|| match (a.base, b.base) {
        (BaseVar::Y { index: ia }, BaseVar::Y { index: ib }) => {
            a.order.cmp(&b.order).then(ib.cmp(&ia))
        }
        (
            BaseVar::U { hyperplane: ha, coord: ca },
            BaseVar::U { hyperplane: hb, coord: cb },
        ) => b.order.cmp(&a.order).then(hb.cmp(&ha)).then(cb.cmp(&ca)),
        (BaseVar::Aux(xa), BaseVar::Aux(xb)) => match (xa, xb) {
            (AuxName::Lambda, AuxName::Lambda) => a.order.cmp(&b.order),
            (AuxName::Lambda, AuxName::Coeff(_)) => Ordering::Greater,
            (AuxName::Coeff(_), AuxName::Lambda) => Ordering::Less,
            (AuxName::Coeff(ka), AuxName::Coeff(kb)) => kb.cmp(&ka),
        },
        _ => unreachable!("distinct classes are already ordered"),
    })
}

/// A power product of derivative symbols.
///
/// Factors are kept sorted by the canonical variable order with strictly
/// positive exponents, so equal monomials have equal representations.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    factors: Vec<(DerivativeVar, u32)>,
}

impl Monomial {
    /// The empty product (the monomial `1`).
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// The monomial consisting of a single symbol.
    pub fn var(v: DerivativeVar) -> Self {
        Monomial { factors: vec![(v, 1)] }
    }

    /// Builds a monomial from arbitrary (symbol, exponent) pairs, merging
    /// duplicates and dropping zero exponents.
    pub fn from_powers<I: IntoIterator<Item = (DerivativeVar, u32)>>(powers: I) -> Self {
        let mut map: BTreeMap<DerivativeVar, u32> = BTreeMap::new();
        for (v, e) in powers {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial { factors: map.into_iter().collect() }
    }

    /// Factors in canonical variable order, each with a positive exponent.
    pub fn factors(&self) -> &[(DerivativeVar, u32)] {
        &self.factors
    }

    pub fn total_degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_of(&self, v: DerivativeVar) -> u32 {
        self.factors
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn contains(&self, v: DerivativeVar) -> bool {
        self.degree_of(v) > 0
    }

    /// Product of two monomials.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_powers(
            self.factors.iter().chain(other.factors.iter()).copied(),
        )
    }

    /// This monomial with every power of `v` removed.
    pub fn without(&self, v: DerivativeVar) -> Monomial {
        Monomial {
            factors: self
                .factors
                .iter()
                .copied()
                .filter(|&(w, _)| w != v)
                .collect(),
        }
    }

    /// The distinct symbols occurring in this monomial.
    pub fn vars(&self) -> impl Iterator<Item = DerivativeVar> + '_ {
        self.factors.iter().map(|&(v, _)| v)
    }

    /// Factors sorted largest-first for display.
    fn display_factors(&self) -> Vec<(DerivativeVar, u32)> {
        let mut fs = self.factors.clone();
        fs.sort_by(|(a, _), (b, _)| display_cmp(b, a));
        fs
    }
}

/// Canonical monomial order: graded by total degree, ties broken by the
/// canonical factor sequence. Deterministic iteration (term storage, linear
/// system rows) uses this order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Display order on terms: lexicographic over the display symbol order.
/// The first monomial under this order is the "leading term" readers see.
pub(crate) fn display_term_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let av = a.display_factors();
    let bv = b.display_factors();
    let mut ia = av.iter();
    let mut ib = bv.iter();
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((va, ea)), Some((vb, eb))) => match display_cmp(va, vb) {
                Ordering::Equal => match ea.cmp(eb) {
                    Ordering::Equal => continue,
                    other => return other,
                },
                other => return other,
            },
        }
    }
}

/// A differential polynomial: a finite sum of monomials with nonzero exact
/// rational coefficients. The zero polynomial is the empty sum.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// A rational constant as a polynomial.
    pub fn constant(c: Rat) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    /// An integer constant as a polynomial.
    pub fn int(n: i64) -> Self {
        DiffPoly::constant(rat(n))
    }

    /// A single symbol as a polynomial.
    pub fn var(v: DerivativeVar) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(Monomial::var(v), Rat::one());
        p
    }

    /// `v^e` as a polynomial.
    pub fn var_power(v: DerivativeVar, e: u32) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(Monomial::from_powers([(v, e)]), Rat::one());
        p
    }

    /// A single term `c·m` as a polynomial.
    pub fn term(c: Rat, m: Monomial) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(m, c);
        p
    }

    /// Adds `c·m` in place, dropping the term if the coefficient cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Terms sorted for display (leading term first).
    pub fn display_terms(&self) -> Vec<(&Monomial, &Rat)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|(ma, _), (mb, _)| display_term_cmp(mb, ma));
        ts
    }

    /// The coefficient of a monomial (zero when absent).
    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The polynomial as a rational constant, if it is one.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    /// All distinct derivative symbols occurring in the polynomial.
    pub fn vars(&self) -> BTreeSet<DerivativeVar> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    /// All distinct base variables occurring in the polynomial.
    pub fn bases(&self) -> BTreeSet<BaseVar> {
        self.terms.keys().flat_map(|m| m.vars().map(|v| v.base)).collect()
    }

    pub fn contains_var(&self, v: DerivativeVar) -> bool {
        self.terms.keys().any(|m| m.contains(v))
    }

    /// Negation.
    pub fn neg(&self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Multiplication by a rational scalar.
    pub fn scale(&self, s: &Rat) -> DiffPoly {
        if s.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// Multiplication by a single monomial.
    pub fn mul_monomial(&self, m: &Monomial) -> DiffPoly {
        if m.is_one() {
            return self.clone();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    /// `self^e` by repeated squaring; `e = 0` gives the constant 1.
    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut result = DiffPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// The formal derivative δ(self), by linearity and the Leibniz rule.
    /// Symbols standing for constants (the `c{k}`) derive to zero.
    pub fn derive(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (idx, &(v, e)) in m.factors().iter().enumerate() {
                let Some(dv) = v.derived(1) else { continue };
                let mut powers: Vec<(DerivativeVar, u32)> = m.factors().to_vec();
                powers[idx].1 -= 1;
                powers.push((dv, 1));
                out.add_term(
                    Monomial::from_powers(powers),
                    c * rat(i64::from(e)),
                );
            }
        }
        out
    }

    /// δ^k(self).
    pub fn derive_n(&self, k: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.derive();
        }
        p
    }

    /// Formal partial derivative with respect to one derivative symbol.
    pub fn partial(&self, v: DerivativeVar) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.degree_of(v);
            if e == 0 {
                continue;
            }
            let mut powers: Vec<(DerivativeVar, u32)> = m.factors().to_vec();
            for p in powers.iter_mut() {
                if p.0 == v {
                    p.1 -= 1;
                }
            }
            out.add_term(Monomial::from_powers(powers), c * rat(i64::from(e)));
        }
        out
    }

    /// Largest derivation order of `base` in the polynomial; `None` encodes
    /// −∞ (the base does not occur).
    pub fn order_in(&self, base: BaseVar) -> Option<u32> {
        self.vars()
            .into_iter()
            .filter(|v| v.base == base)
            .map(|v| v.order)
            .max()
    }

    /// Largest derivation order over all differential indeterminates
    /// `y{i}`; `None` encodes −∞ (no indeterminate occurs).
    pub fn order(&self) -> Option<u32> {
        self.vars()
            .into_iter()
            .filter(|v| v.base.is_y())
            .map(|v| v.order)
            .max()
    }

    /// Largest derivation order over *all* symbols (λ and `u`s included).
    pub fn order_any(&self) -> Option<u32> {
        self.vars().into_iter().map(|v| v.order).max()
    }

    /// Total degree; `None` encodes −∞ (the zero polynomial).
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Degree in one derivative symbol (0 when absent).
    pub fn degree_in(&self, v: DerivativeVar) -> u32 {
        self.terms.keys().map(|m| m.degree_of(v)).max().unwrap_or(0)
    }

    /// The coefficient of `v^k`, viewing the polynomial in the symbol `v`:
    /// the sum of all terms with exactly `v^k`, with that power removed.
    pub fn coeff_of(&self, v: DerivativeVar, k: u32) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            if m.degree_of(v) == k {
                out.add_term(m.without(v), c.clone());
            }
        }
        out
    }

    /// Leading coefficient in the symbol `v` (the whole polynomial when `v`
    /// is absent, matching degree 0).
    pub fn lc_in(&self, v: DerivativeVar) -> DiffPoly {
        self.coeff_of(v, self.degree_in(v))
    }

    /// Replaces each symbol listed in `map` by its image polynomial and
    /// expands. Only the listed symbols are touched: images are *not*
    /// chased recursively, and derivatives of listed symbols are replaced
    /// only if listed themselves.
    pub fn substitute(&self, map: &BTreeMap<DerivativeVar, DiffPoly>) -> DiffPoly {
        let mut power_cache: BTreeMap<(DerivativeVar, u32), DiffPoly> = BTreeMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut kept: Vec<(DerivativeVar, u32)> = Vec::new();
            let mut image: Option<DiffPoly> = None;
            for &(v, e) in m.factors() {
                if let Some(img) = map.get(&v) {
                    let p = power_cache
                        .entry((v, e))
                        .or_insert_with(|| img.pow(e));
                    image = Some(match image {
                        None => p.clone(),
                        Some(acc) => &acc * &*p,
                    });
                } else {
                    kept.push((v, e));
                }
            }
            let kept = Monomial::from_powers(kept);
            match image {
                None => out.add_term(kept, c.clone()),
                Some(img) => {
                    let contribution = img.mul_monomial(&kept).scale(c);
                    out += &contribution;
                }
            }
        }
        out
    }

    /// Rescales in place to integer coefficients of content 1 (sign left
    /// alone). Zero-tests and rank computations are invariant under this,
    /// so reduction paths that do not track certificates use it to keep
    /// pseudo-division coefficients from compounding.
    pub(crate) fn strip_content_in_place(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            if !c.denom().is_one() {
                den_lcm = den_lcm.lcm(c.denom());
            }
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(&(c.numer() * &den_lcm / c.denom()));
            if num_gcd.is_one() {
                break;
            }
        }
        if den_lcm.is_one() && num_gcd.is_one() {
            return;
        }
        let s = Rat::new(den_lcm, num_gcd);
        for c in self.terms.values_mut() {
            *c = &*c * &s;
        }
    }

    /// The canonical scalar normalization: integer coefficients with
    /// content 1 and a positive leading (first-displayed) term. Returns the
    /// zero polynomial unchanged.
    pub fn content_normalized(&self) -> DiffPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(&(c.numer() * &den_lcm / c.denom()));
        }
        let mut out = self.scale(&Rat::new(den_lcm, num_gcd));
        let lead_negative = out
            .display_terms()
            .first()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        if lead_negative {
            out = out.neg();
        }
        out
    }
}

impl std::ops::AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl std::ops::SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl std::ops::Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl std::ops::Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl std::ops::Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        // Iterate over the smaller operand's terms in the outer loop.
        let (outer, inner) = if self.terms.len() <= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = DiffPoly::zero();
        for (ma, ca) in &outer.terms {
            for (mb, cb) in &inner.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl std::ops::Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly::neg(self)
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (pos, (m, c)) in self.display_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            if pos == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if m.is_one() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                for (i, (v, e)) in m.display_factors().into_iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{v}")?;
                    if e > 1 {
                        write!(f, "^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
