//! Text grammar for differential polynomials, canonical formatting, the
//! problem-file format, and trace serialization.
//!
//! # Grammar
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor ('*' factor)*            -- implicit multiplication is an error
//! factor   := atom ['^' power]
//! atom     := number | variable | '(' expr ')'
//! number   := digits ['/' digits]             -- exact rationals
//! variable := ident primes | ident '^(' digits ')'
//! ident    := 'y' digits | 'u' digits '_' digits
//! power    := digits | '(' digits ')'
//! ```
//!
//! `y1^(k)` (parenthesized, directly on an unprimed variable) is the
//! order-`k` derivative; `y1^k` and `(…)^k` are powers. Mixing primes
//! with `^(k)` on one symbol is rejected rather than guessed at.
//! Whitespace is free between tokens. Characteristic-set input admits
//! `y`-variables only; Chow-form expressions (`verify --chow`) admit
//! `u`-variables only — the `u{i}_{j}` naming matches this library's
//! output exactly.

use std::fmt;

use num::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::chow::{ChowResult, TraceEntry};
use crate::dpoly::{BaseVar, DerivativeVar, DiffPoly, Rat};
use crate::ranking::Ranking;
use crate::reduction::{CharSet, CharSetError};

/// Parse failures, with byte positions into the source text.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at byte {position}: {detail}")]
    UnknownVariable { position: usize, name: String, detail: String },
    #[error("negative exponent at byte {position}")]
    NegativeExponent { position: usize },
}

/// Which indeterminates a parse admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarMode {
    /// `y1..yn` only — characteristic-set input.
    YOnly { n: u32 },
    /// `u{i}_{j}` only — Chow-form expressions for verification.
    UOnly,
}

/// Parses a differential polynomial in the indeterminates `y1..yn`.
pub fn parse_diffpoly(text: &str, n: u32) -> Result<DiffPoly, ParseError> {
    Parser::new(text, VarMode::YOnly { n }).parse()
}

/// Parses a Chow-form expression in the hyperplane coefficients
/// `u{i}_{j}` (the library's own output naming).
pub fn parse_uform(text: &str) -> Result<DiffPoly, ParseError> {
    Parser::new(text, VarMode::UOnly).parse()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    mode: VarMode,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, mode: VarMode) -> Self {
        Parser { src: text.as_bytes(), pos: 0, mode }
    }

    fn parse(mut self) -> Result<DiffPoly, ParseError> {
        let e = self.expr()?;
        self.skip_ws();
        match self.peek() {
            None => Ok(e),
            Some(c) => Err(self.err(format!("unexpected `{}` after expression", c as char))),
        }
    }

    fn err(&self, message: String) -> ParseError {
        ParseError::Syntax { position: self.pos, message }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, what: &str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}` {what}", c as char)))
        }
    }

    /// Reads a `u32` after skipping whitespace (token-boundary position).
    fn digits(&mut self, what: &str) -> Result<(u32, usize), ParseError> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            return Err(ParseError::NegativeExponent { position: self.pos });
        }
        self.digits_tight(what)
    }

    /// Reads a `u32` with no leading whitespace — for positions inside a
    /// single token, like the index digits of `y12`.
    fn digits_tight(&mut self, what: &str) -> Result<(u32, usize), ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(format!("expected {what}")));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<u32>()
            .map(|v| (v, start))
            .map_err(|_| ParseError::Syntax {
                position: start,
                message: format!("{what} `{text}` does not fit in 32 bits"),
            })
    }

    fn expr(&mut self) -> Result<DiffPoly, ParseError> {
        self.skip_ws();
        let mut acc = if self.eat(b'-') { self.term()?.neg() } else { self.term()? };
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                // A factor directly followed by another atom means the `*`
                // was left out — reject with a pointed message.
                Some(c) if c.is_ascii_alphanumeric() || c == b'(' => {
                    return Err(self.err(
                        "implicit multiplication is not allowed; write `*`".to_string(),
                    ));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<DiffPoly, ParseError> {
        let (base, was_plain_var) = self.atom()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        // `^(k)` directly on an unprimed variable was already consumed by
        // the atom as derivative syntax; reaching here, `^` is a power.
        let _ = was_plain_var;
        self.pos += 1;
        self.skip_ws();
        let e = if self.eat(b'(') {
            let (e, _) = self.digits("exponent")?;
            self.expect(b')', "to close the exponent")?;
            e
        } else {
            self.digits("exponent")?.0
        };
        Ok(base.pow(e))
    }

    /// One atom; the flag reports whether it was a bare variable (so the
    /// caller knows `^(k)` was already handled as derivative syntax).
    fn atom(&mut self) -> Result<(DiffPoly, bool), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')', "to close the group")?;
                Ok((e, false))
            }
            Some(c) if c.is_ascii_digit() => Ok((self.number()?, false)),
            Some(b'y') | Some(b'u') => Ok((self.variable()?, true)),
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
            None => Err(self.err("unexpected end of input".to_string())),
        }
    }

    fn number(&mut self) -> Result<DiffPoly, ParseError> {
        let numer = self.integer("number")?;
        self.skip_ws();
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let denom_pos = self.pos;
            let denom = self.integer("denominator")?;
            if denom == BigInt::from(0) {
                return Err(ParseError::Syntax {
                    position: denom_pos,
                    message: "denominator is zero".to_string(),
                });
            }
            Ok(DiffPoly::constant(Rat::new(numer, denom)))
        } else {
            Ok(DiffPoly::constant(Rat::from_integer(numer)))
        }
    }

    fn integer(&mut self, what: &str) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(format!("expected {what}")));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse::<BigInt>().expect("digit strings parse"))
    }

    fn variable(&mut self) -> Result<DiffPoly, ParseError> {
        let start = self.pos;
        let kind = self.peek().expect("caller checked");
        self.pos += 1;
        let base = if kind == b'y' {
            let (index, _) = self.digits_tight("a variable index after `y`")?;
            match self.mode {
                VarMode::YOnly { n } if (1..=n).contains(&index) => BaseVar::Y { index },
                VarMode::YOnly { n } => {
                    return Err(ParseError::UnknownVariable {
                        position: start,
                        name: format!("y{index}"),
                        detail: format!("declared variables are y1..y{n}"),
                    });
                }
                VarMode::UOnly => {
                    return Err(ParseError::UnknownVariable {
                        position: start,
                        name: format!("y{index}"),
                        detail: "Chow-form expressions use u-variables only".to_string(),
                    });
                }
            }
        } else {
            let (hyperplane, _) = self.digits_tight("a hyperplane index after `u`")?;
            if self.peek() != Some(b'_') {
                return Err(self.err("expected `_` in a u-variable (naming is u{i}_{j})".into()));
            }
            self.pos += 1;
            let (coord, _) = self.digits_tight("a coordinate index after `_`")?;
            match self.mode {
                VarMode::UOnly => BaseVar::U { hyperplane, coord },
                VarMode::YOnly { .. } => {
                    return Err(ParseError::UnknownVariable {
                        position: start,
                        name: format!("u{hyperplane}_{coord}"),
                        detail: "characteristic sets are polynomials in y-variables only"
                            .to_string(),
                    });
                }
            }
        };
        // Derivative decoration: primes, or one parenthesized `^(k)`.
        let mut order = 0u32;
        while self.peek() == Some(b'\'') {
            self.pos += 1;
            order += 1;
        }
        if order == 0 && self.looking_at_paren_caret() {
            self.pos += 1; // ^
            self.pos += 1; // (
            let (k, _) = self.digits("a derivative order")?;
            self.expect(b')', "to close the derivative order")?;
            order = k;
        } else if order > 0 && self.looking_at_paren_caret() {
            return Err(self.err(
                "mixed derivative notation: use primes or ^(k), not both".to_string(),
            ));
        }
        Ok(DiffPoly::var(DerivativeVar { base, order }))
    }

    /// True when the next tokens are literally `^(` (no whitespace skip on
    /// the `^` — it binds to the variable like a suffix).
    fn looking_at_paren_caret(&self) -> bool {
        self.src.get(self.pos) == Some(&b'^') && self.src.get(self.pos + 1) == Some(&b'(')
    }
}

/// Output styles for [`format_diffpoly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatStyle {
    /// The input grammar, canonical monomial order (the `Display` form).
    Plain,
    /// A JSON array of terms `{coefficient, factors: [{block, …, order,
    /// exponent}]}` in the same canonical order.
    Json,
}

/// Formats a polynomial; `Plain` round-trips through the parser.
pub fn format_diffpoly(f: &DiffPoly, style: FormatStyle) -> String {
    match style {
        FormatStyle::Plain => f.to_string(),
        FormatStyle::Json => {
            let terms: Vec<serde_json::Value> = f
                .display_terms()
                .iter()
                .map(|(m, c)| {
                    let factors: Vec<serde_json::Value> = m
                        .factors()
                        .iter()
                        .map(|(v, e)| match v.base {
                            BaseVar::Y { index } => json!({
                                "block": "y",
                                "index": index,
                                "order": v.order,
                                "exponent": e,
                            }),
                            BaseVar::U { hyperplane, coord } => json!({
                                "block": "u",
                                "hyperplane": hyperplane,
                                "coord": coord,
                                "order": v.order,
                                "exponent": e,
                            }),
                            BaseVar::Aux(_) => json!({
                                "block": "aux",
                                "name": v.to_string(),
                                "order": v.order,
                                "exponent": e,
                            }),
                        })
                        .collect();
                    json!({ "coefficient": c.to_string(), "factors": factors })
                })
                .collect();
            serde_json::Value::Array(terms).to_string()
        }
    }
}

/// Frontend-level failures: bad expressions, bad rankings, or a polynomial
/// list that is not a characteristic set.
#[derive(Error, Debug)]
pub enum FrontendError {
    #[error("in `{context}`: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error("invalid ranking `{text}`: {message}")]
    Ranking { text: String, message: String },
    #[error(transparent)]
    CharSet(#[from] CharSetError),
}

/// Parses a ranking description: `orderly` (the default y1<…<yn order),
/// `orderly(y2<y1<…)`, `elim(y1<y2<…)` (lowest first), or
/// `block([y1,y2]<[y3])`. The listed variables must be exactly `y1..yn`.
pub fn parse_ranking(text: &str, n: u32) -> Result<Ranking, FrontendError> {
    let bad = |message: String| FrontendError::Ranking { text: text.to_string(), message };
    let trimmed = text.trim();
    let ranking = if trimmed == "orderly" {
        Ok(Ranking::default_orderly(n))
    } else if let Some(inner) = enclosed(trimmed, "orderly") {
        Ranking::orderly(parse_y_list(inner, "<").map_err(&bad)?)
    } else if let Some(inner) = enclosed(trimmed, "elim") {
        Ranking::elimination(parse_y_list(inner, "<").map_err(&bad)?)
    } else if let Some(inner) = enclosed(trimmed, "block") {
        let mut blocks = Vec::new();
        for part in inner.split('<') {
            let part = part.trim();
            let body = part
                .strip_prefix('[')
                .and_then(|p| p.strip_suffix(']'))
                .ok_or_else(|| bad(format!("block `{part}` must be bracketed like [y1,y2]")))?;
            blocks.push(parse_y_list(body, ",").map_err(&bad)?);
        }
        Ranking::block(blocks)
    } else {
        return Err(bad(
            "expected orderly, orderly(...), elim(...), or block([...]<[...])".to_string(),
        ));
    }
    .map_err(|e| bad(e.to_string()))?;
    if ranking.num_vars() != n {
        return Err(bad(format!(
            "ranking lists {} variables but the problem declares n = {n}",
            ranking.num_vars()
        )));
    }
    Ok(ranking)
}

fn enclosed<'a>(text: &'a str, keyword: &str) -> Option<&'a str> {
    text.strip_prefix(keyword)?
        .trim_start()
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn parse_y_list(text: &str, sep: &str) -> Result<Vec<u32>, String> {
    text.split(sep)
        .map(|part| {
            let part = part.trim();
            part.strip_prefix('y')
                .and_then(|digits| digits.parse::<u32>().ok())
                .ok_or_else(|| format!("`{part}` is not a y-variable"))
        })
        .collect()
}

/// A problem file: the variable count, a ranking description, the
/// characteristic set as expressions, and optional run controls.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub n: u32,
    pub ranking: String,
    pub char_set: Vec<String>,
    #[serde(default, skip_serializing_if = "ProblemOptions::is_default")]
    pub options: ProblemOptions,
}

/// Optional run controls carried inside a problem file; command-line
/// flags override them.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq, Default)]
pub struct ProblemOptions {
    /// `1`, `2`, `3`, or `auto`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    /// Ansatz width budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_columns: Option<u64>,
    /// Report bounds only; skip the search.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub bounds_only: bool,
}

impl ProblemOptions {
    fn is_default(&self) -> bool {
        *self == ProblemOptions::default()
    }
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Parses and assembles the characteristic set a problem file describes.
/// Sets that are triangular but not fully auto-reduced are admitted with
/// a warning (order and degree bounds remain valid for them).
pub fn compile_charset(spec: &ProblemSpec) -> Result<(CharSet, Vec<String>), FrontendError> {
    let ranking = parse_ranking(&spec.ranking, spec.n)?;
    let mut elements = Vec::with_capacity(spec.char_set.len());
    for text in &spec.char_set {
        let poly = parse_diffpoly(text, spec.n).map_err(|source| FrontendError::Parse {
            context: text.clone(),
            source,
        })?;
        elements.push(poly);
    }
    let mut warnings = Vec::new();
    let charset = match CharSet::new(elements.clone(), ranking.clone(), spec.n) {
        Ok(cs) => cs,
        Err(CharSetError::NotAutoReduced { detail }) => {
            warnings.push(format!(
                "the set is triangular but not fully auto-reduced ({detail}); \
                 proceeding with the weak chain"
            ));
            CharSet::new_weak(elements, ranking, spec.n)?
        }
        Err(e) => return Err(e.into()),
    };
    warnings.extend(charset.warnings().iter().cloned());
    Ok((charset, warnings))
}

/// One line of the JSONL trace stream.
pub fn trace_line(e: &TraceEntry) -> String {
    json!({
        "h": e.h,
        "t": e.t,
        "rows": e.rows,
        "cols": e.cols,
        "nullity": e.nullity,
        "verdict": e.verdict.to_string(),
    })
    .to_string()
}

/// Renders a search result for the terminal or as a JSON document.
pub fn render_result(r: &ChowResult, json: bool) -> String {
    if json {
        let mut doc = json!({
            "chow_form": format_diffpoly(&r.chow_form, FormatStyle::Plain),
            "terms": serde_json::from_str::<serde_json::Value>(
                &format_diffpoly(&r.chow_form, FormatStyle::Json)
            ).expect("own output parses"),
            "order": r.order,
            "total_degree": r.total_degree,
            "per_block_degree": r.per_block_degree,
            "dimension": r.dimension,
            "ideal_order": r.ideal_order,
            "cells_examined": r.trace.len(),
        });
        if !r.warnings.is_empty() {
            doc["warnings"] = json!(r.warnings);
        }
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    } else {
        let mut out = String::new();
        out.push_str(&format!("chow_form: {}\n", r.chow_form));
        out.push_str(&format!("order: {}\n", r.order));
        out.push_str(&format!("total_degree: {}\n", r.total_degree));
        out.push_str(&format!("per_block_degree: {}\n", r.per_block_degree));
        out.push_str(&format!("dimension: {}\n", r.dimension));
        out.push_str(&format!("ideal_order: {}\n", r.ideal_order));
        out.push_str(&format!("cells_examined: {}\n", r.trace.len()));
        for w in &r.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

impl fmt::Display for FormatStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatStyle::Plain => write!(f, "plain"),
            FormatStyle::Json => write!(f, "json"),
        }
    }
}
