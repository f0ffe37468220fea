//! Monomial support of a homogeneous polynomial `F = Σ aⱼ Z^{αʲ}`.
//!
//! Only the exponent vectors enter any computed quantity; coefficients are
//! kept so that inputs round-trip, and must be nonzero.
//!
//! Two input paths produce a [`Support`]:
//!
//! ```text
//! n=3; Z0^3 + Z1^3 + Z2^3 + Z3^3
//! {"n": 3, "d": 3, "monomials": [[3,0,0,0], [0,3,0,0], [0,0,3,0], [0,0,0,3]]}
//! ```
//!
//! Smoothness of the hypersurface is not checked. The necessary condition that
//! no coordinate `Zₖ` divides `F` is.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolynomialError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("polynomial has no terms")]
    Empty,
    #[error("polynomial mentions no variables and declares no dimension")]
    NoVariables,
    #[error("polynomial has degree 0")]
    ZeroDegree,
    #[error("not homogeneous: expected degree {expected}, found a term of degree {found}")]
    NotHomogeneous { expected: u32, found: u32 },
    #[error("coefficients of monomial {exponents:?} sum to zero")]
    VanishingCoefficient { exponents: Vec<u32> },
    #[error("every monomial contains Z{0}, so the polynomial is divisible by it")]
    DivisibleByVariable(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("schema violation: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coefficient: Rational,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Validated support: homogeneous, duplicate-free, nonzero coefficients, and
/// every variable absent from at least one monomial.
///
/// Monomials are kept in lex order (`Z0` > `Z1` > ... , largest first), so the
/// Fermat cubic lists `Z0^3` first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    n: usize,
    d: u32,
    monomials: Vec<Monomial>,
}

impl Support {
    /// Builds a support from raw `(exponents, coefficient)` terms.
    ///
    /// `n` fixes the ambient dimension; when `None` it is one less than the
    /// longest exponent vector. Shorter vectors are zero-padded. Repeated
    /// exponent vectors are merged by summing coefficients.
    pub fn from_terms(
        n: Option<usize>,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self, PolynomialError> {
        let terms: Vec<(Vec<u32>, Rational)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Err(PolynomialError::Empty);
        }
        let width = terms.iter().map(|(e, _)| e.len()).max().unwrap_or(0);
        let n = match n {
            Some(n) => {
                if width > n + 1 {
                    return Err(PolynomialError::DimensionMismatch(format!(
                        "a monomial uses {width} variables but n = {n}"
                    )));
                }
                n
            }
            None if width == 0 => return Err(PolynomialError::NoVariables),
            None => width - 1,
        };

        let mut merged: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (mut exps, coeff) in terms {
            exps.resize(n + 1, 0);
            *merged.entry(exps).or_insert_with(Rational::zero) += coeff;
        }
        let monomials = merged
            .into_iter()
            .rev()
            .map(|(exponents, coefficient)| Monomial {
                exponents,
                coefficient,
            })
            .collect::<Vec<_>>();
        let d = monomials[0].degree();
        let support = Support { n, d, monomials };
        support.check_invariants()?;
        Ok(support)
    }

    fn check_invariants(&self) -> Result<(), PolynomialError> {
        if self.monomials.is_empty() {
            return Err(PolynomialError::Empty);
        }
        for m in &self.monomials {
            if m.exponents.len() != self.n + 1 {
                return Err(PolynomialError::DimensionMismatch(format!(
                    "exponent vector {:?} has length {}, expected {}",
                    m.exponents,
                    m.exponents.len(),
                    self.n + 1
                )));
            }
            if m.degree() != self.d {
                return Err(PolynomialError::NotHomogeneous {
                    expected: self.d,
                    found: m.degree(),
                });
            }
            if m.coefficient.is_zero() {
                return Err(PolynomialError::VanishingCoefficient {
                    exponents: m.exponents.clone(),
                });
            }
        }
        if self.d == 0 {
            return Err(PolynomialError::ZeroDegree);
        }
        for w in self.monomials.windows(2) {
            if w[0].exponents <= w[1].exponents {
                return Err(PolynomialError::Schema(
                    "monomials are not strictly lex-decreasing".into(),
                ));
            }
        }
        if let Some(k) = self.zero_exponent_witnesses().iter().position(Option::is_none) {
            return Err(PolynomialError::DivisibleByVariable(k));
        }
        Ok(())
    }

    /// Ambient projective dimension; exponent vectors have `n + 1` entries.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn exponent(&self, monomial: usize, variable: usize) -> u32 {
        self.monomials[monomial].exponents[variable]
    }

    /// For each variable, the first monomial not containing it.
    pub fn zero_exponent_witnesses(&self) -> Vec<Option<usize>> {
        (0..=self.n)
            .map(|k| self.monomials.iter().position(|m| m.exponents[k] == 0))
            .collect()
    }

    pub fn is_fano(&self) -> bool {
        self.d as usize <= self.n
    }

    /// Same hypersurface with variables relabelled: new variable `perm[k]`
    /// carries old variable `k`.
    pub fn permute_variables(&self, perm: &[usize]) -> Result<Support, PolynomialError> {
        if perm.len() != self.n + 1 {
            return Err(PolynomialError::DimensionMismatch(
                "permutation length differs from n + 1".into(),
            ));
        }
        let terms = self.monomials.iter().map(|m| {
            let mut exps = vec![0; self.n + 1];
            for (k, &e) in m.exponents.iter().enumerate() {
                exps[perm[k]] = e;
            }
            (exps, m.coefficient.clone())
        });
        Support::from_terms(Some(self.n), terms)
    }

    pub fn to_json(&self) -> SupportJson {
        SupportJson {
            n: self.n,
            d: self.d,
            monomials: self.monomials.iter().map(|m| m.exponents.clone()).collect(),
            coefficients: Some(
                self.monomials
                    .iter()
                    .map(|m| serde_json::Value::String(m.coefficient.to_string()))
                    .collect(),
            ),
        }
    }
}

/// Canonical text form, e.g. `n=3; Z0*Z3 - Z1*Z2`. Parses back to the same
/// support.
impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};", self.n)?;
        for (i, m) in self.monomials.iter().enumerate() {
            let negative = m.coefficient.is_negative();
            match (i, negative) {
                (0, false) => write!(f, " ")?,
                (0, true) => write!(f, " -")?,
                (_, false) => write!(f, " + ")?,
                (_, true) => write!(f, " - ")?,
            }
            let magnitude = m.coefficient.abs();
            if !magnitude.is_one() {
                write!(f, "{magnitude}*")?;
            }
            let factors: Vec<String> = m
                .exponents
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(k, &e)| if e == 1 { format!("Z{k}") } else { format!("Z{k}^{e}") })
                .collect();
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Wire form of a support. Coefficients may be JSON integers or rational
/// strings such as `"-3/2"`; they default to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportJson {
    pub n: usize,
    pub d: u32,
    pub monomials: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<serde_json::Value>>,
}

pub fn parse_support_json(bytes: &[u8]) -> Result<Support, PolynomialError> {
    let raw: SupportJson =
        serde_json::from_slice(bytes).map_err(|e| PolynomialError::Schema(e.to_string()))?;
    for row in &raw.monomials {
        if row.len() != raw.n + 1 {
            return Err(PolynomialError::DimensionMismatch(format!(
                "monomial {row:?} has {} entries, expected n + 1 = {}",
                row.len(),
                raw.n + 1
            )));
        }
        let degree: u32 = row.iter().sum();
        if degree != raw.d {
            return Err(PolynomialError::NotHomogeneous {
                expected: raw.d,
                found: degree,
            });
        }
    }
    let coefficients = match &raw.coefficients {
        None => vec![Rational::one(); raw.monomials.len()],
        Some(values) => {
            if values.len() != raw.monomials.len() {
                return Err(PolynomialError::Schema(
                    "coefficients and monomials differ in length".into(),
                ));
            }
            values.iter().map(json_coefficient).collect::<Result<_, _>>()?
        }
    };
    Support::from_terms(Some(raw.n), raw.monomials.into_iter().zip(coefficients))
}

fn json_coefficient(value: &serde_json::Value) -> Result<Rational, PolynomialError> {
    let bad = || PolynomialError::Schema(format!("coefficient {value} is not an exact rational"));
    match value {
        serde_json::Value::String(s) => parse_rational(s).map_err(|_| bad()),
        serde_json::Value::Number(num) if num.is_i64() || num.is_u64() => {
            parse_rational(&num.to_string()).map_err(|_| bad())
        }
        _ => Err(bad()),
    }
}

/// Parses the text grammar: an optional `n=<int>;` header, then signed terms
/// of an optional rational coefficient and factors `Z<k>` or `Z<k>^<e>`,
/// optionally joined by `*`. Whitespace is insignificant.
pub fn parse_polynomial(text: &str) -> Result<Support, PolynomialError> {
    let mut p = Parser::new(text);
    let n = p.header()?;
    let terms = p.terms()?;
    Support::from_terms(n, terms)
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let chars = src
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Parser { src, chars, pos: 0 }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |&(i, _)| i)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn error(&self, message: impl Into<String>) -> PolynomialError {
        PolynomialError::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().map(|&(_, c)| c).collect())
    }

    fn uint(&mut self, what: &str) -> Result<u32, PolynomialError> {
        let at = self.pos;
        let digits = self.digits().ok_or_else(|| self.error(format!("expected {what}")))?;
        digits.parse().map_err(|_| {
            self.pos = at;
            self.error(format!("{what} out of range"))
        })
    }

    fn header(&mut self) -> Result<Option<usize>, PolynomialError> {
        if self.peek() != Some('n') {
            return Ok(None);
        }
        self.pos += 1;
        if !self.eat('=') {
            return Err(self.error("expected '=' after 'n'"));
        }
        let n = self.uint("dimension")? as usize;
        if !self.eat(';') {
            return Err(self.error("expected ';' after dimension header"));
        }
        Ok(Some(n))
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') | Some('\u{2212}') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn terms(&mut self) -> Result<Vec<(Vec<u32>, Rational)>, PolynomialError> {
        let mut terms = Vec::new();
        if self.peek().is_none() {
            return Err(PolynomialError::Empty);
        }
        let mut negative = self.sign().unwrap_or(false);
        loop {
            let (exps, mut coeff) = self.term()?;
            if negative {
                coeff = -coeff;
            }
            terms.push((exps, coeff));
            match self.peek() {
                None => break,
                Some(_) => {
                    negative = self
                        .sign()
                        .ok_or_else(|| self.error("expected '+' or '-' between terms"))?;
                }
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(Vec<u32>, Rational), PolynomialError> {
        let mut coeff = Rational::one();
        let mut has_coeff = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num = self.digits().expect("digit present");
            let text = if self.eat('/') {
                let den = self
                    .digits()
                    .ok_or_else(|| self.error("expected denominator"))?;
                format!("{num}/{den}")
            } else {
                num
            };
            coeff = parse_rational(&text).map_err(|_| self.error("invalid coefficient"))?;
            has_coeff = true;
            if coeff.is_zero() {
                return Err(PolynomialError::VanishingCoefficient { exponents: vec![] });
            }
        }
        let mut exps: Vec<u32> = Vec::new();
        let mut first = true;
        loop {
            if first && !has_coeff && self.peek() == Some('*') {
                return Err(self.error("term cannot start with '*'"));
            }
            let star = self.eat('*');
            if !matches!(self.peek(), Some('Z') | Some('z')) {
                if star {
                    return Err(self.error("expected a variable after '*'"));
                }
                if first && !has_coeff {
                    return Err(self.error("expected a coefficient or a variable"));
                }
                break;
            }
            self.pos += 1;
            let k = self.uint("variable index")? as usize;
            let e = if self.eat('^') { self.uint("exponent")? } else { 1 };
            if exps.len() <= k {
                exps.resize(k + 1, 0);
            }
            exps[k] = exps[k]
                .checked_add(e)
                .ok_or_else(|| self.error("exponent overflow"))?;
            first = false;
        }
        Ok((exps, coeff))
    }
}

/// Outcome of [`validate_support`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportReport {
    pub n: usize,
    pub d: u32,
    pub monomials: usize,
    pub fano: bool,
    /// Index of a monomial free of `Zₖ`, per variable `k`.
    pub zero_exponent_witnesses: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Re-checks every support invariant and flags non-Fano degrees.
pub fn validate_support(support: &Support) -> Result<SupportReport, PolynomialError> {
    support.check_invariants()?;
    let mut warnings = Vec::new();
    if !support.is_fano() {
        warnings.push(format!(
            "degree d = {} exceeds n = {}: the hypersurface is not Fano; values are still computed",
            support.d, support.n
        ));
    }
    Ok(SupportReport {
        n: support.n,
        d: support.d,
        monomials: support.len(),
        fano: support.is_fano(),
        zero_exponent_witnesses: support
            .zero_exponent_witnesses()
            .into_iter()
            .map(|w| w.expect("checked above"))
            .collect(),
        warnings,
    })
}
