//! Exact rational numbers and their textual form.
//!
//! Every result-bearing quantity in the crate is a [`Rational`]. The textual
//! form is `p/q` in lowest terms, or `p` when the denominator is one, which is
//! exactly what `num_rational` prints.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always normalized with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p`, `p/q` or a finite decimal such as `-0.25`.
///
/// A leading Unicode minus sign is accepted alongside the ASCII one.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim().replace('\u{2212}', "-");
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = parse_int(num).ok_or_else(err)?;
        let den: BigInt = parse_int(den).ok_or_else(err)?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num: BigInt = digits.parse().map_err(|_| err())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    Ok(Rational::from_integer(parse_int(&s).ok_or_else(err)?))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Comma-separated list of rationals, e.g. `3,-1,-1,-1` or `1/2,-1/2`.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>, ParseRationalError> {
    text.split(',').map(parse_rational).collect()
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `(a, b, ...)` with exact entries.
pub fn format_tuple(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Largest absolute entry; zero for an empty slice.
pub fn sup_norm(values: &[Rational]) -> Rational {
    values
        .iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-16/3").unwrap(), ratio(-16, 3));
        assert_eq!(parse_rational("4/-6").unwrap(), ratio(-2, 3));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational("\u{2212}2").unwrap(), int(-2));
        assert_eq!(parse_rational(" +7 ").unwrap(), int(7));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "a", "1.", "--1", "1/2/3", ".5x"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_is_lowest_terms() {
        assert_eq!(ratio(6, -4).to_string(), "-3/2");
        assert_eq!(int(0).to_string(), "0");
        assert_eq!(format_tuple(&[int(-1), ratio(1, 2)]), "(-1,1/2)");
    }

    #[test]
    fn list_and_norm() {
        let v = parse_rational_list("3,-1,-1,-1").unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(sup_norm(&v), int(3));
    }
}
