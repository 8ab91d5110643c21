//! Exact rational helpers shared by every solver.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational used for payoffs, weights and probabilities.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("malformed rational `{0}` (expected an integer or p/q)")]
    Malformed(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`; panics on a zero denominator.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `p/q` or an integer literal exactly.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let valid = |part: &str| {
        let digits = part.strip_prefix(['-', '+']).unwrap_or(part);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let (num, den) = (num.trim(), den.trim());
            if !valid(num) || !valid(den) {
                return Err(RationalParseError::Malformed(s.to_string()));
            }
            let num = BigInt::from_str(num).map_err(|_| RationalParseError::Malformed(s.to_string()))?;
            let den = BigInt::from_str(den).map_err(|_| RationalParseError::Malformed(s.to_string()))?;
            if den.is_zero() {
                return Err(RationalParseError::ZeroDenominator(s.to_string()));
            }
            Ok(Rational::new(num, den))
        }
        None => {
            if !valid(s) {
                return Err(RationalParseError::Malformed(s.to_string()));
            }
            let n = BigInt::from_str(s).map_err(|_| RationalParseError::Malformed(s.to_string()))?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Canonical text form: `p/q` in lowest terms, or `p` for integers.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), int(-4));
        assert_eq!(parse_rational("6/-4").unwrap(), ratio(-3, 2));
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&int(8)), "8");
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(matches!(parse_rational("1/0"), Err(RationalParseError::ZeroDenominator(_))));
        assert!(matches!(parse_rational("0.5"), Err(RationalParseError::Malformed(_))));
        assert!(matches!(parse_rational("1/"), Err(RationalParseError::Malformed(_))));
        assert!(matches!(parse_rational(""), Err(RationalParseError::Empty)));
    }
}
