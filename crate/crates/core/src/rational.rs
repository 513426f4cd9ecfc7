//! Exact rational numbers and their `"p/q"` text form.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::FormatError;

/// Arbitrary-precision rational; every state value, function value and
/// outcome point in the crate is one of these.
pub type Q = num_rational::BigRational;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Renders as `"p/q"`, always with an explicit denominator.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `"p/q"` or a bare integer `"p"`.
pub fn parse_q(s: &str) -> Result<Q, FormatError> {
    let bad = || FormatError::Rational(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// `serialize_with` helper writing a rational as `"p/q"`.
pub fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

pub fn in_unit_interval(x: &Q) -> bool {
    !x.is_negative() && *x <= Q::one()
}

/// Lexicographic comparison of two equal-length rational vectors.
pub fn lex_cmp(a: &[Q], b: &[Q]) -> std::cmp::Ordering {
    a.iter().cmp(b.iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        assert_eq!(fmt_q(&q(2, 6)), "1/3");
        assert_eq!(fmt_q(&qi(1)), "1/1");
        assert_eq!(fmt_q(&q(-1, 2)), "-1/2");
        assert_eq!(parse_q("4/6").unwrap(), q(2, 3));
        assert_eq!(parse_q(" 7 ").unwrap(), qi(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("a/b").is_err());
    }

    #[test]
    fn unit_interval() {
        assert!(in_unit_interval(&Q::zero()));
        assert!(in_unit_interval(&q(1, 1)));
        assert!(!in_unit_interval(&q(4, 3)));
        assert!(!in_unit_interval(&q(-1, 3)));
    }
}
