//! Exact rationals.
//!
//! All probabilities, distances and integrals are `BigRational`s. The text
//! form is `"num/den"` (or a bare integer); parsing is exact and rejects a
//! zero denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::parse(format!("malformed rational {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::parse(format!("malformed rational {s:?}: zero denominator")));
    }
    Ok(Rational::new(num, den))
}

/// Lowest-terms text form, `"3/10"`, or `"1"` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && r <= &Rational::one()
}

pub fn sum<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Rational {
    it.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        assert_eq!(parse_rational("2/4").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-3/9").unwrap(), ratio(-1, 3));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert_eq!(parse_rational(" 1 / 3 ").unwrap(), ratio(1, 3));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/2").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(fmt_rational(&ratio(6, 20)), "3/10");
        assert_eq!(fmt_rational(&ratio(4, 4)), "1");
        assert_eq!(fmt_rational(&ratio(0, 7)), "0");
    }
}
