//! Exact rational helpers. Every value in the crate is a `BigRational`.

use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p/q`, `p`, or a finite decimal such as `1.9`.
pub fn parse(text: &str) -> Result<Rational> {
    let t = text.trim();
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::ParseRational(text.to_string()));
        }
        let negative = whole.starts_with('-');
        let whole = BigInt::from_str(if whole.is_empty() || whole == "-" {
            "0"
        } else {
            whole
        })
        .map_err(|_| Error::ParseRational(text.to_string()))?;
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac = BigInt::from_str(frac).map_err(|_| Error::ParseRational(text.to_string()))?;
        let magnitude = whole.abs() * &scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(signed, scale));
    }
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| Error::ParseRational(text.to_string()))?;
    let q = BigInt::from_str(q).map_err(|_| Error::ParseRational(text.to_string()))?;
    if q.is_zero() {
        return Err(Error::ParseRational(text.to_string()));
    }
    Ok(Rational::new(p, q))
}

/// `p/q` in lowest terms, or `p` for integers.
pub fn format(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("19/10").unwrap(), ratio(19, 10));
        assert_eq!(parse("-3").unwrap(), int(-3));
        assert_eq!(parse("1.9").unwrap(), ratio(19, 10));
        assert_eq!(parse("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse("4/8").unwrap(), ratio(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn format_and_floor() {
        assert_eq!(format(&ratio(6, 4)), "3/2");
        assert_eq!(format(&int(7)), "7");
        assert_eq!(floor(&ratio(-1, 2)), BigInt::from(-1));
        assert_eq!(floor(&ratio(19, 5)), BigInt::from(3));
    }
}
