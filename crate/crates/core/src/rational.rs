//! Exact rationals: parsing from `p/q` or decimal text and `"p/q"` serialization.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational used for all rate arithmetic.
pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.125` (converted exactly).
pub fn parse_q(text: &str) -> Result<Q> {
    let s = text.trim();
    let bad = || Error::invalid(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| bad())?;
        let d: i64 = den.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(Error::invalid(format!("zero denominator in {text:?}")));
        }
        return Ok(Q::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac_part.len() > 15 {
        return Err(Error::invalid(format!("too many decimal digits in {text:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let n: i64 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let d = 10_i64.pow(frac_part.len() as u32);
    let v = Q::new(n, d);
    Ok(if neg { -v } else { v })
}

pub fn format_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn to_f64(v: &Q) -> f64 {
    v.numer().to_f64().unwrap_or(f64::NAN) / v.denom().to_f64().unwrap_or(f64::NAN)
}

/// Smallest integer not below `v`.
pub fn ceil_q(v: &Q) -> i64 {
    v.ceil().to_integer()
}

pub fn floor_q(v: &Q) -> i64 {
    v.floor().to_integer()
}

pub fn max_q(a: Q, b: Q) -> Q {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn min_q(a: Q, b: Q) -> Q {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn pos_part(v: Q) -> Q {
    if v.is_negative() {
        Q::zero()
    } else {
        v
    }
}

/// Serde adapter storing a [`Q`] as a `"p/q"` string.
pub mod serde_q {
    use super::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_q("3/10").unwrap(), q(3, 10));
        assert_eq!(parse_q("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_q("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_q("1").unwrap(), qi(1));
        assert_eq!(parse_q(".5").unwrap(), q(1, 2));
        assert_eq!(parse_q("-2/4").unwrap(), q(-1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for v in [q(3, 10), qi(4), q(-7, 3), Q::zero()] {
            assert_eq!(parse_q(&format_q(&v)).unwrap(), v);
        }
    }
}
