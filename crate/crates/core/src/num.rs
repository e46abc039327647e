//! Exact rational numbers and the extended price type.
//!
//! Every probability, price and payoff in the crate is a [`Rational`]
//! (arbitrary precision). Files carry rationals as `"p/q"` strings so that
//! nothing drifts through a float round trip.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = num_rational::BigRational;

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| format!("bad numerator in {s:?}"))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n = BigInt::from_str(&digits).map_err(|_| format!("bad decimal {s:?}"))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| format!("bad rational {s:?}"))
}

/// Canonical `"p/q"` form (`"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float (binary fraction).
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Numerator/denominator size in bits, the larger of the two.
pub fn bit_size(r: &Rational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// A superhedging price: finite, or `-inf` when the hedging program is
/// unbounded below.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Price {
    NegInfinity,
    Finite(Rational),
}

impl Price {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Price::Finite(r) => Some(r),
            Price::NegInfinity => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Price::Finite(_))
    }

    /// `self <= 0`, with `-inf <= 0`.
    pub fn is_nonpositive(&self) -> bool {
        match self {
            Price::NegInfinity => true,
            Price::Finite(r) => !r.is_positive(),
        }
    }
}

impl PartialOrd for Price {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Price {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Price::NegInfinity, Price::NegInfinity) => Ordering::Equal,
            (Price::NegInfinity, _) => Ordering::Less,
            (_, Price::NegInfinity) => Ordering::Greater,
            (Price::Finite(a), Price::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Price::NegInfinity => f.write_str("-inf"),
            Price::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Price {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Price {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "-inf" {
            return Ok(Price::NegInfinity);
        }
        parse_rational(&s).map(Price::Finite).map_err(serde::de::Error::custom)
    }
}

/// Serde adapters for rationals stored as strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
