//! Exact scalars and the extended real line built on them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`.
///
/// Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `"p/q"`, `"p"` or `"-p/q"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let trimmed = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    match trimmed.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(Rational::new(num, den))
        }
        None => {
            let num = BigInt::from_str(trimmed).map_err(|_| bad())?;
            Ok(Rational::from_integer(num))
        }
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Divide `v` by the absolute value of its first nonzero entry.
///
/// Returns the divisor used, or `None` when `v` is identically zero.
pub fn normalize_leading(v: &mut [Rational]) -> Option<Rational> {
    let lead = v.iter().find(|x| !x.is_zero())?.abs();
    if !lead.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &lead;
        }
    }
    Some(lead)
}

/// A value in `[-inf, +inf]` with exact finite part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extended {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// Multiply by a strictly positive rational.
    pub fn scale(&self, factor: &Rational) -> Extended {
        debug_assert!(factor.is_positive());
        match self {
            Extended::Finite(v) => Extended::Finite(v * factor),
            other => other.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<Extended, Error> {
        match text.trim() {
            "inf" | "+inf" => Ok(Extended::PosInfinity),
            "-inf" => Ok(Extended::NegInfinity),
            other => parse_rational(other).map(Extended::Finite),
        }
    }
}

impl From<Rational> for Extended {
    fn from(v: Rational) -> Self {
        Extended::Finite(v)
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        use Extended::*;
        match (self, other) {
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (_, NegInfinity) | (PosInfinity, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Extended {
    type Output = Extended;

    fn neg(self) -> Extended {
        match self {
            Extended::NegInfinity => Extended::PosInfinity,
            Extended::PosInfinity => Extended::NegInfinity,
            Extended::Finite(v) => Extended::Finite(-v),
        }
    }
}

/// Addition in the lower-support convention: `-inf` absorbs everything,
/// since support functions never mix `+inf` with `-inf` on nonempty sets.
impl Add for Extended {
    type Output = Extended;

    fn add(self, rhs: Extended) -> Extended {
        use Extended::*;
        match (self, rhs) {
            (NegInfinity, _) | (_, NegInfinity) => NegInfinity,
            (PosInfinity, _) | (_, PosInfinity) => PosInfinity,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInfinity => f.write_str("-inf"),
            Extended::PosInfinity => f.write_str("inf"),
            Extended::Finite(v) => write!(f, "{v}"),
        }
    }
}
