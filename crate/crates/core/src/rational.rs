//! Exact rational numbers for time and work quantities.
//!
//! Every instant, execution requirement and rate in the simulator is a
//! [`Rational`]. Arithmetic is checked: an overflow of the underlying
//! 128-bit representation surfaces as [`ArithmeticError`] instead of
//! wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("rational arithmetic overflow")]
    Overflow,
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

/// A reduced fraction with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    pub fn new(numer: i128, denom: i128) -> Result<Self, ArithmeticError> {
        if denom == 0 {
            return Err(ArithmeticError::DivisionByZero);
        }
        if numer == i128::MIN || denom == i128::MIN {
            return Err(ArithmeticError::Overflow);
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    pub const fn integer(value: i128) -> Self {
        Rational(Ratio::new_raw(value, 1))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self, ArithmeticError> {
        self.0
            .checked_add(&rhs.0)
            .map(Rational)
            .ok_or(ArithmeticError::Overflow)
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self, ArithmeticError> {
        self.0
            .checked_sub(&rhs.0)
            .map(Rational)
            .ok_or(ArithmeticError::Overflow)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, ArithmeticError> {
        self.0
            .checked_mul(&rhs.0)
            .map(Rational)
            .ok_or(ArithmeticError::Overflow)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, ArithmeticError> {
        if rhs.is_zero() {
            return Err(ArithmeticError::DivisionByZero);
        }
        self.0
            .checked_div(&rhs.0)
            .map(Rational)
            .ok_or(ArithmeticError::Overflow)
    }

    /// Exact midpoint of two values.
    pub fn midpoint(self, other: Self) -> Result<Self, ArithmeticError> {
        self.checked_add(other)?.checked_div(Rational::integer(2))
    }

    pub fn floor(&self) -> i128 {
        Integer::div_floor(&self.numer(), &self.denom())
    }

    pub fn ceil(&self) -> i128 {
        Integer::div_ceil(&self.numer(), &self.denom())
    }

    /// Lossy conversion, for rendering only.
    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::integer(value as i128)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `"p"` or `"p/q"` with optional sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseRationalError {
            input: s.to_string(),
            reason,
        };
        let text = s.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        if num.is_empty() || den.is_empty() {
            return Err(err("empty numerator or denominator"));
        }
        if den.starts_with(['-', '+']) {
            return Err(err("denominator must be an unsigned integer"));
        }
        let numer: i128 = num
            .parse()
            .map_err(|_| err("numerator is not an integer"))?;
        let denom: i128 = den
            .parse()
            .map_err(|_| err("denominator is not an integer"))?;
        match Rational::new(numer, denom) {
            Ok(r) => Ok(r),
            Err(ArithmeticError::DivisionByZero) => Err(err("zero denominator")),
            Err(ArithmeticError::Overflow) => Err(err("value out of range")),
        }
    }
}

impl PartialEq<i128> for Rational {
    fn eq(&self, other: &i128) -> bool {
        self.is_integer() && self.numer() == *other
    }
}

impl PartialOrd<i128> for Rational {
    fn partial_cmp(&self, other: &i128) -> Option<Ordering> {
        Some(self.cmp(&Rational::integer(*other)))
    }
}

/// Integers serialize as JSON numbers when they fit an `i64`; everything
/// else as a `"p/q"` string. No floating point ever reaches the wire.
impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            if let Ok(v) = i64::try_from(self.numer()) {
                return serializer.serialize_i64(v);
            }
        }
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl Visitor<'_> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::integer(v as i128))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
                Err(E::custom(format!(
                    "floating-point value {v} is not allowed; write it as a \"p/q\" string"
                )))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Shorthand constructor; panics on a zero denominator.
pub fn rat(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), -3);
        assert_eq!(r.denom(), 2);
        assert_eq!(rat(0, 7), Rational::ZERO);
        assert_eq!(Rational::new(1, 0), Err(ArithmeticError::DivisionByZero));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("5/2".parse::<Rational>().unwrap(), rat(5, 2));
        assert_eq!("-3".parse::<Rational>().unwrap(), Rational::integer(-3));
        assert_eq!(" 4 / 8 ".parse::<Rational>().unwrap(), rat(1, 2));
        assert!("2.5".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("/3".parse::<Rational>().is_err());
        assert_eq!(rat(5, 2).to_string(), "5/2");
        assert_eq!(Rational::integer(7).to_string(), "7");
    }

    #[test]
    fn overflow_is_reported() {
        let big = Rational::integer(i128::MAX / 2 + 1);
        assert_eq!(big.checked_add(big), Err(ArithmeticError::Overflow));
        assert_eq!(big.checked_mul(big), Err(ArithmeticError::Overflow));
        assert_eq!(
            Rational::ONE.checked_div(Rational::ZERO),
            Err(ArithmeticError::DivisionByZero)
        );
    }

    #[test]
    fn json_encoding() {
        assert_eq!(serde_json::to_string(&rat(5, 2)).unwrap(), "\"5/2\"");
        assert_eq!(serde_json::to_string(&Rational::integer(3)).unwrap(), "3");
        let back: Rational = serde_json::from_str("\"5/2\"").unwrap();
        assert_eq!(back, rat(5, 2));
        let int: Rational = serde_json::from_str("4").unwrap();
        assert_eq!(int, Rational::integer(4));
        assert!(serde_json::from_str::<Rational>("2.5").is_err());
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(rat(7, 2).floor(), 3);
        assert_eq!(rat(7, 2).ceil(), 4);
        assert_eq!(rat(-7, 2).floor(), -4);
        assert_eq!(Rational::integer(3).ceil(), 3);
    }

    proptest! {
        #[test]
        fn arithmetic_is_exact(a in -1000i128..1000, b in 1i128..50, c in -1000i128..1000, d in 1i128..50) {
            let x = rat(a, b);
            let y = rat(c, d);
            let sum = x.checked_add(y).unwrap();
            prop_assert_eq!(sum.checked_sub(y).unwrap(), x);
            if !y.is_zero() {
                prop_assert_eq!(x.checked_mul(y).unwrap().checked_div(y).unwrap(), x);
            }
            prop_assert_eq!(x < y, a * d < c * b);
        }

        #[test]
        fn text_round_trip(a in any::<i64>(), b in 1i64..i64::MAX) {
            let x = rat(a as i128, b as i128);
            prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
            let json = serde_json::to_string(&x).unwrap();
            prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), x);
        }
    }
}
