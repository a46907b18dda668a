//! Exact rational numbers and the coefficient-ring abstraction shared by the
//! series, Chow-ring and Lazard-ring code.
//!
//! `Rational` is always stored in lowest terms with a positive denominator, so
//! structural equality is numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid rational literal `{0}`")]
    Parse(String),
}

/// An exact fraction `numerator / denominator` in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `n / d`, reducing and moving the sign into the numerator.
    pub fn new(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self, ArithError> {
        let d = d.into();
        if d.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(n.into(), d)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Rational, ArithError> {
        if other.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn recip(&self) -> Result<Rational, ArithError> {
        Rational::one().checked_div(self)
    }

    pub fn pow(&self, exp: u32) -> Rational {
        let mut acc = Rational::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// `1 / n!`
    pub fn inverse_factorial(n: u32) -> Rational {
        let mut f = BigInt::one();
        for k in 2..=n {
            f *= k;
        }
        Rational(BigRational::new(BigInt::one(), f))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, allow_sign: bool) -> Option<BigInt> {
    let digits = match s.strip_prefix(['-', '+']) {
        Some(rest) if allow_sign => rest,
        Some(_) => return None,
        None => s,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.trim_start_matches('+').parse().ok()
}

impl FromStr for Rational {
    type Err = ArithError;

    /// Accepts `n` or `n/d` with an optional leading sign on `n`; no whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::Parse(s.to_string());
        match s.split_once('/') {
            None => parse_int(s, true).map(Rational::from_integer).ok_or_else(bad),
            Some((n, d)) => {
                let n = parse_int(n, true).ok_or_else(bad)?;
                let d = parse_int(d, false).ok_or_else(bad)?;
                Rational::new(n, d)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A commutative ring with unit that can carry the coefficients of series and
/// Chow classes. Implemented for [`Rational`] and for Lazard-ring elements.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_rational(q: Rational) -> Self;
    fn scale(&self, q: &Rational) -> Self;
    /// Multiplicative inverse when it exists in the ring.
    fn try_inverse(&self) -> Option<Self>;
    /// The Lazard generator `p_index`, if this ring contains it.
    fn generator(index: u32) -> Option<Self>;
    /// Flattened `(rational, monomial)` terms for printing; an empty monomial
    /// string denotes the constant term.
    fn text_terms(&self) -> Vec<(Rational, String)>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_rational(q: Rational) -> Self {
        q
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
    fn try_inverse(&self) -> Option<Self> {
        self.recip().ok()
    }
    fn generator(_index: u32) -> Option<Self> {
        None
    }
    fn text_terms(&self) -> Vec<(Rational, String)> {
        if self.is_zero() {
            Vec::new()
        } else {
            vec![(self.clone(), String::new())]
        }
    }
}

/// Writes `coefficient * monomial` in the shared term grammar: a unit
/// coefficient is omitted, `-1` becomes a leading minus, positive integers are
/// written bare and everything else is parenthesized.
pub(crate) fn write_scaled(out: &mut String, q: &Rational, monomial: &str) {
    if monomial.is_empty() {
        out.push_str(&q.to_string());
        return;
    }
    if (-q).is_one() {
        out.push('-');
    } else if q.is_one() {
    } else if q.is_integer() && !q.is_negative() {
        out.push_str(&q.to_string());
        out.push('*');
    } else {
        out.push('(');
        out.push_str(&q.to_string());
        out.push_str(")*");
    }
    out.push_str(monomial);
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigRational::from_integer(BigInt::from(*other))
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(&BigRational::from_integer(BigInt::from(*other)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(q(2, 4).to_string(), "1/2");
        assert_eq!(&q(-1, 2) * &q(-1, 3), q(1, 6));
        assert_eq!(q(1, 2).checked_div(&q(3, 4)).unwrap(), q(2, 3));
    }

    #[test]
    fn negative_denominator_moves_sign() {
        let r = q(3, -6);
        assert_eq!(r.to_string(), "-1/2");
        assert!(r.denom() > &BigInt::zero());
    }

    #[test]
    fn zero_is_canonical() {
        let z = q(0, -17);
        assert_eq!(z, Rational::zero());
        assert_eq!(z.denom(), &BigInt::one());
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(q(1, 2).checked_div(&Rational::zero()), Err(ArithError::DivisionByZero));
        assert_eq!(Rational::new(1, 0), Err(ArithError::DivisionByZero));
        assert_eq!(Rational::zero().recip(), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn parsing() {
        assert_eq!("-3/6".parse::<Rational>().unwrap(), q(-1, 2));
        assert_eq!("+7".parse::<Rational>().unwrap(), q(7, 1));
        assert_eq!("12".parse::<Rational>().unwrap(), q(12, 1));
        for bad in ["", " 1/2", "1 /2", "1/-2", "1/0", "a", "1/", "/2", "--1"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn serde_uses_string_form() {
        let json = serde_json::to_string(&q(-5, 10)).unwrap();
        assert_eq!(json, "\"-1/2\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q(-1, 2));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..30).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &(-&a), Rational::zero());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.recip().unwrap(), Rational::one());
            }
        }

        #[test]
        fn display_parse_round_trip(a in arb_rational()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }
}
