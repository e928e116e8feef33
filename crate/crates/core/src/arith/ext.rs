//! Points of the projective rational line Q ∪ {∞}.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ArithError;

/// The result of `0·∞`, `∞ − ∞`, `0/0` or `∞/∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Indeterminate;

impl fmt::Display for Indeterminate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("indeterminate")
    }
}

/// A projective point `(num : den)` in lowest terms with `den ≥ 0`.
///
/// Infinity is `(1 : 0)`; every finite value has `den > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtRational {
    num: BigInt,
    den: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ExtRational {
    pub fn infinity() -> Self {
        ExtRational {
            num: BigInt::one(),
            den: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        ExtRational {
            num: BigInt::from(n),
            den: BigInt::one(),
        }
    }

    pub fn new(n: i64, d: i64) -> Self {
        Self::from_projective(BigInt::from(n), BigInt::from(d)).expect("(0 : 0) is not a point")
    }

    pub fn from_rational(q: &BigRational) -> Self {
        ExtRational {
            num: q.numer().clone(),
            den: q.denom().clone(),
        }
    }

    /// Normalizes an arbitrary pair; `None` for `(0 : 0)`.
    pub fn from_projective(num: BigInt, den: BigInt) -> Option<Self> {
        if num.is_zero() && den.is_zero() {
            return None;
        }
        if den.is_zero() {
            return Some(Self::infinity());
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / &g, den / &g);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        Some(ExtRational { num: n, den: d })
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The finite value, if any.
    pub fn to_rational(&self) -> Option<BigRational> {
        (!self.is_infinite()).then(|| BigRational::new(self.num.clone(), self.den.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        match self.to_rational() {
            Some(q) => num_traits::ToPrimitive::to_f64(&q).unwrap_or(f64::NAN),
            None => f64::INFINITY,
        }
    }

    pub fn apply(&self, op: ArithOp, rhs: &Self) -> Result<Self, Indeterminate> {
        match op {
            ArithOp::Add => self.add(rhs),
            ArithOp::Sub => self.sub(rhs),
            ArithOp::Mul => self.mul(rhs),
            ArithOp::Div => self.div(rhs),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, Indeterminate> {
        match (self.is_infinite(), rhs.is_infinite()) {
            (true, true) => Err(Indeterminate),
            (true, false) | (false, true) => Ok(Self::infinity()),
            (false, false) => Ok(Self::finite(
                &self.num * &rhs.den + &rhs.num * &self.den,
                &self.den * &rhs.den,
            )),
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_infinite() {
            self.clone()
        } else {
            ExtRational {
                num: -&self.num,
                den: self.den.clone(),
            }
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, Indeterminate> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, Indeterminate> {
        match (self.is_infinite(), rhs.is_infinite()) {
            (true, true) => Ok(Self::infinity()),
            (true, false) if rhs.is_zero() => Err(Indeterminate),
            (false, true) if self.is_zero() => Err(Indeterminate),
            (true, false) | (false, true) => Ok(Self::infinity()),
            (false, false) => Ok(Self::finite(&self.num * &rhs.num, &self.den * &rhs.den)),
        }
    }

    /// Reciprocal on the projective line: `1/0 = ∞`, `1/∞ = 0`.
    pub fn recip(&self) -> Self {
        Self::from_projective(self.den.clone(), self.num.clone()).expect("never (0 : 0)")
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, Indeterminate> {
        match (self.is_infinite(), rhs.is_infinite()) {
            (true, true) => Err(Indeterminate),
            (false, false) if self.is_zero() && rhs.is_zero() => Err(Indeterminate),
            _ => self.mul(&rhs.recip()),
        }
    }

    fn finite(num: BigInt, den: BigInt) -> Self {
        Self::from_projective(num, den).expect("finite denominators are nonzero")
    }
}

impl From<BigRational> for ExtRational {
    fn from(q: BigRational) -> Self {
        Self::from_rational(&q)
    }
}

impl From<i64> for ExtRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtRational {
    type Err = ArithError;

    /// Accepts `p`, `p/q` (integers, optional sign) and `inf`.
    fn from_str(s: &str) -> Result<Self, ArithError> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(Self::infinity());
        }
        let bad = || ArithError::BadNumber(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Self::from_projective(n, d).ok_or_else(bad)
    }
}

/// Parses an exact `p/q` string into a finite rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ArithError> {
    let e: ExtRational = s.parse()?;
    e.to_rational()
        .ok_or_else(|| ArithError::BadNumber(s.to_string()))
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
