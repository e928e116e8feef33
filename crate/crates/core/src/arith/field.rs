//! Coefficient fields for univariate polynomial arithmetic.
//!
//! Two fields are provided: the rationals (`BigRational`) for exact work and
//! word-sized prime fields [`Fp`] used to compute degree sequences by modular
//! images when rational coefficients become too large.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::poly::Poly;

/// A commutative field with exact arithmetic.
pub trait Field: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// Image of a rational number; `None` when the denominator is not invertible.
    fn from_rational(q: &BigRational) -> Option<Self>;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
            .expect("integers always map into the field")
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Monic greatest common divisor of two polynomials, not both zero.
    fn poly_gcd(a: &Poly<Self>, b: &Poly<Self>) -> Poly<Self> {
        euclid_gcd(a, b)
    }
}

/// Plain Euclidean remainder sequence; fine over fields without coefficient growth.
pub fn euclid_gcd<F: Field>(a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    while !r1.is_zero() {
        let r = r0.rem(&r1);
        r0 = r1;
        r1 = r;
    }
    r0.monic()
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }

    /// Primitive PRS over the integers: denominators are cleared, each
    /// pseudo-remainder is stripped of its content, and the last nonzero
    /// remainder is returned monic over Q.
    fn poly_gcd(a: &Poly<Self>, b: &Poly<Self>) -> Poly<Self> {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        let mut r0 = primitive_part(&clear_denominators(a));
        let mut r1 = primitive_part(&clear_denominators(b));
        if r0.len() < r1.len() {
            std::mem::swap(&mut r0, &mut r1);
        }
        while !r1.is_empty() {
            let r = pseudo_rem(&r0, &r1);
            let r = primitive_part(&r);
            r0 = r1;
            r1 = r;
        }
        let p = Poly::from_coeffs(r0.into_iter().map(BigRational::from_integer).collect());
        p.monic()
    }
}

/// Integer coefficient vector (index = power) proportional to `p`.
pub(crate) fn clear_denominators(p: &Poly<BigRational>) -> Vec<BigInt> {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect()
}

pub(crate) fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

/// Divides out the content and trims trailing zeros; the sign is kept.
pub(crate) fn primitive_part(v: &[BigInt]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = v.to_vec();
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    let g = content(&out);
    if !g.is_zero() && !g.is_one() {
        for c in out.iter_mut() {
            *c = &*c / &g;
        }
    }
    out
}

/// Pseudo-remainder of `a` by `b` over the integers (`b` nonzero).
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<BigInt> = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &lr * bc;
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

/// Element of the prime field Z/PZ with `P < 2^63`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp<const P: u64>(u64);

/// Mersenne prime 2^61 - 1.
pub type Fp61 = Fp<2_305_843_009_213_693_951>;
/// The prime 2^62 - 57.
pub type Fp62 = Fp<4_611_686_018_427_387_847>;

impl<const P: u64> Fp<P> {
    pub fn new(v: u64) -> Self {
        Fp(v % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::mul(&acc, &base);
            }
            base = Field::mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn from_bigint(v: &BigInt) -> Self {
        let m = BigInt::from(P);
        let r = v.mod_floor(&m);
        Fp(r.to_u64().expect("reduced residue fits in u64"))
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.0, P)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1 % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, rhs: &Self) -> Self {
        let s = self.0 + rhs.0;
        Fp(if s >= P { s - P } else { s })
    }
    fn sub(&self, rhs: &Self) -> Self {
        Fp(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + P - rhs.0
        })
    }
    fn mul(&self, rhs: &Self) -> Self {
        Fp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
    fn neg(&self) -> Self {
        if self.0 == 0 {
            *self
        } else {
            Fp(P - self.0)
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }
    fn from_rational(q: &BigRational) -> Option<Self> {
        let n = Self::from_bigint(q.numer());
        let d = Self::from_bigint(q.denom());
        d.inv().map(|di| Field::mul(&n, &di))
    }
    fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Fp::new(v as u64)
        } else {
            Field::neg(&Fp::new(v.unsigned_abs()))
        }
    }
}
