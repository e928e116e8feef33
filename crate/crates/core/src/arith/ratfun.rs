use std::fmt;

use num_rational::BigRational;

use super::field::Field;
use super::poly::Poly;
use super::ArithError;

/// A reduced univariate rational function `num/den`, or the constant ∞.
///
/// Finite functions have coprime numerator and denominator with a monic
/// denominator, so equality is structural. The constant ∞ is stored as
/// `1/0`.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction<F> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RationalFunction<F> {
    /// Reduces `num/den` to normal form.
    pub fn reduce(num: Poly<F>, den: Poly<F>) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Self::normalize(num, den))
    }

    /// Accepts a projective pair; `(p : 0)` with `p ≠ 0` is ∞ and `(0 : 0)` is `None`.
    pub fn from_projective(num: Poly<F>, den: Poly<F>) -> Option<Self> {
        match (num.is_zero(), den.is_zero()) {
            (true, true) => None,
            (false, true) => Some(Self::infinity()),
            _ => Some(Self::normalize(num, den)),
        }
    }

    fn normalize(num: Poly<F>, den: Poly<F>) -> Self {
        if num.is_zero() {
            return RationalFunction {
                num,
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        let lead = den.leading().unwrap().clone();
        if !lead.is_one() {
            let li = lead.inv().unwrap();
            num = num.scale(&li);
            den = den.scale(&li);
        }
        RationalFunction { num, den }
    }

    pub fn infinity() -> Self {
        RationalFunction {
            num: Poly::one(),
            den: Poly::zero(),
        }
    }

    pub fn constant(c: F) -> Self {
        RationalFunction {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    /// The identity function `z`.
    pub fn var() -> Self {
        RationalFunction {
            num: Poly::var(),
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_infinity(&self) -> bool {
        self.den.is_zero()
    }

    /// `max(deg num, deg den)`: the number of preimages of a generic value.
    pub fn degree(&self) -> usize {
        self.num.degree_or_zero().max(self.den.degree_or_zero())
    }

    /// Value at a point, `None` at a pole.
    pub fn eval(&self, z: &F) -> Option<F> {
        if self.is_infinity() {
            return None;
        }
        self.den.eval(z).inv().map(|d| self.num.eval(z).mul(&d))
    }

    /// Projective value `(num(z) : den(z))` with ∞ as `(1 : 0)`.
    pub fn eval_projective(&self, z: &F) -> (F, F) {
        (self.num.eval(z), self.den.eval(z))
    }
}

impl fmt::Display for RationalFunction<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            return f.write_str("inf");
        }
        if self.den.degree() == Some(0) {
            return f.write_str(&self.num.display_in("z"));
        }
        write!(
            f,
            "({})/({})",
            self.num.display_in("z"),
            self.den.display_in("z")
        )
    }
}

impl<F: Field> fmt::Debug for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{:?}", self.num, self.den)
    }
}
