//! Truncated Laurent series in a small parameter ε with rational coefficients.

use std::fmt;

use num_rational::BigRational;

use super::field::Field;
use super::ArithError;

/// Default number of known coefficients for fresh series.
pub const DEFAULT_PRECISION: usize = 16;
/// Largest precision the retry protocol will request.
pub const MAX_PRECISION: usize = 256;

/// `Σ coeffs[k] ε^(valuation + k) + O(ε^(valuation + K))` with `K = coeffs.len()`.
///
/// A series is always nonzero inside its window: `coeffs[0] ≠ 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    valuation: i64,
    coeffs: Vec<BigRational>,
}

impl LaurentSeries {
    /// Builds a series, stripping leading zeros from the window.
    pub fn new(valuation: i64, coeffs: Vec<BigRational>) -> Result<Self, ArithError> {
        let lead = coeffs
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(ArithError::PrecisionExhausted)?;
        Ok(LaurentSeries {
            valuation: valuation + lead as i64,
            coeffs: coeffs[lead..].to_vec(),
        })
    }

    /// A nonzero constant known to `precision` terms.
    pub fn constant(c: &BigRational, precision: usize) -> Result<Self, ArithError> {
        if c.is_zero() {
            return Err(ArithError::PrecisionExhausted);
        }
        let mut coeffs = vec![BigRational::zero(); precision.max(1)];
        coeffs[0] = c.clone();
        Ok(LaurentSeries {
            valuation: 0,
            coeffs,
        })
    }

    /// `c + ε`, the perturbation of a finite value.
    pub fn perturbed(c: &BigRational, precision: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); precision.max(2)];
        coeffs[0] = c.clone();
        coeffs[1] = BigRational::one();
        Self::new(0, coeffs).expect("ε coefficient is nonzero")
    }

    /// `c ε^v` known to `precision` terms.
    pub fn monomial(c: &BigRational, v: i64, precision: usize) -> Result<Self, ArithError> {
        let mut s = Self::constant(c, precision)?;
        s.valuation = v;
        Ok(s)
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Number of known coefficients.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// Exponent of the first unknown term.
    pub fn abs_precision(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigRational {
        &self.coeffs[0]
    }

    /// Coefficient of `ε^k`, `None` beyond the window.
    pub fn coeff(&self, k: i64) -> Option<BigRational> {
        if k >= self.abs_precision() {
            None
        } else if k < self.valuation {
            Some(BigRational::zero())
        } else {
            Some(self.coeffs[(k - self.valuation) as usize].clone())
        }
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self, ArithError> {
        let lo = self.valuation.min(other.valuation);
        let hi = self.abs_precision().min(other.abs_precision());
        if hi <= lo {
            return Err(ArithError::PrecisionExhausted);
        }
        let coeffs = (lo..hi)
            .map(|k| {
                let a = self.coeff(k).unwrap();
                let b = other.coeff(k).unwrap();
                if negate {
                    a.sub(&b)
                } else {
                    a.add(&b)
                }
            })
            .collect();
        Self::new(lo, coeffs)
    }

    pub fn add(&self, other: &Self) -> Result<Self, ArithError> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.precision().min(other.precision());
        let coeffs = (0..k)
            .map(|n| {
                (0..=n).fold(BigRational::zero(), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&other.coeffs[n - i]))
                })
            })
            .collect();
        LaurentSeries {
            valuation: self.valuation + other.valuation,
            coeffs,
        }
    }

    /// Multiplies by a nonzero exact rational.
    pub fn scale(&self, c: &BigRational) -> Self {
        LaurentSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        let k = self.precision();
        let a0_inv = self.coeffs[0]
            .inv()
            .expect("leading coefficient is nonzero");
        let mut out: Vec<BigRational> = Vec::with_capacity(k);
        out.push(a0_inv.clone());
        for n in 1..k {
            let s = (1..=n).fold(BigRational::zero(), |acc, i| {
                acc.add(&self.coeffs[i].mul(&out[n - i]))
            });
            out.push(s.mul(&a0_inv).neg());
        }
        LaurentSeries {
            valuation: -self.valuation,
            coeffs: out,
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc: Option<Self> = None;
        for _ in 0..e {
            acc = Some(match acc {
                None => self.clone(),
                Some(a) => a.mul(self),
            });
        }
        acc.unwrap_or_else(|| {
            Self::constant(&BigRational::one(), self.precision()).expect("one is nonzero")
        })
    }

    /// The ε → 0 limit: `Some(value)` when finite, `None` for a pole.
    pub fn limit(&self) -> Option<BigRational> {
        match self.valuation {
            v if v < 0 => None,
            0 => Some(self.coeffs[0].clone()),
            _ => Some(BigRational::zero()),
        }
    }
}

/// Sum of several series over their common window; an empty sum or total
/// cancellation is `PrecisionExhausted`.
pub fn sum_series(terms: &[LaurentSeries]) -> Result<LaurentSeries, ArithError> {
    let lo = terms.iter().map(|t| t.valuation).min();
    let hi = terms.iter().map(|t| t.abs_precision()).min();
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(ArithError::PrecisionExhausted);
    };
    if hi <= lo {
        return Err(ArithError::PrecisionExhausted);
    }
    let mut coeffs = vec![BigRational::zero(); (hi - lo) as usize];
    for t in terms {
        for (i, c) in t.coeffs.iter().enumerate() {
            let k = t.valuation + i as i64;
            if k >= hi {
                break;
            }
            coeffs[(k - lo) as usize] = coeffs[(k - lo) as usize].add(c);
        }
    }
    LaurentSeries::new(lo, coeffs)
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({})ε^{}", c, self.valuation + i as i64)?;
        }
        write!(f, " + O(ε^{})", self.abs_precision())
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
