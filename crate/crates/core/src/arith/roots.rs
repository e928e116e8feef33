//! Exact real-root isolation for polynomials with rational coefficients.
//!
//! Sturm sequences of the square-free part decide root counts on half-open
//! intervals `(a, b]`; bisection over rationals refines the interval.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::field::{clear_denominators, primitive_part, Field};
use super::poly::Polynomial;

/// An isolating interval `[lo, hi]` for one real root.
///
/// `lo == hi` means the root is exactly this rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootInterval {
    #[serde(serialize_with = "ser_q")]
    pub lo: BigRational,
    #[serde(serialize_with = "ser_q")]
    pub hi: BigRational,
    /// Multiplicity of the root in the original polynomial.
    pub multiplicity: usize,
}

fn ser_q<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl RootInterval {
    pub fn midpoint(&self) -> f64 {
        let m = (&self.lo + &self.hi) / BigRational::from_integer(2.into());
        m.to_f64().unwrap_or(f64::NAN)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        let lo = self.lo.to_f64().unwrap_or(f64::NAN);
        let hi = self.hi.to_f64().unwrap_or(f64::NAN);
        lo <= x && x <= hi
    }
}

/// Sturm chain of a square-free polynomial; each member is kept primitive
/// with its sign so sign-variation counts are unchanged.
pub struct SturmChain {
    chain: Vec<Polynomial>,
}

impl SturmChain {
    pub fn new(p: &Polynomial) -> Self {
        let mut chain = vec![normalize_positive(p)];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(normalize_positive(&d));
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(normalize_positive(&(-&r)));
        }
        SturmChain { chain }
    }

    /// Sign variations at `x`, zeros skipped.
    pub fn variations(&self, x: &BigRational) -> usize {
        count_variations(self.chain.iter().map(|f| sign(&f.eval(x))))
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }

    /// Number of distinct real roots in `(a, ∞)`.
    pub fn count_above(&self, a: &BigRational) -> usize {
        let at_inf = count_variations(self.chain.iter().map(|f| {
            if f.is_zero() {
                0
            } else {
                sign(f.leading().unwrap())
            }
        }));
        self.variations(a).saturating_sub(at_inf)
    }
}

fn count_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

fn sign(q: &BigRational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Positive rescaling to a primitive integer polynomial.
fn normalize_positive(p: &Polynomial) -> Polynomial {
    let ints = primitive_part(&clear_denominators(p));
    let lead_sign = p.leading().map(sign).unwrap_or(1);
    let ints_sign = ints
        .last()
        .map(|c: &BigInt| if c.is_negative() { -1 } else { 1 });
    let flip = ints_sign.unwrap_or(1) != lead_sign;
    Polynomial::from_coeffs(
        ints.into_iter()
            .map(|c| BigRational::from_integer(if flip { -c } else { c }))
            .collect(),
    )
}

/// Upper bound strictly above every real root (Cauchy).
pub fn cauchy_bound(p: &Polynomial) -> BigRational {
    let lead = p.leading().expect("nonzero polynomial").abs();
    let max = p
        .coeffs()
        .iter()
        .take(p.coeffs().len() - 1)
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(BigRational::zero);
    max + BigRational::one()
}

/// Number of distinct real roots strictly greater than `threshold`.
pub fn count_roots_above(p: &Polynomial, threshold: &BigRational) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    SturmChain::new(&p.square_free_part()).count_above(threshold)
}

/// Isolates the largest real root of `p` strictly above `threshold`.
///
/// The existence test is exact. The returned interval contains exactly one
/// root of the square-free part, has width at most `width`, and still
/// isolates that root after being widened by half its width on each side.
pub fn isolate_largest_real_root(
    p: &Polynomial,
    threshold: &BigRational,
    width: &BigRational,
) -> Option<RootInterval> {
    if p.degree().unwrap_or(0) == 0 {
        return None;
    }
    let sqf = p.square_free_part();
    let sturm = SturmChain::new(&sqf);
    let bound = cauchy_bound(&sqf);
    if &bound <= threshold || sturm.count(threshold, &bound) == 0 {
        return None;
    }
    let two = BigRational::from_integer(2.into());
    let mut lo = threshold.clone();
    let mut hi = bound;
    loop {
        let w = &hi - &lo;
        if &w <= width && sturm.count(&lo, &hi) == 1 {
            let half = &w / &two;
            if sturm.count(&(&lo - &half), &(&hi + &half)) == 1 {
                break;
            }
        }
        let mid = (&lo + &hi) / &two;
        let above = sturm.count(&mid, &hi);
        if above == 0 && sqf.eval(&mid).is_zero() {
            return Some(RootInterval {
                multiplicity: multiplicity_at(p, &mid, &mid),
                lo: mid.clone(),
                hi: mid,
            });
        }
        if above >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(RootInterval {
        multiplicity: multiplicity_at(p, &lo, &hi),
        lo,
        hi,
    })
}

fn multiplicity_at(p: &Polynomial, lo: &BigRational, hi: &BigRational) -> usize {
    let parts = p.square_free_decomposition();
    for (i, f) in parts.iter().enumerate() {
        if f.degree().unwrap_or(0) == 0 {
            continue;
        }
        let hit = if lo == hi {
            f.eval(lo).is_zero()
        } else {
            SturmChain::new(f).count(lo, hi) > 0
        };
        if hit {
            return i + 1;
        }
    }
    1
}

/// Largest integer whose divisors are enumerated by trial division.
const DIVISOR_LIMIT: u64 = 1 << 40;

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64().filter(|&v| v <= DIVISOR_LIMIT)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

/// Distinct rational roots of `p` in increasing order, plus the cofactor
/// left after dividing out every rational root (with multiplicity).
/// `None` when the coefficients are too large for divisor enumeration.
pub fn rational_roots(p: &Polynomial) -> Option<(Vec<BigRational>, Polynomial)> {
    let mut rest = p.clone();
    let mut roots = Vec::new();
    if rest.is_zero() {
        return Some((roots, rest));
    }
    let zero = BigRational::zero();
    if rest.low_order() > 0 {
        roots.push(zero.clone());
        rest = rest.strip_var_factors();
    }
    let sqf = primitive_part(&clear_denominators(&rest.square_free_part()));
    if sqf.len() > 1 {
        let lead = divisors(sqf.last().unwrap())?;
        let constant = divisors(&sqf[0])?;
        let sqf = Polynomial::from_coeffs(sqf.into_iter().map(BigRational::from_integer).collect());
        for &q in &lead {
            for &c in &constant {
                for sign in [1i64, -1] {
                    let r = BigRational::new(BigInt::from(c) * sign, BigInt::from(q));
                    if *r.denom() != BigInt::from(q) || roots.contains(&r) {
                        continue;
                    }
                    if sqf.eval(&r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
    }
    for r in &roots {
        if r.is_zero() {
            continue;
        }
        let lin = Polynomial::from_coeffs(vec![-r.clone(), BigRational::one()]);
        while let Some(q) = rest.exact_div(&lin) {
            rest = q;
        }
    }
    roots.sort();
    Some((roots, rest))
}
