//! Sparse multivariate polynomials over Q in the mapping's formal symbols.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A formal symbol of a mapping expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// `x`, the current iterate `x_n`.
    X,
    /// `y`, the previous iterate `x_{n-1}`.
    Y,
    Param(String),
    /// Stream value at `n + offset`.
    Stream {
        name: String,
        offset: i64,
    },
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::X => f.write_str("x"),
            Symbol::Y => f.write_str("y"),
            Symbol::Param(p) => f.write_str(p),
            Symbol::Stream { name, offset: 0 } => f.write_str(name),
            Symbol::Stream { name, offset } => write!(f, "{name}[{offset:+}]"),
        }
    }
}

/// Sorted `(symbol, exponent)` pairs with positive exponents.
pub type Monomial = Vec<(Symbol, u32)>;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MPoly { terms }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(s, 1)], BigRational::one());
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Largest exponent of `s` over all terms.
    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.iter().filter(|(t, _)| t == s).map(|(_, e)| *e))
            .max()
            .unwrap_or(0)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.terms.keys().flat_map(|m| m.iter().map(|(s, _)| s))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mul_monomials(ma, mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = MPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Coefficient of the largest monomial.
    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.terms.values().next_back()
    }

    /// Substitutes every non-`x`/`y` symbol, leaving a polynomial in `x, y`
    /// as a dense table `[i][j]` for `x^i y^j`, sized `(dx+1) × (dy+1)`.
    pub fn specialize<E>(
        &self,
        dx: usize,
        dy: usize,
        mut value: impl FnMut(&Symbol) -> Result<BigRational, E>,
    ) -> Result<Vec<Vec<BigRational>>, E> {
        let mut table = vec![vec![BigRational::zero(); dy + 1]; dx + 1];
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let (mut i, mut j) = (0usize, 0usize);
            for (s, e) in m {
                match s {
                    Symbol::X => i = *e as usize,
                    Symbol::Y => j = *e as usize,
                    other => {
                        let v = value(other)?;
                        coeff *= pow_q(&v, *e);
                    }
                }
            }
            table[i][j] += coeff;
        }
        Ok(table)
    }
}

fn pow_q(v: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * v)
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: Monomial = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j].clone());
            j += 1;
        } else {
            out.push((a[i].0.clone(), a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

/// Brings a pair `(num, den)` to the stored form: all coefficients integers
/// with joint content 1 and a positive leading coefficient in `den`.
pub fn normalize_pair(num: &MPoly, den: &MPoly) -> (MPoly, MPoly) {
    let all = num.terms.values().chain(den.terms.values());
    let lcm = all.clone().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let gcd = all.fold(BigInt::zero(), |acc, c| {
        acc.gcd(&(c.numer() * (&lcm / c.denom())))
    });
    let mut factor = BigRational::new(lcm, gcd);
    if den.leading_coeff().is_some_and(|c| c.is_negative()) {
        factor = -factor;
    }
    (num.scale(&factor), den.scale(&factor))
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if m.is_empty() || !mag.is_one() {
                factors.push(if mag.is_integer() {
                    mag.to_string()
                } else {
                    format!("({mag})")
                });
            }
            for (s, e) in m {
                factors.push(if *e == 1 {
                    s.to_string()
                } else {
                    format!("{s}^{e}")
                });
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
