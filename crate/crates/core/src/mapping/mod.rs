//! Three-point rational mappings `x_{n+1} = N(x_n, x_{n-1}; n) / D(x_n, x_{n-1}; n)`.
//!
//! Expressions are written in `x` (= `x_n`), `y` (= `x_{n-1}`), named
//! parameters and coefficient streams indexed relative to `n`. Evaluation
//! is projective: both arguments are homogenized to the bidegree of the
//! map, so points at infinity need no special casing.

pub mod catalog;
mod expr;
mod mpoly;
mod stream;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    sum_series, ArithError, ExtRational, Field, Indeterminate, LaurentSeries, Poly,
    RationalFunction,
};

pub use mpoly::{MPoly, Monomial, Symbol};
pub use stream::{CoefficientStream, StreamSpec};

use expr::{parse_fraction, IdentKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MappingError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unbound symbol {name:?} at {position}")]
    UnboundSymbol { name: String, position: usize },
    #[error("division by the zero polynomial at {position}")]
    DivisionByZeroPolynomial { position: usize },
    #[error("invalid stream: {0}")]
    BadStream(String),
    #[error("invalid mapping definition: {0}")]
    BadDefinition(String),
    #[error("unknown mapping {0:?}")]
    UnknownMapping(String),
    #[error("coefficient has no image modulo the working prime")]
    UnluckyPrime,
    #[error("indeterminate value 0/0")]
    Indeterminate,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

impl From<Indeterminate> for MappingError {
    fn from(_: Indeterminate) -> Self {
        MappingError::Indeterminate
    }
}

/// A parsed mapping. Immutable; safe to share between threads.
#[derive(Clone)]
pub struct Mapping {
    name: String,
    num: MPoly,
    den: MPoly,
    parameters: BTreeMap<String, ExtRational>,
    streams: BTreeMap<String, CoefficientStream>,
    dx: usize,
    dy: usize,
}

/// The map at a fixed `n`: dense coefficient tables `[i][j]` of `x^i y^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specialized<F> {
    pub num: Vec<Vec<F>>,
    pub den: Vec<Vec<F>>,
    pub dx: usize,
    pub dy: usize,
}

/// JSON form of a mapping definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingDef {
    pub name: String,
    pub update: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, ExtRational>,
    #[serde(default)]
    pub streams: BTreeMap<String, StreamSpec>,
}

/// Parses a JSON mapping definition.
pub fn parse_mapping(text: &str) -> Result<Mapping, MappingError> {
    let def: MappingDef =
        serde_json::from_str(text).map_err(|e| MappingError::BadDefinition(e.to_string()))?;
    Mapping::from_def(&def)
}

fn valid_name(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|h| h.is_alphabetic() || h == '_')
        && c.all(|h| h.is_alphanumeric() || h == '_')
}

impl Mapping {
    pub fn new(
        name: &str,
        update: &str,
        parameters: BTreeMap<String, ExtRational>,
        streams: BTreeMap<String, CoefficientStream>,
    ) -> Result<Self, MappingError> {
        for k in parameters.keys().chain(streams.keys()) {
            if !valid_name(k) || k == "x" || k == "y" {
                return Err(MappingError::BadDefinition(format!(
                    "bad symbol name {k:?}"
                )));
            }
            if parameters.contains_key(k) && streams.contains_key(k) {
                return Err(MappingError::BadDefinition(format!(
                    "{k:?} is both a parameter and a stream"
                )));
            }
        }
        for (k, v) in &parameters {
            if v.is_infinite() {
                return Err(MappingError::BadDefinition(format!(
                    "parameter {k} must be finite"
                )));
            }
        }
        let resolve = |id: &str| {
            if parameters.contains_key(id) {
                Some(IdentKind::Param)
            } else if streams.contains_key(id) {
                Some(IdentKind::Stream)
            } else {
                None
            }
        };
        let (num, den) = parse_fraction(update, &resolve)?;
        let (num, den) = mpoly::normalize_pair(&num, &den);
        let dx = num.degree_in(&Symbol::X).max(den.degree_in(&Symbol::X)) as usize;
        let dy = num.degree_in(&Symbol::Y).max(den.degree_in(&Symbol::Y)) as usize;
        Ok(Mapping {
            name: name.to_string(),
            num,
            den,
            parameters,
            streams,
            dx,
            dy,
        })
    }

    pub fn from_def(def: &MappingDef) -> Result<Self, MappingError> {
        let streams = def
            .streams
            .iter()
            .map(|(k, s)| Ok((k.clone(), CoefficientStream::new(s.clone())?)))
            .collect::<Result<_, MappingError>>()?;
        Self::new(&def.name, &def.update, def.parameters.clone(), streams)
    }

    pub fn to_def(&self) -> MappingDef {
        MappingDef {
            name: self.name.clone(),
            update: self.update_string(),
            parameters: self.parameters.clone(),
            streams: self
                .streams
                .iter()
                .map(|(k, s)| (k.clone(), s.spec().clone()))
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn parameters(&self) -> &BTreeMap<String, ExtRational> {
        &self.parameters
    }

    pub fn streams(&self) -> &BTreeMap<String, CoefficientStream> {
        &self.streams
    }

    /// `(x-degree, y-degree)` used for homogenization.
    pub fn bidegree(&self) -> (usize, usize) {
        (self.dx, self.dy)
    }

    /// The update as an expression string that parses back to this mapping.
    pub fn update_string(&self) -> String {
        if self.den == MPoly::one() {
            self.num.to_string()
        } else {
            format!("({})/({})", self.num, self.den)
        }
    }

    /// Same mapping with one parameter replaced.
    pub fn with_parameter(&self, name: &str, value: BigRational) -> Result<Self, MappingError> {
        if !self.parameters.contains_key(name) {
            return Err(MappingError::BadDefinition(format!(
                "no parameter {name:?}"
            )));
        }
        let mut out = self.clone();
        out.parameters
            .insert(name.to_string(), ExtRational::from_rational(&value));
        Ok(out)
    }

    /// Same mapping with one stream replaced.
    pub fn with_stream(&self, name: &str, stream: CoefficientStream) -> Result<Self, MappingError> {
        if !self.streams.contains_key(name) {
            return Err(MappingError::BadDefinition(format!("no stream {name:?}")));
        }
        let mut out = self.clone();
        out.streams.insert(name.to_string(), stream);
        Ok(out)
    }

    fn symbol_value(&self, n: i64, s: &Symbol) -> Result<BigRational, MappingError> {
        match s {
            Symbol::Param(p) => Ok(self.parameters[p]
                .to_rational()
                .expect("parameters are finite")),
            Symbol::Stream { name, offset } => self.streams[name].at(n + offset),
            Symbol::X | Symbol::Y => unreachable!("x and y are not substituted"),
        }
    }

    /// Coefficient tables over Q at step `n`.
    pub fn specialize_q(&self, n: i64) -> Result<Specialized<BigRational>, MappingError> {
        let num = self
            .num
            .specialize(self.dx, self.dy, |s| self.symbol_value(n, s))?;
        let den = self
            .den
            .specialize(self.dx, self.dy, |s| self.symbol_value(n, s))?;
        Ok(Specialized {
            num,
            den,
            dx: self.dx,
            dy: self.dy,
        })
    }

    /// Coefficient tables over any field at step `n`.
    pub fn specialize<F: Field>(&self, n: i64) -> Result<Specialized<F>, MappingError> {
        let q = self.specialize_q(n)?;
        let map = |t: &Vec<Vec<BigRational>>| -> Result<Vec<Vec<F>>, MappingError> {
            t.iter()
                .map(|row| {
                    row.iter()
                        .map(|c| F::from_rational(c).ok_or(MappingError::UnluckyPrime))
                        .collect()
                })
                .collect()
        };
        Ok(Specialized {
            num: map(&q.num)?,
            den: map(&q.den)?,
            dx: q.dx,
            dy: q.dy,
        })
    }

    /// `x_{n+1}` from `x_n = xn`, `x_{n-1} = xprev`.
    pub fn step(
        &self,
        n: i64,
        xn: &ExtRational,
        xprev: &ExtRational,
    ) -> Result<ExtRational, MappingError> {
        self.specialize_q(n)?.step(xn, xprev)
    }

    /// Symbolic step on reduced rational functions in `z`.
    pub fn step_symbolic<F: Field>(
        &self,
        n: i64,
        xn: &RationalFunction<F>,
        xprev: &RationalFunction<F>,
    ) -> Result<RationalFunction<F>, MappingError> {
        self.specialize::<F>(n)?.step_symbolic(xn, xprev)
    }

    /// Step on truncated Laurent series in ε.
    pub fn step_series(
        &self,
        n: i64,
        xn: &LaurentSeries,
        xprev: &LaurentSeries,
    ) -> Result<LaurentSeries, MappingError> {
        self.specialize_q(n)?.step_series(xn, xprev)
    }
}

impl PartialEq for Mapping {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num
            && self.den == other.den
            && self.parameters == other.parameters
            && self.streams == other.streams
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: x[n+1] = {}", self.name, self.update_string())
    }
}

impl fmt::Debug for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mapping")
            .field("name", &self.name)
            .field("num", &self.num)
            .field("den", &self.den)
            .field("parameters", &self.parameters)
            .field("streams", &self.streams)
            .finish()
    }
}

/// `[a^0 b^d, a^1 b^(d-1), ..., a^d b^0]`.
fn hom_powers<T: Clone>(a: &T, b: &T, d: usize, one: T, mul: impl Fn(&T, &T) -> T) -> Vec<T> {
    let mut pa = vec![one.clone()];
    let mut pb = vec![one];
    for k in 0..d {
        pa.push(mul(&pa[k], a));
        pb.push(mul(&pb[k], b));
    }
    (0..=d).map(|i| mul(&pa[i], &pb[d - i])).collect()
}

impl Specialized<BigRational> {
    /// Integer coefficient tables proportional to `(num, den)` by the same factor.
    fn integer_tables(&self) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
        let lcm = self
            .num
            .iter()
            .chain(self.den.iter())
            .flatten()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let conv = |t: &Vec<Vec<BigRational>>| {
            t.iter()
                .map(|r| r.iter().map(|c| c.numer() * (&lcm / c.denom())).collect())
                .collect()
        };
        (conv(&self.num), conv(&self.den))
    }

    /// Exact projective evaluation on `P^1(Q) × P^1(Q)`.
    pub fn step(&self, xn: &ExtRational, xprev: &ExtRational) -> Result<ExtRational, MappingError> {
        let (tn, td) = self.integer_tables();
        let mul = |a: &BigInt, b: &BigInt| a * b;
        let px = hom_powers(xn.numer(), xn.denom(), self.dx, BigInt::one(), mul);
        let py = hom_powers(xprev.numer(), xprev.denom(), self.dy, BigInt::one(), mul);
        let mut n = BigInt::zero();
        let mut d = BigInt::zero();
        for i in 0..=self.dx {
            for j in 0..=self.dy {
                let (a, b) = (&tn[i][j], &td[i][j]);
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                let m = &px[i] * &py[j];
                if !a.is_zero() {
                    n += a * &m;
                }
                if !b.is_zero() {
                    d += b * &m;
                }
            }
        }
        ExtRational::from_projective(n, d).ok_or(MappingError::Indeterminate)
    }

    /// `N(x, y) / D(x, y)` on Laurent series.
    pub fn step_series(
        &self,
        x: &LaurentSeries,
        y: &LaurentSeries,
    ) -> Result<LaurentSeries, MappingError> {
        let xp: Vec<LaurentSeries> = (0..=self.dx).map(|i| x.pow(i as u32)).collect();
        let yp: Vec<LaurentSeries> = (0..=self.dy).map(|j| y.pow(j as u32)).collect();
        let eval = |t: &Vec<Vec<BigRational>>| -> Result<LaurentSeries, ArithError> {
            let mut terms = Vec::new();
            for (i, row) in t.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    if !Zero::is_zero(c) {
                        terms.push(xp[i].mul(&yp[j]).scale(c));
                    }
                }
            }
            sum_series(&terms)
        };
        let n = eval(&self.num)?;
        let d = eval(&self.den)?;
        Ok(n.div(&d))
    }
}

impl<F: Field> Specialized<F> {
    /// Homogenized evaluation of `(num, den)` at `(p : q)`, `(p' : q')`.
    pub fn eval_projective(&self, x: (&F, &F), y: (&F, &F)) -> (F, F) {
        let px = hom_powers(x.0, x.1, self.dx, F::one(), F::mul);
        let py = hom_powers(y.0, y.1, self.dy, F::one(), F::mul);
        let mut n = F::zero();
        let mut d = F::zero();
        for i in 0..=self.dx {
            for j in 0..=self.dy {
                let m = px[i].mul(&py[j]);
                n = n.add(&self.num[i][j].mul(&m));
                d = d.add(&self.den[i][j].mul(&m));
            }
        }
        (n, d)
    }

    /// The reduced iterate in `z`; a vanishing denominator yields the constant ∞.
    pub fn step_symbolic(
        &self,
        xn: &RationalFunction<F>,
        xprev: &RationalFunction<F>,
    ) -> Result<RationalFunction<F>, MappingError> {
        let mul = |a: &Poly<F>, b: &Poly<F>| a * b;
        let px = hom_powers(xn.num(), xn.den(), self.dx, Poly::one(), mul);
        let py = hom_powers(xprev.num(), xprev.den(), self.dy, Poly::one(), mul);
        let mut n = Poly::zero();
        let mut d = Poly::zero();
        for i in 0..=self.dx {
            for j in 0..=self.dy {
                let (a, b) = (&self.num[i][j], &self.den[i][j]);
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                let m = &px[i] * &py[j];
                if !a.is_zero() {
                    n = &n + &m.scale(a);
                }
                if !b.is_zero() {
                    d = &d + &m.scale(b);
                }
            }
        }
        RationalFunction::from_projective(n, d).ok_or(MappingError::Indeterminate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, Fp61};

    fn e(n: i64) -> ExtRational {
        ExtRational::from_integer(n)
    }

    #[test]
    fn hv_parses_to_expected_fraction() {
        let m = catalog::get("eq14-hv").unwrap();
        assert_eq!(m.num().to_string(), "x^3 - x^2*y + 1");
        assert_eq!(m.den().to_string(), "x^2");
    }

    #[test]
    fn qrt_steps_through_infinity() {
        let m = catalog::get("eq1-qrt").unwrap();
        assert!(m.step(1, &e(1), &e(5)).unwrap().is_infinite());
        assert_eq!(m.step(1, &ExtRational::infinity(), &e(1)).unwrap(), e(2));
    }

    #[test]
    fn hv_direct_arithmetic() {
        let m = catalog::get("eq14-hv").unwrap();
        assert_eq!(m.step(1, &e(1), &e(2)).unwrap(), e(0));
    }

    #[test]
    fn symbolic_step_for_qrt() {
        let m = catalog::get("eq1-qrt").unwrap();
        let x0 = RationalFunction::constant(rat(5, 1));
        let x1 = RationalFunction::<BigRational>::var();
        let x2 = m.step_symbolic(1, &x1, &x0).unwrap();
        // (2/5)(z - 3)/(z - 1)
        let expect = RationalFunction::reduce(
            Poly::from_coeffs(vec![rat(-6, 5), rat(2, 5)]),
            Poly::from_i64s(&[-1, 1]),
        )
        .unwrap();
        assert_eq!(x2, expect);
    }

    #[test]
    fn symbolic_step_for_hv() {
        let m = catalog::get("eq14-hv").unwrap();
        let x0 = RationalFunction::constant(rat(2, 1));
        let x1 = RationalFunction::<BigRational>::var();
        let x2 = m.step_symbolic(1, &x1, &x0).unwrap();
        assert_eq!(x2.num(), &Poly::from_i64s(&[1, 0, -2, 1]));
        assert_eq!(x2.den(), &Poly::from_i64s(&[0, 0, 1]));
        assert_eq!(x2.degree(), 3);
    }

    #[test]
    fn constants_propagate_symbolically() {
        let m = catalog::get("eq20-bedford-kim").unwrap();
        let c = RationalFunction::<Fp61>::constant(Fp61::from_i64(7));
        let g = RationalFunction::<Fp61>::constant(Fp61::from_i64(4));
        let out = m.step_symbolic(3, &c, &g).unwrap();
        // (7 - 2)/(4 - 3)
        assert_eq!(out, RationalFunction::constant(Fp61::from_i64(5)));
    }

    #[test]
    fn series_step_resolves_zero_over_zero() {
        // x_n = 1 + ε and x_{n-1} = 5 gives a simple pole for the first QRT form.
        let m = catalog::get("eq1-qrt").unwrap();
        let x = LaurentSeries::perturbed(&rat(1, 1), 8);
        let y = LaurentSeries::constant(&rat(5, 1), 8).unwrap();
        let out = m.step_series(1, &x, &y).unwrap();
        assert_eq!(out.valuation(), -1);
    }

    #[test]
    fn definition_round_trip() {
        let m = catalog::get("eq31-biquadratic").unwrap();
        let j = serde_json::to_string(&m.to_def()).unwrap();
        assert_eq!(parse_mapping(&j).unwrap(), m);
    }

    #[test]
    fn conflicting_names_rejected() {
        let mut p = BTreeMap::new();
        p.insert("x".to_string(), e(1));
        assert!(Mapping::new("bad", "x", p, BTreeMap::new()).is_err());
    }
}
