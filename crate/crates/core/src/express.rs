//! The express method: confined singularity patterns give linear relations
//! between spontaneous-occurrence counts, and the determinant of that
//! system is the characteristic polynomial whose largest real root is the
//! dynamical degree.
//!
//! A count `N(n - j)` is written `λ^-j`. Contributions from cyclic patterns
//! are bounded and dropped, so every relation is treated as exact.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{isolate_largest_real_root, rat, Polynomial, RootInterval};
use crate::singularity::{PatternReport, ValueToken};

/// Finite sum `Σ c_j λ^-j`; the coefficient of shift `j` weighs `N(n - j)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShiftPolynomial {
    terms: BTreeMap<i64, i64>,
}

impl ShiftPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(0, 1)
    }

    /// `c λ^-shift`.
    pub fn term(shift: i64, c: i64) -> Self {
        let mut s = Self::zero();
        s.add_term(shift, c);
        s
    }

    /// `Σ λ^-j` over the given shifts.
    pub fn from_shifts(shifts: &[i64]) -> Self {
        let mut s = Self::zero();
        for &j in shifts {
            s.add_term(j, 1);
        }
        s
    }

    pub fn add_term(&mut self, shift: i64, c: i64) {
        let e = self.terms.entry(shift).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&shift);
        }
    }

    pub fn terms(&self) -> &BTreeMap<i64, i64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (&j, &c) in &other.terms {
            s.add_term(j, c);
        }
        s
    }

    pub fn neg(&self) -> Self {
        ShiftPolynomial {
            terms: self.terms.iter().map(|(&j, &c)| (j, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut s = Self::zero();
        for (&j, &c) in &self.terms {
            s.add_term(j, c * k);
        }
        s
    }

    pub fn min_shift(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Value at a real `λ`.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&j, &c)| c as f64 * lambda.powi(-j as i32))
            .sum()
    }

    /// Polynomial in `μ = λ^-1` after multiplying by `μ^-offset`.
    fn in_mu(&self, offset: i64) -> Polynomial {
        let mut coeffs = Vec::new();
        for (&j, &c) in &self.terms {
            let k = (j - offset) as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigRational::zero());
            }
            coeffs[k] = BigRational::from_integer(c.into());
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl fmt::Display for ShiftPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (&j, &c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let m = c.abs();
            match (j, m) {
                (0, _) => write!(f, "{m}")?,
                (_, 1) => write!(f, "λ^{}", -j)?,
                _ => write!(f, "{m}λ^{}", -j)?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecEntry {
    pub pos: usize,
    pub value: ValueToken,
    #[serde(default = "one_u32")]
    pub mult: u32,
}

fn one_u32() -> u32 {
    1
}

/// A confined pattern named by the count of its spontaneous occurrences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub id: String,
    pub entries: Vec<SpecEntry>,
}

impl PatternSpec {
    /// Consecutive positions from `(value, mult)` pairs.
    pub fn sequence(id: &str, values: &[(ValueToken, u32)]) -> Result<Self, ExpressError> {
        Self::new(
            id,
            values
                .iter()
                .enumerate()
                .map(|(i, (v, m))| SpecEntry {
                    pos: i,
                    value: v.clone(),
                    mult: *m,
                })
                .collect(),
        )
    }

    pub fn new(id: &str, entries: Vec<SpecEntry>) -> Result<Self, ExpressError> {
        let bad = |m: String| Err(ExpressError::BadPattern(format!("{id}: {m}")));
        if id.is_empty() {
            return bad("empty id".into());
        }
        if entries.first().map(|e| e.pos) != Some(0) {
            return bad("the opening value must sit at position 0".into());
        }
        for w in entries.windows(2) {
            if w[1].pos <= w[0].pos {
                return bad("positions must increase strictly".into());
            }
        }
        for e in &entries {
            if e.mult == 0 {
                return bad("multiplicity must be at least 1".into());
            }
            if e.value == ValueToken::Free {
                return bad("free entries do not belong to a pattern".into());
            }
        }
        Ok(PatternSpec {
            id: id.to_string(),
            entries,
        })
    }

    /// The forced part of a confined traced pattern.
    pub fn from_report(id: &str, report: &PatternReport) -> Result<Self, ExpressError> {
        if !report.confined {
            return Err(ExpressError::BadPattern(format!(
                "{id}: the traced singularity is not confined"
            )));
        }
        let values: Vec<(ValueToken, u32)> = report
            .forced()
            .iter()
            .map(|e| (e.value.clone(), e.mult))
            .collect();
        Self::sequence(id, &values)
    }

    /// Contribution of one occurrence to the count of `value`.
    pub fn row(&self, value: &ValueToken) -> ShiftPolynomial {
        let mut s = ShiftPolynomial::zero();
        for e in self.entries.iter().filter(|e| &e.value == value) {
            s.add_term(e.pos as i64, e.mult as i64);
        }
        s
    }

    fn shape(&self) -> Vec<(usize, u32)> {
        self.entries.iter().map(|e| (e.pos, e.mult)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpressError {
    #[error("exclusive value {0} occurs in no pattern")]
    ExclusiveValueAbsent(ValueToken),
    #[error("invalid symmetry: {0}")]
    InvalidSymmetry(String),
    #[error("invalid pattern {0}")]
    BadPattern(String),
    #[error("{equations} independent equation(s) for {unknowns} unknown(s)")]
    Underdetermined { equations: usize, unknowns: usize },
    #[error("every determinant vanishes identically")]
    Inconsistent,
    #[error("unknown count {0}")]
    UnknownName(String),
    #[error("late confinement needs at least one repeat and a nonempty block")]
    BadBlock,
}

/// Count contributions for every exclusive value, in declared order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationSystem {
    pub unknowns: Vec<String>,
    pub value_rows: Vec<(ValueToken, Vec<ShiftPolynomial>)>,
}

impl EquationSystem {
    /// `row(v_i) - row(v_{i+1})` for consecutive exclusive values.
    pub fn equations(&self) -> Vec<Vec<ShiftPolynomial>> {
        self.value_rows
            .windows(2)
            .map(|w| w[0].1.iter().zip(&w[1].1).map(|(a, b)| a.sub(b)).collect())
            .collect()
    }
}

/// Sets up the count relations. `symmetry` lists classes of pattern ids
/// whose counts coincide; each class becomes one unknown named after its
/// first member.
pub fn build_equations(
    patterns: &[PatternSpec],
    exclusive: &[ValueToken],
    symmetry: &[Vec<String>],
) -> Result<EquationSystem, ExpressError> {
    let mut class_of: BTreeMap<&str, usize> = BTreeMap::new();
    let mut unknowns: Vec<String> = Vec::new();
    for class in symmetry {
        let Some(head) = class.first() else {
            return Err(ExpressError::InvalidSymmetry("empty class".into()));
        };
        let members: Vec<&PatternSpec> = class
            .iter()
            .map(|id| {
                patterns
                    .iter()
                    .find(|p| &p.id == id)
                    .ok_or_else(|| ExpressError::UnknownName(id.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut shape = members[0].shape();
        shape.sort();
        for p in &members[1..] {
            let mut s = p.shape();
            s.sort();
            if s != shape {
                return Err(ExpressError::InvalidSymmetry(format!(
                    "{} and {} differ in positions or multiplicities",
                    head, p.id
                )));
            }
        }
        for id in class {
            if class_of.insert(id, unknowns.len()).is_some() {
                return Err(ExpressError::InvalidSymmetry(format!(
                    "{id} in two classes"
                )));
            }
        }
        unknowns.push(head.clone());
    }
    for p in patterns {
        if !class_of.contains_key(p.id.as_str()) {
            if unknowns.contains(&p.id) {
                return Err(ExpressError::BadPattern(format!("duplicate id {}", p.id)));
            }
            class_of.insert(&p.id, unknowns.len());
            unknowns.push(p.id.clone());
        }
    }
    let mut value_rows = Vec::new();
    for v in exclusive {
        let mut row = vec![ShiftPolynomial::zero(); unknowns.len()];
        for p in patterns {
            let i = class_of[p.id.as_str()];
            row[i] = row[i].add(&p.row(v));
        }
        if row.iter().all(ShiftPolynomial::is_zero) {
            return Err(ExpressError::ExclusiveValueAbsent(v.clone()));
        }
        value_rows.push((v.clone(), row));
    }
    Ok(EquationSystem {
        unknowns,
        value_rows,
    })
}

/// Determinant over `Q[μ]` by fraction-free elimination.
fn bareiss(mut a: Vec<Vec<Polynomial>>) -> Polynomial {
    let n = a.len();
    let mut prev = Polynomial::one();
    let mut sign = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Polynomial::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = Polynomial::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -&d
    } else {
        d
    }
}

/// `D(μ)` as a primitive integer polynomial in `λ` without `λ` or `μ`
/// factors.
fn to_lambda(d: &Polynomial) -> Polynomial {
    let low = d.low_order();
    let mut c: Vec<BigRational> = d.coeffs()[low..].to_vec();
    c.reverse();
    Polynomial::from_coeffs(c).primitive_integer()
}

fn determinant(rows: &[&Vec<ShiftPolynomial>]) -> Polynomial {
    let m: Vec<Vec<Polynomial>> = rows
        .iter()
        .map(|row| {
            let off = row.iter().filter_map(|s| s.min_shift()).min().unwrap_or(0);
            row.iter().map(|s| s.in_mu(off)).collect()
        })
        .collect();
    bareiss(m)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Characteristic polynomials of every maximal square subsystem of
/// `equations` (each a coefficient vector over the unknowns).
fn eliminate(
    equations: &[Vec<ShiftPolynomial>],
    unknowns: usize,
) -> Result<Vec<Polynomial>, ExpressError> {
    let useful: Vec<&Vec<ShiftPolynomial>> = equations
        .iter()
        .filter(|e| e.iter().any(|s| !s.is_zero()))
        .collect();
    if useful.len() < unknowns {
        return Err(ExpressError::Underdetermined {
            equations: useful.len(),
            unknowns,
        });
    }
    let mut out: Vec<Polynomial> = Vec::new();
    for pick in combinations(useful.len(), unknowns) {
        let rows: Vec<&Vec<ShiftPolynomial>> = pick.iter().map(|&i| useful[i]).collect();
        let d = determinant(&rows);
        if d.is_zero() {
            continue;
        }
        let p = to_lambda(&d);
        if p.degree().unwrap_or(0) > 0 && !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err(ExpressError::Underdetermined {
            equations: 0,
            unknowns,
        });
    }
    Ok(out)
}

/// Characteristic polynomials of a pattern system.
pub fn characteristic_polynomial(sys: &EquationSystem) -> Result<Vec<Polynomial>, ExpressError> {
    eliminate(&sys.equations(), sys.unknowns.len())
}

/// One user-written relation `lhs ≃ rhs`; each side maps unknown names to
/// their shift polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEquation {
    pub lhs: BTreeMap<String, ShiftPolynomial>,
    pub rhs: BTreeMap<String, ShiftPolynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSystem {
    pub unknowns: Vec<String>,
    pub equations: Vec<RawEquation>,
}

/// Characteristic polynomials from hand-written relations, for systems
/// with auxiliary counts that no traced pattern provides.
pub fn characteristic_from_equations(sys: &RawSystem) -> Result<Vec<Polynomial>, ExpressError> {
    let mut rows = Vec::new();
    for eq in &sys.equations {
        let mut row = vec![ShiftPolynomial::zero(); sys.unknowns.len()];
        for (side, sign) in [(&eq.lhs, 1), (&eq.rhs, -1)] {
            for (name, s) in side {
                let i = sys
                    .unknowns
                    .iter()
                    .position(|u| u == name)
                    .ok_or_else(|| ExpressError::UnknownName(name.clone()))?;
                row[i] = row[i].add(&s.scale(sign));
            }
        }
        rows.push(row);
    }
    match eliminate(&rows, sys.unknowns.len()) {
        Err(ExpressError::Underdetermined { equations: 0, .. })
            if rows.len() >= sys.unknowns.len() =>
        {
            Err(ExpressError::Inconsistent)
        }
        r => r,
    }
}

/// Dynamical degree as reported: an isolating interval or exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynamicalDegree {
    One,
    Root(RootInterval),
}

impl DynamicalDegree {
    pub fn value(&self) -> f64 {
        match self {
            DynamicalDegree::One => 1.0,
            DynamicalDegree::Root(r) => r.midpoint(),
        }
    }
}

impl Serialize for DynamicalDegree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DynamicalDegree::One => s.serialize_str("1"),
            DynamicalDegree::Root(r) => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("lo", &r.lo.to_string())?;
                m.serialize_entry("hi", &r.hi.to_string())?;
                m.end()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    /// Integer coefficients, constant term first.
    #[serde(serialize_with = "ser_poly")]
    pub characteristic: Polynomial,
    #[serde(rename = "lambda")]
    pub dynamical_degree: DynamicalDegree,
    pub entropy: f64,
    pub integrable: bool,
    pub method: &'static str,
    /// Every polynomial examined, `characteristic` included.
    #[serde(serialize_with = "ser_polys")]
    pub candidates: Vec<Polynomial>,
    /// Orders `k` of the cyclotomic factors `Φ_k` of `characteristic`.
    pub unit_root_orders: Vec<u32>,
}

fn int_coeffs(p: &Polynomial) -> Vec<serde_json::Value> {
    p.coeffs()
        .iter()
        .map(|c| match c.to_integer().to_i64() {
            Some(v) if c.is_integer() => serde_json::Value::from(v),
            _ => serde_json::Value::from(c.to_string()),
        })
        .collect()
}

fn ser_poly<S: serde::Serializer>(p: &Polynomial, s: S) -> Result<S::Ok, S::Error> {
    int_coeffs(p).serialize(s)
}

fn ser_polys<S: serde::Serializer>(ps: &[Polynomial], s: S) -> Result<S::Ok, S::Error> {
    ps.iter().map(int_coeffs).collect::<Vec<_>>().serialize(s)
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Width of the reported isolating interval.
pub fn root_width() -> BigRational {
    rat(1, 1_000_000_000_000)
}

/// Integrable exactly when no polynomial has a real root above 1; the
/// dynamical degree is the largest such root over all polynomials.
pub fn verdict(polys: &[Polynomial]) -> Verdict {
    verdict_with_width(polys, &root_width())
}

/// [`verdict`] with the isolating interval narrowed to `width`.
pub fn verdict_with_width(polys: &[Polynomial], width: &BigRational) -> Verdict {
    assert!(!polys.is_empty(), "verdict needs at least one polynomial");
    let one = BigRational::one();
    let mut best: Option<(usize, RootInterval)> = None;
    for (i, p) in polys.iter().enumerate() {
        if let Some(r) = isolate_largest_real_root(p, &one, width) {
            let better = match &best {
                None => true,
                Some((_, b)) => r.lo > b.hi || (r.hi >= b.lo && r.midpoint() > b.midpoint()),
            };
            if better {
                best = Some((i, r));
            }
        }
    }
    let (idx, degree) = match best {
        Some((i, r)) => (i, DynamicalDegree::Root(r)),
        None => (0, DynamicalDegree::One),
    };
    let characteristic = polys[idx].clone();
    let unit_root_orders = cyclotomic_orders(&characteristic);
    Verdict {
        entropy: degree.value().ln(),
        integrable: degree == DynamicalDegree::One,
        dynamical_degree: degree,
        characteristic,
        method: "express",
        candidates: polys.to_vec(),
        unit_root_orders,
    }
}

/// `Φ_k` for `k ≥ 1`.
pub fn cyclotomic(k: u32) -> Polynomial {
    let mut p = Polynomial::monomial(BigRational::one(), k as usize);
    p = &p - &Polynomial::one();
    for d in 1..k {
        if k.is_multiple_of(d) {
            p = p.exact_div(&cyclotomic(d)).expect("Φ_d divides t^k - 1");
        }
    }
    p
}

/// Orders of the cyclotomic factors of `p`, ascending, with repetition.
pub fn cyclotomic_orders(p: &Polynomial) -> Vec<u32> {
    let deg = p.degree().unwrap_or(0);
    let mut rest = p.clone();
    let mut out = Vec::new();
    let limit = (2 * deg * deg).max(2) as u32;
    for k in 1..=limit {
        if rest.degree().unwrap_or(0) == 0 {
            break;
        }
        let phi = cyclotomic(k);
        if phi.degree().unwrap_or(0) > rest.degree().unwrap_or(0) {
            continue;
        }
        while let Some(q) = rest.exact_div(&phi) {
            out.push(k);
            rest = q;
        }
    }
    out
}

/// Pattern with `block` repeated `repeats` times, then `closing`.
pub fn late_confinement_pattern(
    id: &str,
    block: &[(ValueToken, u32)],
    repeats: usize,
    closing: &[(ValueToken, u32)],
) -> Result<PatternSpec, ExpressError> {
    if repeats == 0 || block.is_empty() {
        return Err(ExpressError::BadBlock);
    }
    let mut values = Vec::new();
    for _ in 0..repeats {
        values.extend_from_slice(block);
    }
    values.extend_from_slice(closing);
    PatternSpec::sequence(id, &values)
}

/// Characteristic polynomial of the late-confined pattern. The exclusive
/// values are those of the block, in order of first appearance.
pub fn late_confinement_polynomial(
    block: &[(ValueToken, u32)],
    repeats: usize,
    closing: &[(ValueToken, u32)],
) -> Result<Polynomial, ExpressError> {
    let pattern = late_confinement_pattern("Z", block, repeats, closing)?;
    let mut exclusive: Vec<ValueToken> = Vec::new();
    for (v, _) in block {
        if !exclusive.contains(v) {
            exclusive.push(v.clone());
        }
    }
    let sys = build_equations(&[pattern], &exclusive, &[])?;
    let mut polys = characteristic_polynomial(&sys)?;
    Ok(polys.remove(0))
}

/// The ℓ → ∞ limit of a late-confinement family whose relation reads
/// `1 = f · (1 + λ^-p + λ^-2p + ...)`: the cleared form of
/// `1 - λ^-p = f`, valid where `λ > 1`.
pub fn late_confinement_limit(f: &ShiftPolynomial, period: u32) -> Polynomial {
    let lhs = ShiftPolynomial::one().sub(&ShiftPolynomial::term(period as i64, 1));
    let d = lhs.sub(f);
    let off = d.min_shift().unwrap_or(0);
    to_lambda(&d.in_mu(off))
}

/// The two counts `A` (value `a` opening a length-`m` pattern
/// `{a, 0, ..., b, a}`) and `B` (pattern `{b, f, ∞, ∞, f', 0}`) of the
/// two-parameter map with `b ≠ 0`; exclusive values `a, b, ∞`.
pub fn bedford_kim_system(m: usize) -> Result<EquationSystem, ExpressError> {
    if m < 4 {
        return Err(ExpressError::BadPattern(format!(
            "A: length {m} needs m ≥ 4"
        )));
    }
    let a = ValueToken::Param("a".into());
    let b = ValueToken::Param("b".into());
    let e = |pos: usize, value: &ValueToken| SpecEntry {
        pos,
        value: value.clone(),
        mult: 1,
    };
    let pa = PatternSpec::new(
        "A",
        vec![
            e(0, &a),
            e(1, &ValueToken::zero()),
            e(m - 2, &b),
            e(m - 1, &a),
        ],
    )?;
    let pb = PatternSpec::new(
        "B",
        vec![
            e(0, &b),
            e(2, &ValueToken::Infinity),
            e(3, &ValueToken::Infinity),
            e(5, &ValueToken::zero()),
        ],
    )?;
    build_equations(&[pa, pb], &[a, b, ValueToken::Infinity], &[])
}

/// The pattern `{a, 0, -1, ∞, ∞, -1, 0, a}` of the map with `b = 0`.
pub fn bedford_kim_b0_pattern() -> PatternSpec {
    let a = ValueToken::Param("a".into());
    let minus_one = ValueToken::finite(-1, 1);
    PatternSpec::sequence(
        "A",
        &[
            (a.clone(), 1),
            (ValueToken::zero(), 1),
            (minus_one.clone(), 1),
            (ValueToken::Infinity, 1),
            (ValueToken::Infinity, 1),
            (minus_one, 1),
            (ValueToken::zero(), 1),
            (a, 1),
        ],
    )
    .expect("well-formed")
}

/// `λ^3 + λ^2 - 1 + λ^(m-1) (λ^3 - λ - 1)`.
pub fn bedford_kim_closed_form(m: usize) -> Polynomial {
    let mut c = vec![BigRational::zero(); m + 3];
    let mut add = |k: usize, v: i64| c[k] += BigRational::from_integer(v.into());
    add(3, 1);
    add(2, 1);
    add(0, -1);
    add(m + 2, 1);
    add(m, -1);
    add(m - 1, -1);
    Polynomial::from_coeffs(c)
}

/// Derivative of [`bedford_kim_closed_form`] at 1.
pub fn closed_form_slope_at_one(m: usize) -> i64 {
    let p = bedford_kim_closed_form(m).derivative();
    p.eval(&BigRational::one())
        .to_integer()
        .to_i64()
        .expect("small")
}
