//! Singular values and ε-traced singularity patterns.
//!
//! A value `v` is singular when `x_n = v` makes `x_{n+1}` independent of
//! `x_{n-1}`. Tracing sets `x_{n-1} = g` and `x_n = v + ε` and iterates in
//! truncated Laurent series; each step records the ε → 0 limit. The pattern
//! is confined at the first step whose limit depends on the seed `g`,
//! detected by disagreement between three seed runs.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{
    parse_rational, rat, rational_roots, ArithError, ExtRational, LaurentSeries, Polynomial,
    DEFAULT_PRECISION, MAX_PRECISION,
};
use crate::mapping::{Mapping, MappingError};

/// Default number of traced steps.
pub const DEFAULT_MAX_STEPS: usize = 24;
/// Default index at which the singular value enters.
pub const DEFAULT_N_START: i64 = 2;

/// Probe seeds for `x_{n-1}`; the third breaks accidental ties.
pub fn probe_seeds() -> [BigRational; 3] {
    [rat(5, 1), rat(22, 7), rat(13, 3)]
}

/// Shift applied to a parameter when testing whether a traced value is
/// that parameter rather than a coincidence.
pub fn label_shift() -> BigRational {
    rat(1, 97)
}

/// A value appearing in a singularity pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueToken {
    Finite(BigRational),
    Infinity,
    Param(String),
    Stream {
        name: String,
        offset: i64,
    },
    /// A symbolic value written by hand, such as `z+a`; never resolved.
    Label(String),
    /// Dependence on initial data recovered.
    Free,
}

impl ValueToken {
    pub fn zero() -> Self {
        ValueToken::Finite(BigRational::zero())
    }

    pub fn finite(n: i64, d: i64) -> Self {
        ValueToken::Finite(rat(n, d))
    }

    /// Numeric value under the mapping's bindings at step `n`.
    pub fn resolve(&self, m: &Mapping, n: i64) -> Result<ExtRational, SingularityError> {
        match self {
            ValueToken::Finite(q) => Ok(ExtRational::from_rational(q)),
            ValueToken::Infinity => Ok(ExtRational::infinity()),
            ValueToken::Param(p) => m
                .parameters()
                .get(p)
                .cloned()
                .ok_or_else(|| SingularityError::UnboundToken(self.to_string())),
            ValueToken::Stream { name, offset } => {
                let s = m
                    .streams()
                    .get(name)
                    .ok_or_else(|| SingularityError::UnboundToken(self.to_string()))?;
                Ok(ExtRational::from_rational(&s.at(n + offset)?))
            }
            ValueToken::Label(_) | ValueToken::Free => {
                Err(SingularityError::UnboundToken(self.to_string()))
            }
        }
    }
}

impl fmt::Display for ValueToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueToken::Finite(q) => write!(f, "{q}"),
            ValueToken::Infinity => f.write_str("inf"),
            ValueToken::Param(p) => write!(f, "param:{p}"),
            ValueToken::Stream { name, offset: 0 } => write!(f, "stream:{name}"),
            ValueToken::Stream { name, offset } => write!(f, "stream:{name}[{offset:+}]"),
            ValueToken::Label(l) => write!(f, "label:{l}"),
            ValueToken::Free => f.write_str("free"),
        }
    }
}

impl FromStr for ValueToken {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(ValueToken::Infinity);
        }
        if s == "free" {
            return Ok(ValueToken::Free);
        }
        if let Some(l) = s.strip_prefix("label:") {
            return Ok(ValueToken::Label(l.to_string()));
        }
        if let Some(p) = s.strip_prefix("param:") {
            return Ok(ValueToken::Param(p.to_string()));
        }
        if let Some(rest) = s.strip_prefix("stream:") {
            let (name, offset) = match rest.find('[') {
                None => (rest, 0),
                Some(i) => {
                    let inner = rest[i + 1..]
                        .strip_suffix(']')
                        .ok_or_else(|| format!("bad stream token {s:?}"))?;
                    let off: i64 = inner
                        .trim_start_matches('+')
                        .parse()
                        .map_err(|_| format!("bad stream offset in {s:?}"))?;
                    (&rest[..i], off)
                }
            };
            return Ok(ValueToken::Stream {
                name: name.to_string(),
                offset,
            });
        }
        parse_rational(s)
            .map(ValueToken::Finite)
            .map_err(|e| e.to_string())
    }
}

impl Serialize for ValueToken {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ValueToken {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternEntry {
    pub value: ValueToken,
    pub mult: u32,
}

/// Leading behaviour of every seed run at one step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepEvidence {
    pub step: usize,
    pub leading: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternReport {
    pub entering: ValueToken,
    pub n_start: i64,
    pub entries: Vec<PatternEntry>,
    pub confined: bool,
    /// Number of forced entries, the entering value included.
    pub steps: Option<usize>,
    pub evidence: Vec<StepEvidence>,
}

impl PatternReport {
    /// Entries before the trailing `free`.
    pub fn forced(&self) -> &[PatternEntry] {
        match self.entries.last() {
            Some(e) if e.value == ValueToken::Free => &self.entries[..self.entries.len() - 1],
            _ => &self.entries,
        }
    }

    /// Compact form such as `{1, inf, param:a, 0, param:b}`.
    pub fn summary(&self) -> String {
        let items: Vec<String> = self
            .forced()
            .iter()
            .map(|e| {
                if e.mult > 1 {
                    format!("{}^{}", e.value, e.mult)
                } else {
                    e.value.to_string()
                }
            })
            .collect();
        format!("{{{}}}", items.join(", "))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SingularityError {
    #[error("singular values include irrational roots of {residual}")]
    NonRationalSingularity {
        rational: Vec<ValueToken>,
        residual: String,
    },
    #[error("series precision exhausted at {0} terms")]
    PrecisionExhausted(usize),
    #[error("token {0} cannot be resolved")]
    UnboundToken(String),
    #[error("the map does not depend on x[n-1]")]
    Degenerate,
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

impl From<ArithError> for SingularityError {
    fn from(e: ArithError) -> Self {
        SingularityError::Mapping(MappingError::Arith(e))
    }
}

/// `Σ_i t[i][j] v^i` for each `j`.
fn columns(t: &[Vec<BigRational>]) -> Vec<Polynomial> {
    let dy = t.first().map_or(0, |r| r.len());
    (0..dy)
        .map(|j| Polynomial::from_coeffs(t.iter().map(|row| row[j].clone()).collect()))
        .collect()
}

/// Values of `x_n` at step `n` that make `x_{n+1}` independent of
/// `x_{n-1}`. Infinity is reported only when its forced image is finite;
/// `x_n = ∞ ⇒ x_{n+1} = ∞` is the regular behaviour of a map that grows
/// at infinity.
pub fn find_singular_values(m: &Mapping, n: i64) -> Result<Vec<ValueToken>, SingularityError> {
    let s = m.specialize_q(n)?;
    let nc = columns(&s.num);
    let dc = columns(&s.den);
    let mut g = Polynomial::zero();
    for j in 0..nc.len() {
        for k in j + 1..nc.len() {
            let minor = &(&nc[j] * &dc[k]) - &(&nc[k] * &dc[j]);
            g = g.gcd(&minor);
        }
    }
    if g.is_zero() {
        return Err(SingularityError::Degenerate);
    }
    let mut out = Vec::new();
    let (roots, rest) =
        rational_roots(&g).ok_or_else(|| SingularityError::NonRationalSingularity {
            rational: Vec::new(),
            residual: g.display_in("v"),
        })?;
    out.extend(roots.into_iter().map(ValueToken::Finite));

    // top coefficients in v give the behaviour at v = ∞
    let (dx, _) = m.bidegree();
    let top_n: Vec<&BigRational> = s.num[dx].iter().collect();
    let top_d: Vec<&BigRational> = s.den[dx].iter().collect();
    let mut at_inf = true;
    for j in 0..top_n.len() {
        for k in j + 1..top_n.len() {
            if !(top_n[j] * top_d[k] - top_n[k] * top_d[j]).is_zero() {
                at_inf = false;
            }
        }
    }
    if at_inf && top_d.iter().any(|c| !c.is_zero()) {
        out.push(ValueToken::Infinity);
    }

    if rest.degree().unwrap_or(0) > 0 {
        return Err(SingularityError::NonRationalSingularity {
            rational: out,
            residual: rest.display_in("v"),
        });
    }
    Ok(out)
}

/// Limit token and multiplicity of one traced value.
fn classify(s: &LaurentSeries) -> (ValueToken, u32) {
    let v = s.valuation();
    if v < 0 {
        return (ValueToken::Infinity, (-v) as u32);
    }
    if v > 0 {
        return (ValueToken::zero(), v as u32);
    }
    let mult = s.coeffs()[1..]
        .iter()
        .position(|c| !c.is_zero())
        .map_or(1, |k| k as u32 + 1);
    (ValueToken::Finite(s.leading().clone()), mult)
}

fn leading_term(s: &LaurentSeries) -> String {
    format!("{} ε^{}", s.leading(), s.valuation())
}

fn entering_series(v: &ExtRational, precision: usize) -> LaurentSeries {
    match v.to_rational() {
        Some(q) => LaurentSeries::perturbed(&q, precision),
        None => {
            LaurentSeries::monomial(&BigRational::one(), -1, precision).expect("one is nonzero")
        }
    }
}

/// Series values `x_{n_start}, ...` for each seed, advanced in lockstep for
/// at most `steps` steps. With `until_split`, stops after the first step at
/// which the seeds disagree.
fn advance(
    m: &Mapping,
    entering: &ExtRational,
    seeds: &[BigRational],
    n_start: i64,
    steps: usize,
    until_split: bool,
    precision: usize,
) -> Result<Vec<Vec<LaurentSeries>>, MappingError> {
    let mut runs: Vec<Vec<LaurentSeries>> = seeds
        .iter()
        .map(|g| {
            Ok(vec![
                LaurentSeries::constant(g, precision)?,
                entering_series(entering, precision),
            ])
        })
        .collect::<Result<_, MappingError>>()?;
    for k in 0..steps {
        let n = n_start + k as i64;
        for xs in runs.iter_mut() {
            let next = m.step_series(n, &xs[k + 1], &xs[k])?;
            xs.push(next);
        }
        if until_split {
            let first = classify(&runs[0][k + 2]);
            if runs.iter().any(|xs| classify(&xs[k + 2]) != first) {
                break;
            }
        }
    }
    Ok(runs.into_iter().map(|mut xs| xs.split_off(1)).collect())
}

/// [`advance`] with the precision doubled on exhaustion.
fn run_seeds(
    m: &Mapping,
    entering: &ExtRational,
    seeds: &[BigRational],
    n_start: i64,
    steps: usize,
    until_split: bool,
) -> Result<Vec<Vec<LaurentSeries>>, SingularityError> {
    let mut precision = DEFAULT_PRECISION;
    loop {
        match advance(m, entering, seeds, n_start, steps, until_split, precision) {
            Ok(r) => return Ok(r),
            Err(MappingError::Arith(ArithError::PrecisionExhausted)) => {
                if precision >= MAX_PRECISION {
                    return Err(SingularityError::PrecisionExhausted(precision));
                }
                precision *= 2;
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Traces one singular value for up to `max_steps` steps.
pub fn trace_singularity(
    m: &Mapping,
    entering: &ValueToken,
    n_start: i64,
    max_steps: usize,
) -> Result<PatternReport, SingularityError> {
    let v = entering.resolve(m, n_start)?;
    let seeds = probe_seeds();
    let runs = run_seeds(m, &v, &seeds, n_start, max_steps.saturating_sub(1), true)?;
    let mut entries = vec![PatternEntry {
        value: ValueToken::Finite(BigRational::zero()),
        mult: 1,
    }];
    entries[0].value = match v.to_rational() {
        Some(q) => ValueToken::Finite(q),
        None => ValueToken::Infinity,
    };
    let mut evidence = Vec::new();
    let mut confined = false;
    for step in 1..runs[0].len() {
        let looks: Vec<(ValueToken, u32)> = runs.iter().map(|r| classify(&r[step])).collect();
        evidence.push(StepEvidence {
            step,
            leading: runs.iter().map(|r| leading_term(&r[step])).collect(),
        });
        if looks.iter().all(|l| *l == looks[0]) {
            let (value, mult) = looks[0].clone();
            entries.push(PatternEntry { value, mult });
        } else {
            entries.push(PatternEntry {
                value: ValueToken::Free,
                mult: 1,
            });
            confined = true;
            break;
        }
    }
    let steps = confined.then(|| entries.len() - 1);
    let mut report = PatternReport {
        entering: entering.clone(),
        n_start,
        entries,
        confined,
        steps,
        evidence,
    };
    if confined {
        label_parameters(m, &mut report)?;
    }
    if let ValueToken::Finite(_) = entering {
        report.entering = report.entries[0].value.clone();
    }
    Ok(report)
}

/// Relabels finite entries equal to a parameter value when the equality
/// survives shifting that parameter. Only confined patterns are relabelled;
/// a long unconfined run under a shifted parameter can be very costly.
fn label_parameters(m: &Mapping, report: &mut PatternReport) -> Result<(), SingularityError> {
    let len = report.forced().len();
    for (name, value) in m.parameters() {
        let Some(pv) = value.to_rational() else {
            continue;
        };
        let hits: Vec<usize> = (0..len)
            .filter(|&i| report.entries[i].value == ValueToken::Finite(pv.clone()))
            .collect();
        if hits.is_empty() {
            continue;
        }
        let shifted = &pv + label_shift();
        let pm = m.with_parameter(name, shifted.clone())?;
        let entering = match &report.entering {
            ValueToken::Finite(q) if *q == pv => ExtRational::from_rational(&shifted),
            other => other.resolve(&pm, report.n_start)?,
        };
        // no precision retries: a failed check only leaves the value unlabelled
        let run = advance(
            &pm,
            &entering,
            &probe_seeds()[..1],
            report.n_start,
            len.saturating_sub(1),
            false,
            DEFAULT_PRECISION,
        );
        let Ok(run) = run else {
            continue;
        };
        let run = &run[0];
        // the rest of the pattern must keep its shape under the shift
        let same_shape = (0..len.min(run.len())).all(|i| {
            let (t, _) = classify(&run[i]);
            matches!(
                (&t, &report.entries[i].value),
                (ValueToken::Infinity, ValueToken::Infinity)
                    | (ValueToken::Finite(_), ValueToken::Finite(_))
                    | (ValueToken::Finite(_), ValueToken::Param(_))
            )
        });
        if !same_shape {
            continue;
        }
        for i in hits {
            if classify(&run[i]).0 == ValueToken::Finite(shifted.clone()) {
                report.entries[i].value = ValueToken::Param(name.clone());
            }
        }
    }
    Ok(())
}

/// Traces a singularity of a mapping whose stream only satisfies a
/// late-confinement constraint. Same contract as [`trace_singularity`].
pub fn pattern_for_late_confinement(
    m: &Mapping,
    entering: &ValueToken,
    max_steps: usize,
) -> Result<PatternReport, SingularityError> {
    trace_singularity(m, entering, DEFAULT_N_START, max_steps)
}

/// Replays the forced values of a confined pattern through exact projective
/// steps. Returns the replayed values up to (excluding) the first
/// indeterminate step and that step's index, if any.
pub fn replay(
    m: &Mapping,
    report: &PatternReport,
    seed: &BigRational,
) -> Result<(Vec<ExtRational>, Option<usize>), SingularityError> {
    let len = report.entries.len();
    let mut prev = ExtRational::from_rational(seed);
    let mut cur = report.entering.resolve(m, report.n_start)?;
    let mut values = vec![cur.clone()];
    for k in 1..len {
        match m.step(report.n_start + k as i64 - 1, &cur, &prev) {
            Ok(next) => {
                prev = cur;
                cur = next;
                values.push(cur.clone());
            }
            Err(MappingError::Indeterminate) => return Ok((values, Some(k))),
            Err(e) => return Err(e.into()),
        }
    }
    Ok((values, None))
}
