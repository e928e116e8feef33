//! Degree sequences of iterates and growth classification.
//!
//! Iterates start from a constant `x_0` and `x_1 = z`; each `x_n` is a
//! reduced rational function of `z` and `d_n` is its degree. Coefficients
//! over Q grow quickly, so the default backend computes the iterates over
//! two word-sized prime fields and keeps the larger degree at each index.
//! Degrees of modular images never exceed the rational degree, and a drop
//! needs the prime to divide a specific resultant, which two unrelated
//! 61-bit primes make negligible.

use std::sync::atomic::{AtomicBool, Ordering};

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{rat, ExtRational, Field, Fp61, Fp62, RationalFunction};
use crate::mapping::{CoefficientStream, Mapping, MappingError};

/// Default cap on the degree of an iterate.
pub const DEFAULT_DEGREE_CAP: usize = 5000;

/// Confirmation seed of the two-seed genericity check.
pub fn confirmation_seed() -> ExtRational {
    ExtRational::new(22, 7)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSequence {
    pub mapping: String,
    pub seed: ExtRational,
    pub degrees: Vec<usize>,
}

impl DegreeSequence {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,d_n\n");
        for (n, d) in self.degrees.iter().enumerate() {
            s.push_str(&format!("{n},{d}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DegreeError {
    #[error("seed {seed} is not generic: degrees differ from seed {other} at n = {index}")]
    NonGenericSeed {
        seed: ExtRational,
        other: ExtRational,
        index: usize,
    },
    #[error("degree cap {cap} exceeded after {} terms", partial.degrees.len())]
    DegreeCapExceeded { cap: usize, partial: DegreeSequence },
    #[error("iteration cancelled")]
    Cancelled,
    #[error("n_max must be at least 2")]
    TooFewTerms,
    #[error("seed must be finite")]
    InfiniteSeed,
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    /// Iteration over two prime fields.
    #[default]
    Modular,
    /// Iteration over Q.
    Exact,
}

#[derive(Clone, Debug)]
pub struct DegreeOptions<'a> {
    pub cap: usize,
    pub backend: Backend,
    /// Skip the two-seed genericity confirmation.
    pub single_seed: bool,
    /// Checked between steps; when set, the iteration stops with `Cancelled`.
    pub cancel: Option<&'a AtomicBool>,
}

impl Default for DegreeOptions<'_> {
    fn default() -> Self {
        DegreeOptions {
            cap: DEFAULT_DEGREE_CAP,
            backend: Backend::Modular,
            single_seed: false,
            cancel: None,
        }
    }
}

/// The reduced iterates `x_0 .. x_{n_max}` over the field `F`, stopping
/// early when a degree exceeds `cap`. The second value reports the stop.
pub fn iterates<F: Field>(
    m: &Mapping,
    n_max: usize,
    x0: &ExtRational,
    cap: usize,
    cancel: Option<&AtomicBool>,
) -> Result<(Vec<RationalFunction<F>>, bool), DegreeError> {
    let q0 = x0.to_rational().ok_or(DegreeError::InfiniteSeed)?;
    let c0 = F::from_rational(&q0).ok_or(MappingError::UnluckyPrime)?;
    let mut xs = vec![RationalFunction::constant(c0), RationalFunction::var()];
    let (dx, dy) = m.bidegree();
    while xs.len() <= n_max {
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Err(DegreeError::Cancelled);
        }
        let k = xs.len();
        let (cur, prev) = (&xs[k - 1], &xs[k - 2]);
        // unreduced degree bound: guards the cost of one step
        if dx * cur.degree() + dy * prev.degree() > 8 * cap {
            return Ok((xs, true));
        }
        let next = m.step_symbolic((k - 1) as i64, cur, prev)?;
        if next.degree() > cap {
            return Ok((xs, true));
        }
        xs.push(next);
    }
    Ok((xs, false))
}

fn degrees_over<F: Field>(
    m: &Mapping,
    n_max: usize,
    x0: &ExtRational,
    opts: &DegreeOptions,
) -> Result<(Vec<usize>, bool), DegreeError> {
    let (xs, capped) = iterates::<F>(m, n_max, x0, opts.cap, opts.cancel)?;
    Ok((xs.iter().map(|x| x.degree()).collect(), capped))
}

fn degrees_single(
    m: &Mapping,
    n_max: usize,
    x0: &ExtRational,
    opts: &DegreeOptions,
) -> Result<(Vec<usize>, bool), DegreeError> {
    match opts.backend {
        Backend::Exact => degrees_over::<BigRational>(m, n_max, x0, opts),
        Backend::Modular => {
            let (a, b) = std::thread::scope(|s| {
                let a = s.spawn(|| degrees_over::<Fp61>(m, n_max, x0, opts));
                let b = degrees_over::<Fp62>(m, n_max, x0, opts);
                (a.join().expect("degree thread panicked"), b)
            });
            match (a, b) {
                (Ok((da, ca)), Ok((db, cb))) => {
                    let len = da.len().min(db.len());
                    let d = (0..len).map(|i| da[i].max(db[i])).collect();
                    Ok((d, ca || cb))
                }
                // a 0/0 or an unmappable coefficient modulo one prime only
                (Ok(r), Err(DegreeError::Mapping(_))) | (Err(DegreeError::Mapping(_)), Ok(r)) => {
                    Ok(r)
                }
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
    }
}

/// `d_0 .. d_{n_max}` with the two-seed genericity check.
pub fn degree_sequence(
    m: &Mapping,
    n_max: usize,
    x0: &ExtRational,
) -> Result<DegreeSequence, DegreeError> {
    degree_sequence_with(m, n_max, x0, &DegreeOptions::default())
}

pub fn degree_sequence_with(
    m: &Mapping,
    n_max: usize,
    x0: &ExtRational,
    opts: &DegreeOptions,
) -> Result<DegreeSequence, DegreeError> {
    if n_max < 2 {
        return Err(DegreeError::TooFewTerms);
    }
    let other = if *x0 == confirmation_seed() {
        ExtRational::from_integer(5)
    } else {
        confirmation_seed()
    };
    let (main, confirm) = std::thread::scope(|s| {
        let confirm =
            (!opts.single_seed).then(|| s.spawn(|| degrees_single(m, n_max, &other, opts)));
        let main = degrees_single(m, n_max, x0, opts);
        (
            main,
            confirm.map(|h| h.join().expect("degree thread panicked")),
        )
    });
    let (degrees, capped) = main?;
    if let Some(confirm) = confirm {
        let (check, _) = confirm?;
        if let Some(index) = degrees.iter().zip(&check).position(|(a, b)| a != b) {
            return Err(DegreeError::NonGenericSeed {
                seed: x0.clone(),
                other,
                index,
            });
        }
    }
    let seq = DegreeSequence {
        mapping: m.name().to_string(),
        seed: x0.clone(),
        degrees,
    };
    if capped {
        return Err(DegreeError::DegreeCapExceeded {
            cap: opts.cap,
            partial: seq,
        });
    }
    Ok(seq)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Growth {
    Bounded,
    Polynomial { order: usize },
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthVerdict {
    pub classification: Growth,
    /// `[min, max]` of the last three ratios `d_{n+1}/d_n`.
    pub lambda_estimate: Option<(f64, f64)>,
    /// Geometric mean of the last three ratios.
    pub lambda_point: Option<f64>,
    /// The final ratio `d_N / d_{N-1}`.
    pub last_ratio: Option<f64>,
    pub entropy_estimate: f64,
    pub caveat: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrowthError {
    #[error("need at least 8 terms, got {0}")]
    TooShort(usize),
}

const MAX_DIFF_ORDER: usize = 4;
const MAX_LAG: usize = 12;
const TAIL: usize = 3;

/// `(1 - S^lag)^k` applied to `d`.
fn lagged_difference(d: &[i64], lag: usize, k: usize) -> Vec<i64> {
    let mut v = d.to_vec();
    for _ in 0..k {
        if v.len() <= lag {
            return Vec::new();
        }
        v = (lag..v.len()).map(|i| v[i] - v[i - lag]).collect();
    }
    v
}

/// Classifies a degree sequence.
///
/// Polynomial growth of order `k` is detected when some lagged difference
/// `(1 - S^p)^k d` is constant on its last three values, which absorbs
/// periodic perturbations of period up to 12. A constant zero at order `k`
/// means order `k - 1`; order 0 is bounded.
pub fn classify_growth(d: &[usize]) -> Result<GrowthVerdict, GrowthError> {
    if d.len() < 8 {
        return Err(GrowthError::TooShort(d.len()));
    }
    let di: Vec<i64> = d.iter().map(|&x| x as i64).collect();
    for k in 1..=MAX_DIFF_ORDER {
        for lag in 1..=MAX_LAG {
            let v = lagged_difference(&di, lag, k);
            if v.len() < TAIL {
                continue;
            }
            let tail = &v[v.len() - TAIL..];
            if tail.iter().all(|&x| x == tail[0]) {
                let order = if tail[0] == 0 { k - 1 } else { k };
                let classification = if order == 0 {
                    Growth::Bounded
                } else {
                    Growth::Polynomial { order }
                };
                return Ok(GrowthVerdict {
                    classification,
                    lambda_estimate: None,
                    lambda_point: None,
                    last_ratio: None,
                    entropy_estimate: 0.0,
                    caveat: "finite-difference test on a truncated sequence",
                });
            }
        }
    }
    let n = d.len();
    let ratios: Vec<f64> = (n - TAIL..n)
        .map(|i| d[i] as f64 / d[i - 1].max(1) as f64)
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let point = ratios.iter().product::<f64>().powf(1.0 / TAIL as f64);
    Ok(GrowthVerdict {
        classification: Growth::Exponential,
        lambda_estimate: Some((lo, hi)),
        lambda_point: Some(point),
        last_ratio: ratios.last().copied(),
        entropy_estimate: point.ln().max(0.0),
        caveat: "estimated from the last three ratios of a truncated sequence",
    })
}

/// Closed form of the degrees of the first QRT-type example:
/// `d_n = (6n^2 + 17 - 9(-1)^n - 4(j^n + j^{2n})) / 36`, `j = e^{2πi/3}`.
pub fn qrt_closed_form(n: u64) -> i64 {
    let n = n as i64;
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let roots = if n % 3 == 0 { 2 } else { -1 };
    let v = 6 * n * n + 17 - 9 * sign - 4 * roots;
    debug_assert_eq!(v % 36, 0);
    v / 36
}

/// True iff `Σ_k coeffs[k] d_{n-k} = inhom(n)` for every `n ≥ order`.
pub fn verify_recurrence(d: &[i64], coeffs: &[BigRational], inhom: &CoefficientStream) -> bool {
    let order = coeffs.len().saturating_sub(1);
    if d.len() <= order {
        return false;
    }
    (order..d.len()).all(|n| {
        let lhs = coeffs
            .iter()
            .enumerate()
            .fold(<BigRational as Zero>::zero(), |acc, (k, c)| {
                acc + c * rat(d[n - k], 1)
            });
        inhom.at(n as i64).is_ok_and(|r| r == lhs)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::catalog;

    fn five() -> ExtRational {
        ExtRational::from_integer(5)
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(qrt_closed_form(0), 0);
        assert_eq!(qrt_closed_form(5), 5);
        assert_eq!(qrt_closed_form(14), 33);
    }

    #[test]
    fn qrt_sequence_exact_and_modular_agree() {
        let m = catalog::get("eq1-qrt").unwrap();
        let expect = [0, 1, 1, 2, 3, 5, 6, 9, 11, 14, 17, 21, 24, 29, 33];
        let modular = degree_sequence(&m, 14, &five()).unwrap();
        assert_eq!(modular.degrees, expect);
        let opts = DegreeOptions {
            backend: Backend::Exact,
            single_seed: true,
            ..Default::default()
        };
        let exact = degree_sequence_with(&m, 10, &five(), &opts).unwrap();
        assert_eq!(exact.degrees, expect[..=10]);
    }

    #[test]
    fn classification_of_known_shapes() {
        let qrt = [0, 1, 1, 2, 3, 5, 6, 9, 11, 14, 17, 21, 24, 29, 33];
        let v = classify_growth(&qrt).unwrap();
        assert_eq!(v.classification, Growth::Polynomial { order: 2 });
        assert_eq!(v.entropy_estimate, 0.0);
        assert_eq!(
            classify_growth(&[1; 10]).unwrap().classification,
            Growth::Bounded
        );
        let hv = [0, 1, 3, 8, 21, 55, 144, 377, 987];
        let v = classify_growth(&hv).unwrap();
        assert_eq!(v.classification, Growth::Exponential);
        let (lo, hi) = v.lambda_estimate.unwrap();
        assert!(lo >= 2.55 && hi <= 2.68);
        assert!(matches!(
            classify_growth(&[0, 1]),
            Err(GrowthError::TooShort(2))
        ));
    }

    #[test]
    fn recurrence_checks() {
        let d: Vec<i64> = (0..15).map(qrt_closed_form).collect();
        let c = |v: &[i64]| v.iter().map(|&k| rat(k, 1)).collect::<Vec<_>>();
        let alt = CoefficientStream::periodic(c(&[0, 2])).unwrap();
        assert!(verify_recurrence(&d, &c(&[1, -1, 0, -1, 1]), &alt));
        let zero = CoefficientStream::constant(rat(0, 1));
        assert!(verify_recurrence(&[4; 6], &c(&[1, -1]), &zero));
        assert!(!verify_recurrence(&d, &c(&[1, -2, 1]), &zero));
    }

    #[test]
    fn csv_and_json_shapes() {
        let s = DegreeSequence {
            mapping: "m".into(),
            seed: five(),
            degrees: vec![0, 1, 2],
        };
        assert_eq!(s.to_csv(), "n,d_n\n0,0\n1,1\n2,2\n");
        let j: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(j["seed"], "5");
        assert_eq!(j["degrees"][2], 2);
    }
}
