//! Height growth of exact rational orbits as an estimate of the dynamical
//! degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::{rat, ExtRational};
use crate::mapping::{Mapping, MappingError};

/// Default limit on the bit length of any orbit coordinate.
pub const DEFAULT_BIT_BUDGET: u64 = 10_000_000;
pub const DEFAULT_RETRIES: usize = 5;

/// Default orbit seeds `x0`, `x1`.
pub fn default_seeds() -> (ExtRational, ExtRational) {
    (ExtRational::new(2, 7), ExtRational::new(5, 3))
}

/// Natural log of `|v|` for `v ≠ 0`, valid far beyond the `f64` range.
fn ln_abs(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = v.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln max(|p|, |q|)` of a reduced `p/q`; 0 at ∞.
pub fn height(x: &ExtRational) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    let m = std::cmp::max(x.numer().abs(), x.denom().abs());
    ln_abs(&m)
}

fn bits(x: &ExtRational) -> u64 {
    x.numer().bits().max(x.denom().bits())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightSample {
    pub n: usize,
    pub h: f64,
    /// `h_n / h_{n-1}` when the previous height is positive.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightTrace {
    pub mapping: String,
    pub x0: ExtRational,
    pub x1: ExtRational,
    pub retries: usize,
    pub samples: Vec<HeightSample>,
    pub lambda_last: f64,
    pub lambda_fit: f64,
}

impl HeightTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,h_n,ratio\n");
        for s in &self.samples {
            let r = s.ratio.map(|r| r.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", s.n, s.h, r));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiophantineError {
    #[error("orbit hit an indeterminate form after {retries} retries")]
    SingularOrbit { retries: usize },
    #[error("height at step {n} exceeds {budget} bits")]
    HeightOverflow { n: usize, budget: u64 },
    #[error("at least 5 iterations are needed")]
    TooFewIterations,
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

#[derive(Clone, Copy, Debug)]
pub struct DiophOptions {
    pub bit_budget: u64,
    pub max_retries: usize,
    /// Stop early, after at least five steps, once a coordinate reaches this
    /// many bits.
    pub stop_bits: Option<u64>,
}

impl Default for DiophOptions {
    fn default() -> Self {
        DiophOptions {
            bit_budget: DEFAULT_BIT_BUDGET,
            max_retries: DEFAULT_RETRIES,
            stop_bits: None,
        }
    }
}

/// `exp` of the least-squares slope of `ln h_n` against `n` over the final
/// half of the samples with positive height.
pub fn fit_lambda(samples: &[HeightSample]) -> f64 {
    let pts: Vec<(f64, f64)> = samples[samples.len() / 2..]
        .iter()
        .filter(|s| s.h > 0.0)
        .map(|s| (s.n as f64, s.h.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}

fn orbit(
    m: &Mapping,
    x0: &ExtRational,
    x1: &ExtRational,
    n_iter: usize,
    opts: &DiophOptions,
) -> Result<Vec<ExtRational>, DiophantineError> {
    let mut xs = vec![x0.clone(), x1.clone()];
    for k in 1..n_iter {
        let next = m.step(k as i64 - 1, &xs[k], &xs[k - 1])?;
        let b = bits(&next);
        if b > opts.bit_budget {
            return Err(DiophantineError::HeightOverflow {
                n: k + 1,
                budget: opts.bit_budget,
            });
        }
        xs.push(next);
        if k >= 4 && opts.stop_bits.is_some_and(|s| b >= s) {
            break;
        }
    }
    Ok(xs)
}

/// Iterates `n_iter` steps from `(x0, x1)` and records the heights. An
/// indeterminate step restarts the orbit with `x1` shifted by `1/(r + 2)`.
pub fn diophantine_degree(
    m: &Mapping,
    x0: &ExtRational,
    x1: &ExtRational,
    n_iter: usize,
) -> Result<HeightTrace, DiophantineError> {
    diophantine_degree_with(m, x0, x1, n_iter, DiophOptions::default())
}

pub fn diophantine_degree_with(
    m: &Mapping,
    x0: &ExtRational,
    x1: &ExtRational,
    n_iter: usize,
    opts: DiophOptions,
) -> Result<HeightTrace, DiophantineError> {
    if n_iter < 5 {
        return Err(DiophantineError::TooFewIterations);
    }
    let mut seed1 = x1.clone();
    for retry in 0..=opts.max_retries {
        match orbit(m, x0, &seed1, n_iter, &opts) {
            Ok(xs) => return Ok(trace(m, x0, &seed1, retry, &xs)),
            Err(DiophantineError::Mapping(MappingError::Indeterminate)) => {
                let shift = ExtRational::from_rational(&rat(1, retry as i64 + 2));
                seed1 = match seed1.add(&shift) {
                    Ok(s) => s,
                    Err(_) => ExtRational::from_rational(&BigRational::from_integer(
                        (retry as i64 + 2).into(),
                    )),
                };
            }
            Err(e) => return Err(e),
        }
    }
    Err(DiophantineError::SingularOrbit {
        retries: opts.max_retries,
    })
}

fn trace(
    m: &Mapping,
    x0: &ExtRational,
    x1: &ExtRational,
    retries: usize,
    xs: &[ExtRational],
) -> HeightTrace {
    let mut samples: Vec<HeightSample> = Vec::with_capacity(xs.len());
    for (n, x) in xs.iter().enumerate() {
        let h = height(x);
        let ratio = samples.last().filter(|p| p.h > 0.0).map(|p| h / p.h);
        samples.push(HeightSample { n, h, ratio });
    }
    let lambda_last = samples.last().and_then(|s| s.ratio).unwrap_or(f64::NAN);
    let lambda_fit = fit_lambda(&samples);
    HeightTrace {
        mapping: m.name().to_string(),
        x0: x0.clone(),
        x1: x1.clone(),
        retries,
        samples,
        lambda_last,
        lambda_fit,
    }
}
