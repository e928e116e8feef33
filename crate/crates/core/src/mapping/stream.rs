//! n-dependent coefficient streams.

use std::sync::Mutex;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::parse_rational;
use crate::qserde;

use super::MappingError;

/// Definition of a coefficient stream, also its JSON form
/// `{"kind": ..., "data": ...}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawStream", into = "RawStream")]
pub enum StreamSpec {
    Constant(BigRational),
    /// Coefficients of `c0 + c1 n + c2 n^2 + ...`.
    Polynomial(Vec<BigRational>),
    /// `values[n mod len]`.
    Periodic(Vec<BigRational>),
    /// `a_n = Σ_{k=1..r} coeffs[k-1] a_{n-k}` with `a_0..a_{r-1} = initial`.
    Recurrence {
        coeffs: Vec<BigRational>,
        initial: Vec<BigRational>,
    },
}

#[derive(Serialize, Deserialize)]
struct QList(#[serde(with = "qserde::vec")] Vec<BigRational>);

#[derive(Serialize, Deserialize)]
struct RecurrenceData {
    #[serde(with = "qserde::vec")]
    coeffs: Vec<BigRational>,
    #[serde(with = "qserde::vec")]
    initial: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct RawStream {
    kind: String,
    data: serde_json::Value,
}

impl From<StreamSpec> for RawStream {
    fn from(s: StreamSpec) -> Self {
        let (kind, data) = match s {
            StreamSpec::Constant(c) => ("constant", serde_json::Value::String(c.to_string())),
            StreamSpec::Polynomial(v) => ("polynomial", serde_json::to_value(QList(v)).unwrap()),
            StreamSpec::Periodic(v) => ("periodic", serde_json::to_value(QList(v)).unwrap()),
            StreamSpec::Recurrence { coeffs, initial } => (
                "recurrence",
                serde_json::to_value(RecurrenceData { coeffs, initial }).unwrap(),
            ),
        };
        RawStream {
            kind: kind.to_string(),
            data,
        }
    }
}

impl TryFrom<RawStream> for StreamSpec {
    type Error = String;

    fn try_from(r: RawStream) -> Result<Self, String> {
        let e = |x: serde_json::Error| x.to_string();
        Ok(match r.kind.as_str() {
            "constant" => {
                let s: String = serde_json::from_value(r.data).map_err(e)?;
                StreamSpec::Constant(parse_rational(&s).map_err(|x| x.to_string())?)
            }
            "polynomial" => {
                StreamSpec::Polynomial(serde_json::from_value::<QList>(r.data).map_err(e)?.0)
            }
            "periodic" => {
                StreamSpec::Periodic(serde_json::from_value::<QList>(r.data).map_err(e)?.0)
            }
            "recurrence" => {
                let d: RecurrenceData = serde_json::from_value(r.data).map_err(e)?;
                StreamSpec::Recurrence {
                    coeffs: d.coeffs,
                    initial: d.initial,
                }
            }
            other => return Err(format!("unknown stream kind {other:?}")),
        })
    }
}

/// A stream with memoized evaluation.
#[derive(Debug)]
pub struct CoefficientStream {
    spec: StreamSpec,
    forward: Mutex<Vec<BigRational>>,
    backward: Mutex<Vec<BigRational>>,
}

impl Clone for CoefficientStream {
    fn clone(&self) -> Self {
        CoefficientStream::new(self.spec.clone()).expect("spec already validated")
    }
}

impl PartialEq for CoefficientStream {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for CoefficientStream {}

impl CoefficientStream {
    pub fn new(spec: StreamSpec) -> Result<Self, MappingError> {
        let bad = |m: &str| Err(MappingError::BadStream(m.to_string()));
        match &spec {
            StreamSpec::Polynomial(c) if c.is_empty() => return bad("empty polynomial"),
            StreamSpec::Periodic(v) if v.is_empty() => return bad("empty period"),
            StreamSpec::Recurrence { coeffs, initial }
                if coeffs.is_empty() || coeffs.len() != initial.len() =>
            {
                return bad("recurrence needs r coefficients and r initial values")
            }
            _ => {}
        }
        let forward = match &spec {
            StreamSpec::Recurrence { initial, .. } => initial.clone(),
            _ => Vec::new(),
        };
        Ok(CoefficientStream {
            spec,
            forward: Mutex::new(forward),
            backward: Mutex::new(Vec::new()),
        })
    }

    pub fn spec(&self) -> &StreamSpec {
        &self.spec
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(StreamSpec::Constant(c)).expect("valid")
    }

    pub fn polynomial(c: Vec<BigRational>) -> Result<Self, MappingError> {
        Self::new(StreamSpec::Polynomial(c))
    }

    pub fn periodic(v: Vec<BigRational>) -> Result<Self, MappingError> {
        Self::new(StreamSpec::Periodic(v))
    }

    pub fn recurrence(
        coeffs: Vec<BigRational>,
        initial: Vec<BigRational>,
    ) -> Result<Self, MappingError> {
        Self::new(StreamSpec::Recurrence { coeffs, initial })
    }

    /// Value at index `n`. Negative indices extend polynomial and periodic
    /// streams naturally and run recurrences backwards when the last
    /// coefficient is nonzero.
    pub fn at(&self, n: i64) -> Result<BigRational, MappingError> {
        match &self.spec {
            StreamSpec::Constant(c) => Ok(c.clone()),
            StreamSpec::Polynomial(c) => {
                let x = BigRational::from_integer(n.into());
                Ok(c.iter()
                    .rev()
                    .fold(BigRational::zero(), |acc, k| acc * &x + k))
            }
            StreamSpec::Periodic(v) => Ok(v[n.rem_euclid(v.len() as i64) as usize].clone()),
            StreamSpec::Recurrence { coeffs, initial } => {
                if n >= 0 {
                    Ok(self.forward_at(coeffs, n as usize))
                } else {
                    self.backward_at(coeffs, initial, (-n) as usize)
                }
            }
        }
    }

    fn forward_at(&self, coeffs: &[BigRational], n: usize) -> BigRational {
        let mut memo = self.forward.lock().unwrap_or_else(|e| e.into_inner());
        while memo.len() <= n {
            let k = memo.len();
            let next = coeffs
                .iter()
                .enumerate()
                .fold(BigRational::zero(), |acc, (i, c)| {
                    acc + c * &memo[k - 1 - i]
                });
            memo.push(next);
        }
        memo[n].clone()
    }

    /// `m ≥ 1`: value at index `-m`.
    fn backward_at(
        &self,
        coeffs: &[BigRational],
        initial: &[BigRational],
        m: usize,
    ) -> Result<BigRational, MappingError> {
        let r = coeffs.len();
        let last = &coeffs[r - 1];
        if last.is_zero() {
            return Err(MappingError::BadStream(
                "recurrence cannot be extended to negative indices".into(),
            ));
        }
        let mut memo = self.backward.lock().unwrap_or_else(|e| e.into_inner());
        // value at index j (j > -len-1) from initial or memo
        let get = |memo: &Vec<BigRational>, j: i64| -> BigRational {
            if j >= 0 {
                initial[j as usize].clone()
            } else {
                memo[(-j - 1) as usize].clone()
            }
        };
        while memo.len() < m {
            // a_t = Σ c_k a_{t-k} with t = -len - 1 + r, solved for a_{t-r}
            let target = -(memo.len() as i64) - 1;
            let t = target + r as i64;
            let mut s = get(&memo, t);
            for k in 1..r {
                s -= &coeffs[k - 1] * get(&memo, t - k as i64);
            }
            memo.push(s / last);
        }
        Ok(memo[m - 1].clone())
    }

    /// The defining recurrence residual at `n` (zero for consistent streams).
    pub fn recurrence_residual(&self, n: i64) -> Option<BigRational> {
        let StreamSpec::Recurrence { coeffs, .. } = &self.spec else {
            return None;
        };
        let mut s = self.at(n).ok()?;
        for (k, c) in coeffs.iter().enumerate() {
            s -= c * self.at(n - 1 - k as i64).ok()?;
        }
        Some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn affine_polynomial_stream() {
        let s = CoefficientStream::polynomial(vec![rat(1, 1), rat(1, 2)]).unwrap();
        assert_eq!(s.at(4).unwrap(), rat(3, 1));
        assert_eq!(s.at(-2).unwrap(), rat(0, 1));
    }

    #[test]
    fn periodic_wraps_negative_indices() {
        let s = CoefficientStream::periodic(vec![rat(1, 1), rat(2, 1), rat(3, 1)]).unwrap();
        assert_eq!(s.at(-1).unwrap(), rat(3, 1));
        assert_eq!(s.at(5).unwrap(), rat(3, 1));
    }

    #[test]
    fn recurrence_runs_both_ways() {
        // a_n = a_{n-1} + a_{n-2} - a_{n-3}
        let s = CoefficientStream::recurrence(
            vec![rat(1, 1), rat(1, 1), rat(-1, 1)],
            vec![rat(1, 1), rat(2, 1), rat(5, 2)],
        )
        .unwrap();
        assert_eq!(s.at(3).unwrap(), rat(7, 2));
        for n in -6..20 {
            assert_eq!(s.recurrence_residual(n), Some(rat(0, 1)), "n = {n}");
        }
        assert_eq!(s.at(10).unwrap(), s.clone().at(10).unwrap());
    }

    #[test]
    fn json_shape() {
        let spec = StreamSpec::Periodic(vec![rat(1, 1), rat(-5, 3)]);
        let j = serde_json::to_string(&spec).unwrap();
        assert_eq!(j, r#"{"kind":"periodic","data":["1","-5/3"]}"#);
        let back: StreamSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, spec);
    }
}
