//! Exact arithmetic: projective rationals, polynomials over fields, reduced
//! rational functions, truncated Laurent series and real-root isolation.

mod ext;
mod field;
mod laurent;
mod poly;
mod ratfun;
mod roots;

pub use ext::{parse_rational, ArithOp, ExtRational, Indeterminate};
pub use field::{euclid_gcd, Field, Fp, Fp61, Fp62};
pub use laurent::{sum_series, LaurentSeries, DEFAULT_PRECISION, MAX_PRECISION};
pub use poly::{Poly, Polynomial};
pub use ratfun::RationalFunction;
pub use roots::{
    cauchy_bound, count_roots_above, isolate_largest_real_root, rational_roots, RootInterval,
    SturmChain,
};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("series precision exhausted")]
    PrecisionExhausted,
    #[error("not an exact rational: {0:?}")]
    BadNumber(String),
}

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
