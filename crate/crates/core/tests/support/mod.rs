//! Strategies, property checks and independent oracles shared by the
//! property suite and the acceptance runner.

#![allow(dead_code)]

use std::sync::OnceLock;

use entropy_core::arith::{
    cauchy_bound, count_roots_above, isolate_largest_real_root, rat, rational_roots, BigRational,
    ExtRational, Fp61, Indeterminate, LaurentSeries, Poly, Polynomial, RationalFunction,
    SturmChain,
};
use entropy_core::degree::{classify_growth, iterates, Growth, DEFAULT_DEGREE_CAP};
use entropy_core::mapping::catalog;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

// ---------------------------------------------------------------- strategies

/// Small rationals with an occasional ∞, zero included.
pub fn ext_value() -> impl Strategy<Value = ExtRational> {
    prop_oneof![
        9 => (-60i64..=60, 1i64..=40).prop_map(|(n, d)| ExtRational::new(n, d)),
        1 => Just(ExtRational::infinity()),
    ]
}

/// Nonzero polynomial over Q with small integer coefficients.
pub fn small_poly(max_len: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-9i64..=9, 1..=max_len)
        .prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
        .prop_map(|c| Polynomial::from_i64s(&c))
}

/// Integer polynomial of degree 1..=8 with coefficients in [-20, 20].
pub fn int_poly() -> impl Strategy<Value = Vec<i64>> {
    (
        prop::collection::vec(-20i64..=20, 1..=8),
        1i64..=20,
        any::<bool>(),
    )
        .prop_map(|(mut c, lead, neg)| {
            c.push(if neg { -lead } else { lead });
            c
        })
}

/// Truncated Laurent series: valuation, then a nonzero leading coefficient
/// and up to seven more.
pub fn laurent() -> impl Strategy<Value = LaurentSeries> {
    (
        -6i64..=6,
        (1i64..=9, any::<bool>()),
        prop::collection::vec((-9i64..=9, 1i64..=5), 0..=7),
    )
        .prop_map(|(v, (lead, neg), rest)| {
            let mut c = vec![rat(if neg { -lead } else { lead }, 1)];
            c.extend(rest.into_iter().map(|(n, d)| rat(n, d)));
            LaurentSeries::new(v, c).expect("leading coefficient is nonzero")
        })
}

/// Quadratic trend plus a periodic perturbation of period 1..=12.
pub fn quadratic_with_period() -> impl Strategy<Value = Vec<usize>> {
    (
        0usize..=6,
        0usize..=6,
        0usize..=4,
        prop::collection::vec(0usize..=5, 1..=12),
        30usize..=40,
    )
        .prop_map(|(a, b, c, bumps, len)| {
            (0..len)
                .map(|n| a * n * n + b * n + c + bumps[n % bumps.len()])
                .collect()
        })
}

/// A rational `p/q` far from the special values of the catalog mappings.
pub fn generic_seed() -> impl Strategy<Value = ExtRational> {
    (200i64..=5000, 1i64..=97).prop_map(|(p, q)| ExtRational::new(p, q))
}

// ---------------------------------------------------------- projective line

fn q(x: &ExtRational) -> Option<BigRational> {
    x.to_rational()
}

fn is_normalized(x: &ExtRational) -> bool {
    if x.is_infinite() {
        x.numer().is_one()
    } else {
        x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
    }
}

/// Field axioms on finite values, checked against `BigRational`, and the
/// ∞ conventions of the projective line.
pub fn check_projective(x: &ExtRational, y: &ExtRational, z: &ExtRational) -> Check {
    let inf = ExtRational::infinity();
    for r in [x.add(y), x.mul(y), x.sub(y), x.div(y)]
        .into_iter()
        .flatten()
    {
        prop_assert!(is_normalized(&r), "not in lowest terms: {r}");
    }
    prop_assert_eq!(x.add(y), y.add(x));
    prop_assert_eq!(x.mul(y), y.mul(x));
    prop_assert_eq!(x.recip().recip(), x.clone());
    prop_assert_eq!(x.neg().neg(), x.clone());
    match (q(x), q(y), q(z)) {
        (Some(a), Some(b), Some(_)) => {
            prop_assert_eq!(q(&x.add(y).unwrap()), Some(&a + &b));
            prop_assert_eq!(q(&x.sub(y).unwrap()), Some(&a - &b));
            prop_assert_eq!(q(&x.mul(y).unwrap()), Some(&a * &b));
            let xy_z = x.add(y).unwrap().add(z).unwrap();
            prop_assert_eq!(xy_z, x.add(&y.add(z).unwrap()).unwrap());
            let xy_z = x.mul(y).unwrap().mul(z).unwrap();
            prop_assert_eq!(xy_z, x.mul(&y.mul(z).unwrap()).unwrap());
            let lhs = x.mul(&y.add(z).unwrap()).unwrap();
            let rhs = x.mul(y).unwrap().add(&x.mul(z).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(x.sub(x).unwrap().is_zero());
            match (a.is_zero(), b.is_zero()) {
                (true, true) => prop_assert_eq!(x.div(y), Err(Indeterminate)),
                (false, true) => prop_assert_eq!(x.div(y), Ok(inf.clone())),
                (_, false) => prop_assert_eq!(q(&x.div(y).unwrap()), Some(&a / &b)),
            }
            if !a.is_zero() {
                prop_assert_eq!(x.div(x), Ok(ExtRational::one()));
                prop_assert_eq!(q(&x.recip()), Some(a.recip()));
            } else {
                prop_assert!(x.recip().is_infinite());
            }
        }
        _ => {
            if x.is_infinite() {
                prop_assert!(x.recip().is_zero());
                prop_assert_eq!(x.add(&inf), Err(Indeterminate));
                prop_assert_eq!(x.sub(&inf), Err(Indeterminate));
                prop_assert_eq!(x.div(&inf), Err(Indeterminate));
                prop_assert_eq!(x.mul(&inf), Ok(inf.clone()));
                prop_assert_eq!(x.mul(&ExtRational::zero()), Err(Indeterminate));
                if !y.is_infinite() {
                    prop_assert_eq!(x.add(y), Ok(inf.clone()));
                    prop_assert_eq!(y.div(x), Ok(ExtRational::zero()));
                }
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------ gcd and reduction

/// Reduction is idempotent, leaves coprime parts with a monic denominator,
/// and preserves the value (cross-multiplication).
pub fn check_reduction(num: &Polynomial, den: &Polynomial, common: &Polynomial) -> Check {
    let n = num * common;
    let d = den * common;
    let r = RationalFunction::reduce(n.clone(), d.clone()).unwrap();
    prop_assert_eq!(r.num().gcd(r.den()).degree(), Some(0));
    prop_assert!(r.den().leading().unwrap().is_one());
    prop_assert_eq!(&(r.num() * &d), &(&n * r.den()));
    let again = RationalFunction::reduce(r.num().clone(), r.den().clone()).unwrap();
    prop_assert_eq!(&again, &r);
    let g = n.gcd(&d);
    prop_assert!(g.divides(&n) && g.divides(&d));
    prop_assert!(common.monic().divides(&g));
    let (qn, qd) = (n.exact_div(&g).unwrap(), d.exact_div(&g).unwrap());
    prop_assert_eq!(qn.gcd(&qd).degree(), Some(0));
    Ok(())
}

// --------------------------------------------------------- root isolation

type Complex = (f64, f64);

fn cmul(a: Complex, b: Complex) -> Complex {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: Complex, b: Complex) -> Complex {
    let n = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / n, (a.1 * b.0 - a.0 * b.1) / n)
}

/// All complex roots of a square-free polynomial by Durand-Kerner
/// iteration in floating point, independent of the exact isolator.
pub fn numeric_roots(p: &Polynomial) -> Vec<Complex> {
    let c: Vec<f64> = p.coeffs().iter().map(|x| x.to_f64().unwrap()).collect();
    let deg = c.len() - 1;
    let lead = c[deg];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex| {
        let mut acc = (0.0, 0.0);
        for &k in monic.iter().rev() {
            acc = cmul(acc, z);
            acc.0 += k;
        }
        acc
    };
    let mut z: Vec<Complex> = (0..deg)
        .map(|k| {
            let t = 0.4 + 0.9 * k as f64;
            let r = 1.0 + monic.iter().take(deg).map(|x| x.abs()).fold(0.0, f64::max);
            (r * t.cos(), r * t.sin())
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut den = (1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den = cmul(den, (z[i].0 - z[j].0, z[i].1 - z[j].1));
                }
            }
            let step = cdiv(eval(z[i]), den);
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            delta = delta.max(step.0.hypot(step.1));
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

fn sign(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// The largest real root of a random integer polynomial: a sign change (or
/// an exact root) on the returned interval, exactly one root of the
/// square-free part after widening by 2x, and agreement with a floating
/// point root finder.
pub fn check_root_isolation(coeffs: &[i64]) -> Check {
    let p = Polynomial::from_i64s(coeffs);
    let sqf = p.square_free_part();
    let below = -cauchy_bound(&sqf) - BigRational::one();
    let width = rat(1, 1 << 30);
    let found = isolate_largest_real_root(&p, &below, &width);
    let numeric: Vec<Complex> = if sqf.degree().unwrap_or(0) > 0 {
        numeric_roots(&sqf)
    } else {
        Vec::new()
    };
    let ambiguous = numeric.iter().any(|z| z.1.abs() > 1e-9 && z.1.abs() < 1e-5);
    let real: Vec<f64> = numeric
        .iter()
        .filter(|z| z.1.abs() <= 1e-9)
        .map(|z| z.0)
        .collect();
    let Some(r) = found else {
        if !ambiguous {
            prop_assert!(real.is_empty(), "missed real roots {real:?} of {p}");
        }
        prop_assert_eq!(count_roots_above(&p, &below), 0);
        return Ok(());
    };
    prop_assert!(r.lo <= r.hi && r.width() <= width);
    if r.is_exact() {
        prop_assert!(sqf.eval(&r.lo).is_zero());
    } else {
        prop_assert!(sign(&sqf.eval(&r.lo)) * sign(&sqf.eval(&r.hi)) < 0);
    }
    // a zero-width (exact) interval is widened by the requested width
    let half = if r.is_exact() {
        width.clone()
    } else {
        r.width() / BigRational::from_integer(2.into())
    };
    let (wlo, whi) = (&r.lo - &half, &r.hi + &half);
    let sturm = SturmChain::new(&sqf);
    prop_assert_eq!(sturm.count(&wlo, &whi), 1);
    prop_assert_eq!(sturm.count_above(&r.hi), 0);
    prop_assert!(r.multiplicity >= 1);
    if !ambiguous {
        let top = real.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(
            (top - r.midpoint()).abs() < 1e-6,
            "numeric root {top} vs [{}, {}] for {p}",
            r.lo,
            r.hi
        );
        let (flo, fhi) = (wlo.to_f64().unwrap(), whi.to_f64().unwrap());
        let inside = real.iter().filter(|&&x| x >= flo - 1e-9 && x <= fhi + 1e-9);
        prop_assert_eq!(inside.count(), 1);
    }
    Ok(())
}

/// Every reported rational root is a root, and the cofactor times the
/// root factors gives back the polynomial up to a constant.
pub fn check_rational_roots(coeffs: &[i64]) -> Check {
    let p = Polynomial::from_i64s(coeffs);
    let Some((roots, rest)) = rational_roots(&p) else {
        return Ok(());
    };
    let mut rebuilt = rest.clone();
    for r in &roots {
        prop_assert!(p.eval(r).is_zero());
        let lin = Polynomial::from_coeffs(vec![-r.clone(), BigRational::one()]);
        let mut f = p.clone();
        while let Some(next) = f.exact_div(&lin) {
            rebuilt = &rebuilt * &lin;
            f = next;
        }
    }
    prop_assert_eq!(rebuilt.monic(), p.monic());
    Ok(())
}

// --------------------------------------------------------- Laurent series

pub fn check_laurent_valuation(a: &LaurentSeries, b: &LaurentSeries) -> Check {
    let ab = a.mul(b);
    prop_assert_eq!(ab.valuation(), a.valuation() + b.valuation());
    prop_assert_eq!(ab.leading(), &(a.leading() * b.leading()));
    prop_assert_eq!(ab.precision(), a.precision().min(b.precision()));
    let inv = a.inv();
    prop_assert_eq!(inv.valuation(), -a.valuation());
    let one = a.mul(&inv);
    prop_assert_eq!(one.valuation(), 0);
    prop_assert!(one.leading().is_one());
    for k in 1..one.precision() as i64 {
        prop_assert!(one.coeff(k).is_none_or(|c| c.is_zero()));
    }
    Ok(())
}

// ----------------------------------------------------------- degree growth

pub fn check_not_exponential(d: &[usize]) -> Check {
    let v = classify_growth(d).unwrap();
    prop_assert!(
        !matches!(v.classification, Growth::Exponential),
        "{d:?} classified exponential"
    );
    prop_assert_eq!(v.entropy_estimate, 0.0);
    Ok(())
}

/// Iterates over F_p of every catalog mapping (and the generic variants of
/// the deautonomised ones), seed 5, up to n = 8.
pub fn modular_iterates() -> &'static [(String, Vec<RationalFunction<Fp61>>)] {
    static CELL: OnceLock<Vec<(String, Vec<RationalFunction<Fp61>>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut names: Vec<String> = catalog::ENTRIES
            .iter()
            .map(|e| e.name.to_string())
            .collect();
        names.push("eq27-dp1-add-generic".into());
        std::thread::scope(|s| {
            let handles: Vec<_> = names
                .iter()
                .map(|name| {
                    s.spawn(move || {
                        let m = catalog::resolve(name).unwrap();
                        let x0 = ExtRational::from_integer(5);
                        let (xs, _) =
                            iterates::<Fp61>(&m, 8, &x0, DEFAULT_DEGREE_CAP, None).unwrap();
                        (name.clone(), xs)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        })
    })
}

/// `d_n = max(deg num, deg den)` equals the number of preimages of `w`,
/// `deg(num - w den)`, for a random rational target `w`.
pub fn check_preimage_count(w_num: i64, w_den: i64) -> Check {
    use entropy_core::arith::Field;
    let w = Fp61::from_rational(&rat(w_num, w_den)).unwrap();
    for (name, xs) in modular_iterates() {
        for (n, x) in xs.iter().enumerate().skip(1) {
            if x.is_infinity() {
                continue;
            }
            let d = x.num().degree_or_zero().max(x.den().degree_or_zero());
            let target: Poly<Fp61> = x.num() - &x.den().scale(&w);
            prop_assert!(
                !target.is_zero(),
                "{name}: x_{n} is the constant {w_num}/{w_den}"
            );
            prop_assert_eq!(target.degree_or_zero(), d, "{} at n = {}", name, n);
            prop_assert_eq!(x.degree(), d);
        }
    }
    Ok(())
}

// --------------------------------------------------- count-recursion oracle

/// Growth rate of the linear recurrence with characteristic polynomial `p`
/// (ascending coefficients): `(M(2N) / M(N))^(1/N)` with `N` = `steps` and
/// `M(k)` the largest `|u_n|`, `n ≤ k`. Values are kept on a log scale.
pub fn simulated_growth(p: &Polynomial, steps: usize) -> f64 {
    let c: Vec<f64> = p.coeffs().iter().map(|x| x.to_f64().unwrap()).collect();
    let deg = c.len() - 1;
    let mut window: Vec<f64> = (0..deg)
        .map(|k| 1.0 + k as f64 + 0.37 * (k * k) as f64)
        .collect();
    let mut offset = 0.0f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_at_half = f64::NEG_INFINITY;
    for n in 0..=2 * steps {
        if n >= deg {
            let next = -(0..deg).map(|k| c[k] * window[k]).sum::<f64>() / c[deg];
            window.remove(0);
            window.push(next);
        }
        let cur = window[n.min(deg - 1)];
        if cur != 0.0 {
            best = best.max(cur.abs().ln() + offset);
        }
        if n == steps {
            best_at_half = best;
        }
        let scale = window.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if scale > 1e100 {
            window.iter_mut().for_each(|x| *x /= scale);
            offset += scale.ln();
        }
    }
    ((best - best_at_half) / steps as f64).exp()
}

/// The growth rate of the count recursion agrees with the isolated root
/// (1 when no root exceeds 1) within 1%.
pub fn growth_matches_root(p: &Polynomial, steps: usize) -> (f64, f64, bool) {
    let one = BigRational::one();
    let root = isolate_largest_real_root(p, &one, &rat(1, 1 << 40))
        .map(|r| r.midpoint())
        .unwrap_or(1.0);
    let rate = simulated_growth(p, steps);
    (rate, root, (rate - root).abs() <= 0.01 * root)
}

pub fn int_coeffs(p: &Polynomial) -> Vec<i64> {
    p.integer_coeffs().expect("integer coefficients")
}

/// Integer coefficients up to an overall sign, leading term positive.
pub fn signed_coeffs(p: &Polynomial) -> Vec<i64> {
    let c = int_coeffs(&p.primitive_integer());
    if c.last().is_some_and(|&x| x < 0) {
        c.iter().map(|x| -x).collect()
    } else {
        c
    }
}
