//! Runs the degree, singularity, express and height stages on one mapping
//! and compares their conclusions.

use serde::Serialize;

use crate::arith::{ExtRational, Polynomial};
use crate::degree::{
    classify_growth, degree_sequence_with, DegreeError, DegreeOptions, DegreeSequence, Growth,
    GrowthVerdict,
};
use crate::diophantine::{diophantine_degree_with, DiophOptions, HeightTrace};
use crate::express::{
    bedford_kim_b0_pattern, build_equations, characteristic_from_equations,
    characteristic_polynomial, verdict_with_width, EquationSystem, ExpressError, PatternSpec,
    RawEquation, RawSystem, ShiftPolynomial, SpecEntry, Verdict,
};
use crate::mapping::{Mapping, MappingDef};
use crate::singularity::{
    find_singular_values, trace_singularity, PatternReport, ValueToken, DEFAULT_MAX_STEPS,
    DEFAULT_N_START,
};

/// Relative tolerance between two dynamical-degree estimates.
pub const LAMBDA_TOLERANCE: f64 = 0.05;
/// Largest height ratio still read as polynomial height growth on long
/// orbits.
pub const INTEGRABLE_HEIGHT_RATIO: f64 = 1.15;

/// Largest `h_n / h_{n-1}` read as polynomial growth after `n` steps: the
/// larger of [`INTEGRABLE_HEIGHT_RATIO`] and the ratio `(n/(n-1))^3` of a
/// cubic, since short polynomial orbits still show ratios well above 1.
pub fn integrable_height_bound(n: usize) -> f64 {
    if n < 2 {
        return f64::INFINITY;
    }
    let r = n as f64 / (n - 1) as f64;
    INTEGRABLE_HEIGHT_RATIO.max(r.powi(3))
}

/// How the express stage is set up for one mapping.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpressRecipe {
    /// Singularities to trace, each naming its count.
    pub traced: Vec<(String, ValueToken)>,
    /// Patterns supplied directly instead of traced.
    pub manual: Vec<PatternSpec>,
    /// Singularities traced only to confirm that they confine.
    pub check: Vec<ValueToken>,
    pub exclusive: Vec<ValueToken>,
    pub symmetry: Vec<Vec<String>>,
    /// Relations used when the pattern system alone is underdetermined.
    pub auxiliary: Option<RawSystem>,
}

fn tok(s: &str) -> ValueToken {
    s.parse().expect("valid token")
}

fn shifts(s: &[i64]) -> ShiftPolynomial {
    ShiftPolynomial::from_shifts(s)
}

/// Count relations of the biquadratic map with the auxiliary variable `y`:
/// `X` counts each of the eight short patterns, `U` the value `y = 1`.
/// `late` selects the first late confinement.
pub fn biquadratic_auxiliary(late: bool) -> RawSystem {
    let (u_in_x, u_self) = if late {
        (shifts(&[1, 2]), shifts(&[0, 1, 2]))
    } else {
        (shifts(&[1]), shifts(&[0, 1]))
    };
    RawSystem {
        unknowns: vec!["X".into(), "U".into()],
        equations: vec![
            RawEquation {
                lhs: [("X".to_string(), shifts(&[0, 1]))].into(),
                rhs: [("U".to_string(), u_in_x)].into(),
            },
            RawEquation {
                lhs: [("U".to_string(), u_self)].into(),
                rhs: [("X".to_string(), ShiftPolynomial::term(0, 4))].into(),
            },
        ],
    }
}

/// The pattern `{b, f, ∞, ∞, f', 0}` of the two-parameter map; `f, f'`
/// depend on initial data and are not recorded.
pub fn bedford_kim_b_pattern() -> PatternSpec {
    let e = |pos: usize, v: &str| SpecEntry {
        pos,
        value: tok(v),
        mult: 1,
    };
    PatternSpec::new(
        "B",
        vec![e(0, "param:b"), e(2, "inf"), e(3, "inf"), e(5, "0")],
    )
    .expect("well-formed")
}

/// The eight length-two patterns `{±c, ∓c}`, `{±d, ∓d}`,
/// `{z ± a, z ∓ a}`, `{z ± b, z ∓ b}` of the biquadratic map, with
/// step-relative labels: `z+a` stands for `z_n + a` at whatever step `n` it
/// occurs.
pub fn biquadratic_patterns() -> Vec<PatternSpec> {
    let mut out = Vec::new();
    for (sym, base) in [("c", ""), ("d", ""), ("a", "z"), ("b", "z")] {
        for (s1, s2) in [("+", "-"), ("-", "+")] {
            let label = |sign: &str| ValueToken::Label(format!("{base}{sign}{sym}"));
            let id = format!("X{}{}", if s1 == "+" { "p" } else { "m" }, sym);
            out.push(
                PatternSpec::sequence(&id, &[(label(s1), 1), (label(s2), 1)]).expect("well-formed"),
            );
        }
    }
    out
}

/// Express setup for catalog mappings, or the default: trace every singular
/// value and treat every value of a confined pattern as exclusive.
pub fn recipe_for(m: &Mapping) -> ExpressRecipe {
    let name = m.name();
    let base = name.strip_suffix("-generic").unwrap_or(name);
    let zero_inf = || ExpressRecipe {
        traced: vec![("Z".into(), ValueToken::zero())],
        manual: Vec::new(),
        check: Vec::new(),
        exclusive: vec![ValueToken::zero(), ValueToken::Infinity],
        symmetry: Vec::new(),
        auxiliary: None,
    };
    match base {
        "eq1-qrt" => ExpressRecipe {
            traced: vec![("U".into(), tok("1")), ("B".into(), tok("param:b"))],
            manual: Vec::new(),
            check: Vec::new(),
            exclusive: vec![tok("1"), tok("param:b"), tok("0"), tok("inf")],
            symmetry: vec![vec!["U".into(), "B".into()]],
            auxiliary: None,
        },
        "eq12-dp1-mult" | "eq14-hv" | "eq27-dp1-add" => zero_inf(),
        b if b.starts_with("eq17-hv-k") => zero_inf(),
        "eq20-bedford-kim" => ExpressRecipe {
            traced: Vec::new(),
            manual: vec![bedford_kim_b_pattern()],
            check: Vec::new(),
            exclusive: vec![tok("param:b"), tok("inf")],
            symmetry: Vec::new(),
            auxiliary: None,
        },
        "eq20-bedford-kim-b0" => ExpressRecipe {
            traced: Vec::new(),
            manual: vec![bedford_kim_b0_pattern()],
            check: Vec::new(),
            exclusive: vec![tok("param:a"), tok("0")],
            symmetry: Vec::new(),
            auxiliary: None,
        },
        "eq31-biquadratic" => {
            let manual = biquadratic_patterns();
            let exclusive = manual.iter().map(|p| p.entries[0].value.clone()).collect();
            let symmetry = vec![manual.iter().map(|p| p.id.clone()).collect()];
            ExpressRecipe {
                traced: Vec::new(),
                manual,
                check: find_singular_values(m, DEFAULT_N_START).unwrap_or_default(),
                exclusive,
                symmetry,
                auxiliary: Some(biquadratic_auxiliary(false)),
            }
        }
        _ => {
            let traced: Vec<(String, ValueToken)> = find_singular_values(m, DEFAULT_N_START)
                .unwrap_or_default()
                .into_iter()
                .enumerate()
                .map(|(i, v)| (if i == 0 { "Z".into() } else { format!("Z{i}") }, v))
                .collect();
            ExpressRecipe {
                traced,
                manual: Vec::new(),
                check: Vec::new(),
                exclusive: Vec::new(),
                symmetry: Vec::new(),
                auxiliary: None,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpressOutcome {
    pub patterns: Vec<PatternReport>,
    pub system: Option<EquationSystem>,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
    /// Too few independent count relations for the unknowns.
    pub underdetermined: bool,
    pub note: Option<String>,
}

fn values_in_order(patterns: &[PatternSpec]) -> Vec<ValueToken> {
    let mut out: Vec<ValueToken> = Vec::new();
    for p in patterns {
        for e in &p.entries {
            if !out.contains(&e.value) {
                out.push(e.value.clone());
            }
        }
    }
    out
}

/// Root-isolation width `2^-bits`.
pub fn width_from_bits(bits: u32) -> num_rational::BigRational {
    let d = num_bigint::BigInt::from(1) << bits;
    num_rational::BigRational::new(1.into(), d)
}

pub fn run_express(m: &Mapping, recipe: &ExpressRecipe, root_bits: u32) -> ExpressOutcome {
    let mut out = ExpressOutcome {
        patterns: Vec::new(),
        system: None,
        verdict: None,
        error: None,
        underdetermined: false,
        note: None,
    };
    let mut specs = recipe.manual.clone();
    for (id, v) in &recipe.traced {
        match trace_singularity(m, v, DEFAULT_N_START, DEFAULT_MAX_STEPS) {
            Ok(r) => {
                if r.confined {
                    specs.push(PatternSpec::from_report(id, &r).expect("confined"));
                } else {
                    out.error = Some(format!(
                        "singularity {v} is not confined within {DEFAULT_MAX_STEPS} steps"
                    ));
                }
                out.patterns.push(r);
            }
            Err(e) => out.error = Some(format!("tracing {v}: {e}")),
        }
    }
    for v in &recipe.check {
        match trace_singularity(m, v, DEFAULT_N_START, DEFAULT_MAX_STEPS) {
            Ok(r) if r.confined => out.patterns.push(r),
            Ok(_) => {
                out.error = Some(format!(
                    "singularity {v} is not confined within {DEFAULT_MAX_STEPS} steps"
                ))
            }
            Err(e) => out.error = Some(format!("tracing {v}: {e}")),
        }
    }
    if out.error.is_some() {
        return out;
    }
    let solved = solve_patterns(
        &specs,
        &recipe.exclusive,
        &recipe.symmetry,
        recipe.auxiliary.as_ref(),
        root_bits,
    );
    ExpressOutcome {
        patterns: out.patterns,
        ..solved
    }
}

/// Express verdict from ready-made patterns. An empty `exclusive` takes
/// every pattern value in order of first appearance; `auxiliary` is used
/// when the pattern counts alone are underdetermined.
pub fn solve_patterns(
    specs: &[PatternSpec],
    exclusive: &[ValueToken],
    symmetry: &[Vec<String>],
    auxiliary: Option<&RawSystem>,
    root_bits: u32,
) -> ExpressOutcome {
    let mut out = ExpressOutcome {
        patterns: Vec::new(),
        system: None,
        verdict: None,
        error: None,
        underdetermined: false,
        note: None,
    };
    let exclusive = if exclusive.is_empty() {
        values_in_order(specs)
    } else {
        exclusive.to_vec()
    };
    let sys = match build_equations(specs, &exclusive, symmetry) {
        Ok(s) => s,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    let polys = characteristic_polynomial(&sys);
    out.system = Some(sys);
    let polys: Result<Vec<Polynomial>, ExpressError> = match (polys, auxiliary) {
        (Err(ExpressError::Underdetermined { .. }), Some(aux)) => {
            out.note = Some(
                "pattern counts alone are underdetermined; auxiliary-variable relations used"
                    .into(),
            );
            characteristic_from_equations(aux)
        }
        (r, _) => r,
    };
    match polys {
        Ok(p) => out.verdict = Some(verdict_with_width(&p, &width_from_bits(root_bits))),
        Err(e @ ExpressError::Underdetermined { .. }) => {
            out.underdetermined = true;
            out.error = Some(format!("{e}; {AUXILIARY_HINT}"))
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// Appended to every underdetermined-system message.
pub const AUXILIARY_HINT: &str = "introduce an auxiliary variable";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeStage {
    pub sequence: DegreeSequence,
    /// The iteration stopped at the degree cap before `n_max`.
    pub capped: bool,
    pub growth: Option<GrowthVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementCheck {
    pub methods: [&'static str; 2],
    /// `None` when the pair cannot be compared.
    pub consistent: Option<bool>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub mapping: MappingDef,
    pub degree: Option<DegreeStage>,
    pub singularities: Option<Vec<PatternReport>>,
    pub express: Option<ExpressOutcome>,
    pub diophantine: Option<HeightTrace>,
    pub errors: Vec<StageError>,
    pub agreement: Vec<AgreementCheck>,
}

impl AnalysisReport {
    /// True when some compared pair disagrees.
    pub fn has_disagreement(&self) -> bool {
        self.agreement.iter().any(|a| a.consistent == Some(false))
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub degrees: Option<usize>,
    pub x0: ExtRational,
    pub degree_cap: usize,
    pub singularities: bool,
    pub express: bool,
    /// Height iterations; `None` skips the stage.
    pub dioph_iters: Option<usize>,
    pub dioph_seeds: (ExtRational, ExtRational),
    pub dioph: DiophOptions,
    pub root_bits: u32,
}

/// Height target at which the height stage stops early by default.
pub const DEFAULT_STOP_BITS: u64 = 20_000;
/// Upper bound on height iterations when stopping at the bit target.
pub const DEFAULT_DIOPH_ITERS: usize = 40;

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            degrees: None,
            x0: ExtRational::from_integer(5),
            degree_cap: crate::degree::DEFAULT_DEGREE_CAP,
            singularities: false,
            express: false,
            dioph_iters: None,
            dioph_seeds: crate::diophantine::default_seeds(),
            dioph: DiophOptions {
                stop_bits: Some(DEFAULT_STOP_BITS),
                ..DiophOptions::default()
            },
            root_bits: 40,
        }
    }
}

fn degree_stage(
    m: &Mapping,
    n: usize,
    opts: &AnalysisOptions,
) -> (Option<DegreeStage>, Vec<StageError>) {
    let err = |message: String| StageError {
        stage: "degrees",
        message,
    };
    let dopts = DegreeOptions {
        cap: opts.degree_cap,
        ..DegreeOptions::default()
    };
    let (sequence, capped) = match degree_sequence_with(m, n, &opts.x0, &dopts) {
        Ok(s) => (s, false),
        Err(DegreeError::DegreeCapExceeded { partial, .. }) => (partial, true),
        Err(e) => return (None, vec![err(e.to_string())]),
    };
    let mut errors = Vec::new();
    let growth = match classify_growth(&sequence.degrees) {
        Ok(g) => Some(g),
        Err(e) => {
            errors.push(err(e.to_string()));
            None
        }
    };
    let stage = DegreeStage {
        sequence,
        capped,
        growth,
    };
    (Some(stage), errors)
}

fn singularity_stage(m: &Mapping) -> (Option<Vec<PatternReport>>, Vec<StageError>) {
    let err = |message: String| StageError {
        stage: "singularities",
        message,
    };
    let values = match find_singular_values(m, DEFAULT_N_START) {
        Ok(v) => v,
        Err(e) => return (None, vec![err(e.to_string())]),
    };
    let mut traces = Vec::new();
    let mut errors = Vec::new();
    for v in values {
        match trace_singularity(m, &v, DEFAULT_N_START, DEFAULT_MAX_STEPS) {
            Ok(r) => traces.push(r),
            Err(e) => errors.push(err(format!("{v}: {e}"))),
        }
    }
    (Some(traces), errors)
}

/// Runs the requested stages and reports them in the order degrees,
/// singularities, express, heights. The stages run on separate threads; a
/// failing stage is recorded and the others still run.
pub fn analyze(m: &Mapping, opts: &AnalysisOptions) -> AnalysisReport {
    let (degrees, singular, express, heights) = std::thread::scope(|s| {
        let degrees = opts
            .degrees
            .map(|n| s.spawn(move || degree_stage(m, n, opts)));
        let singular = opts.singularities.then(|| s.spawn(|| singularity_stage(m)));
        let express = opts
            .express
            .then(|| s.spawn(|| run_express(m, &recipe_for(m), opts.root_bits)));
        let heights = opts.dioph_iters.map(|iters| {
            s.spawn(move || {
                let (x0, x1) = &opts.dioph_seeds;
                diophantine_degree_with(m, x0, x1, iters, opts.dioph)
            })
        });
        (
            degrees.map(|h| h.join().expect("stage panicked")),
            singular.map(|h| h.join().expect("stage panicked")),
            express.map(|h| h.join().expect("stage panicked")),
            heights.map(|h| h.join().expect("stage panicked")),
        )
    });
    let mut report = AnalysisReport {
        mapping: m.to_def(),
        degree: None,
        singularities: None,
        express: None,
        diophantine: None,
        errors: Vec::new(),
        agreement: Vec::new(),
    };
    if let Some((stage, errors)) = degrees {
        report.degree = stage;
        report.errors.extend(errors);
    }
    if let Some((traces, errors)) = singular {
        report.singularities = traces;
        report.errors.extend(errors);
    }
    if let Some(outcome) = express {
        if let Some(e) = &outcome.error {
            report.errors.push(StageError {
                stage: "express",
                message: e.clone(),
            });
        }
        report.express = Some(outcome);
    }
    match heights {
        Some(Ok(t)) => report.diophantine = Some(t),
        Some(Err(e)) => report.errors.push(StageError {
            stage: "diophantine",
            message: e.to_string(),
        }),
        None => {}
    }
    report.agreement = agreement(&report);
    report
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn compare_lambda(methods: [&'static str; 2], a: f64, b: f64) -> AgreementCheck {
    let gap = relative_gap(a, b);
    AgreementCheck {
        methods,
        consistent: Some(gap <= LAMBDA_TOLERANCE),
        detail: format!("{a:.6} vs {b:.6} (relative gap {:.2}%)", 100.0 * gap),
    }
}

/// Pairwise comparison of every stage that produced a conclusion.
pub fn agreement(r: &AnalysisReport) -> Vec<AgreementCheck> {
    let mut out = Vec::new();
    let growth = r.degree.as_ref().and_then(|d| d.growth.as_ref());
    let verdict = r.express.as_ref().and_then(|e| e.verdict.as_ref());
    let heights = r.diophantine.as_ref();
    if let (Some(g), Some(v)) = (growth, verdict) {
        let exponential = matches!(g.classification, Growth::Exponential);
        out.push(AgreementCheck {
            methods: ["degrees", "express"],
            consistent: Some(exponential != v.integrable),
            detail: format!(
                "growth {} vs {}",
                if exponential {
                    "exponential"
                } else {
                    "polynomial or bounded"
                },
                if v.integrable {
                    "integrable"
                } else {
                    "non-integrable"
                }
            ),
        });
        if let (false, Some(l)) = (v.integrable, g.lambda_point) {
            out.push(compare_lambda(
                ["degrees", "express"],
                l,
                v.dynamical_degree.value(),
            ));
        }
    }
    if let (Some(v), Some(h)) = (verdict, heights) {
        out.push(height_check(
            ["diophantine", "express"],
            h,
            !v.integrable,
            v.dynamical_degree.value(),
        ));
    }
    if let (Some(g), Some(h)) = (growth, heights) {
        match (&g.classification, g.lambda_point) {
            (Growth::Exponential, Some(l)) => {
                out.push(height_check(["diophantine", "degrees"], h, true, l))
            }
            _ => out.push(height_check(["diophantine", "degrees"], h, false, 1.0)),
        }
    }
    out
}

fn height_check(
    methods: [&'static str; 2],
    h: &HeightTrace,
    exponential: bool,
    lambda: f64,
) -> AgreementCheck {
    if exponential {
        compare_lambda(methods, h.lambda_last, lambda)
    } else {
        let n = h.samples.len() - 1;
        let bound = integrable_height_bound(n);
        AgreementCheck {
            methods,
            consistent: Some(h.lambda_last <= bound),
            detail: format!(
                "height ratio {:.6} after {n} steps, polynomial growth expected (≤ {bound:.4})",
                h.lambda_last,
            ),
        }
    }
}
