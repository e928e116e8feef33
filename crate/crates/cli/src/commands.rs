use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use entropy_core::analysis::{
    analyze, recipe_for, run_express, solve_patterns, width_from_bits, AnalysisOptions,
    AnalysisReport, ExpressOutcome, AUXILIARY_HINT, DEFAULT_DIOPH_ITERS, DEFAULT_STOP_BITS,
};
use entropy_core::arith::ExtRational;
use entropy_core::diophantine::{
    default_seeds, diophantine_degree_with, DiophOptions, HeightTrace,
};
use entropy_core::express::{
    characteristic_from_equations, late_confinement_limit, late_confinement_polynomial,
    verdict_with_width, ExpressError, PatternSpec, RawSystem, ShiftPolynomial, Verdict,
};
use entropy_core::mapping::{catalog, parse_mapping, Mapping};
use entropy_core::singularity::{
    find_singular_values, trace_singularity, PatternReport, ValueToken, DEFAULT_MAX_STEPS,
    DEFAULT_N_START,
};

use crate::config::Config;
use crate::svg::{line_chart, Series};
use crate::{
    AnalyzeArgs, CatalogAction, Cli, Command, DiophArgs, ExpressArgs, Format, LateLimitArgs,
    SingularityArgs, SourceArgs, EXIT_INCONSISTENT,
};

/// Writes to stdout, propagating I/O errors such as a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {
        std::io::Write::write_fmt(&mut std::io::stdout().lock(), format_args!($($t)*))?
    };
}

macro_rules! outln {
    ($($t:tt)*) => {{
        out!($($t)*);
        out!("\n");
    }};
}

/// Default degree count when `analyze` runs every stage.
const DEFAULT_DEGREES: usize = 14;
const DEFAULT_PRECISION: u32 = 40;

/// Global settings after merging flags, config and defaults.
struct Settings {
    config: Config,
    format: Format,
    timestamp: bool,
    precision: u32,
}

impl Settings {
    fn resolve(cli: &Cli) -> anyhow::Result<Settings> {
        let config = match &cli.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let format = match (cli.format, config.format.as_deref()) {
            (Some(f), _) => f,
            (None, Some("json")) | (None, None) => Format::Json,
            (None, Some("csv")) => Format::Csv,
            (None, Some(other)) => bail!("config: unknown format {other:?}"),
        };
        let timestamp = !(cli.no_timestamp || config.no_timestamp.unwrap_or(false));
        let precision = cli
            .precision
            .or(config.precision)
            .unwrap_or(DEFAULT_PRECISION);
        if precision == 0 || precision > 4096 {
            bail!("precision must be between 1 and 4096 bits");
        }
        Ok(Settings {
            config,
            format,
            timestamp,
            precision,
        })
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> anyhow::Result<()> {
        let mut v = serde_json::to_value(value)?;
        if let (true, Value::Object(map)) = (self.timestamp, &mut v) {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            map.insert("generated_at".into(), secs.into());
        }
        outln!("{}", serde_json::to_string_pretty(&v)?);
        Ok(())
    }
}

fn rational(s: &str, what: &str) -> anyhow::Result<ExtRational> {
    s.parse()
        .with_context(|| format!("{what}: expected an exact p/q, got {s:?}"))
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_mapping(
    catalog_name: Option<&str>,
    file: Option<&Path>,
    generic: bool,
) -> anyhow::Result<Mapping> {
    match (catalog_name, file) {
        (Some(name), _) => {
            let name = if generic {
                format!("{name}-generic")
            } else {
                name.to_string()
            };
            Ok(catalog::resolve(&name)?)
        }
        (None, Some(path)) => {
            if generic {
                bail!("--generic applies to catalog mappings only");
            }
            parse_mapping(&read(path)?).with_context(|| format!("parsing {}", path.display()))
        }
        (None, None) => bail!("one of --catalog or --file is required"),
    }
}

fn source_mapping(a: &SourceArgs) -> anyhow::Result<Mapping> {
    load_mapping(
        a.source.catalog.as_deref(),
        a.source.file.as_deref(),
        a.generic,
    )
}

fn write_svg(
    path: &Path,
    degrees: Option<&[usize]>,
    heights: Option<&HeightTrace>,
) -> anyhow::Result<()> {
    let mut series = Vec::new();
    if let Some(d) = degrees {
        series.push(Series {
            label: "d_n",
            points: d
                .iter()
                .enumerate()
                .map(|(n, &v)| (n as f64, v as f64))
                .collect(),
        });
    }
    if let Some(t) = heights {
        series.push(Series {
            label: "h_n",
            points: t.samples.iter().map(|s| (s.n as f64, s.h)).collect(),
        });
    }
    std::fs::write(path, line_chart(&series)).with_context(|| format!("writing {}", path.display()))
}

pub fn run(cli: &Cli) -> anyhow::Result<u8> {
    let s = Settings::resolve(cli)?;
    match &cli.command {
        Command::Catalog {
            action: CatalogAction::List,
        } => catalog_list(&s),
        Command::Analyze(a) => cmd_analyze(&s, a),
        Command::Singularity(a) => cmd_singularity(&s, a),
        Command::Express(a) => cmd_express(&s, a),
        Command::ExpressRaw { file } => cmd_express_raw(&s, file),
        Command::LateLimit(a) => cmd_late_limit(&s, a),
        Command::Dioph(a) => cmd_dioph(&s, a),
    }
}

fn catalog_list(s: &Settings) -> anyhow::Result<u8> {
    let rows: Vec<(&str, &str)> = catalog::ENTRIES
        .iter()
        .chain(catalog::VARIANTS)
        .map(|e| (e.name, e.description))
        .collect();
    match s.format {
        Format::Csv => {
            outln!("name,description");
            for (n, d) in rows {
                outln!("{n},\"{}\"", d.replace('"', "\"\""));
            }
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(n, d)| serde_json::json!({"name": n, "description": d}))
                .collect();
            outln!("{}", serde_json::to_string_pretty(&v)?);
        }
    }
    Ok(0)
}

fn cmd_analyze(s: &Settings, a: &AnalyzeArgs) -> anyhow::Result<u8> {
    let m = source_mapping(&a.src)?;
    let c = &s.config;
    let any_stage =
        a.degrees.is_some() || a.singularities || a.express || a.dioph || a.iters.is_some();
    let mut opts = AnalysisOptions {
        root_bits: s.precision,
        ..AnalysisOptions::default()
    };
    opts.degrees = match (a.degrees, any_stage) {
        (Some(n), _) => Some(n),
        (None, false) => Some(c.degrees.unwrap_or(DEFAULT_DEGREES)),
        (None, true) => None,
    };
    if let Some(x) = a.x0.as_deref().or(c.x0.as_deref()) {
        opts.x0 = rational(x, "--x0")?;
    }
    if let Some(cap) = a.degree_cap.or(c.degree_cap) {
        opts.degree_cap = cap;
    }
    opts.singularities = a.singularities || !any_stage;
    opts.express = a.express || !any_stage;
    let (x0, x1) = default_seeds();
    opts.dioph_seeds = (
        match a.dioph_x0.as_deref().or(c.dioph_x0.as_deref()) {
            Some(x) => rational(x, "--dioph-x0")?,
            None => x0,
        },
        match a.dioph_x1.as_deref().or(c.dioph_x1.as_deref()) {
            Some(x) => rational(x, "--dioph-x1")?,
            None => x1,
        },
    );
    if let Some(b) = c.bit_budget {
        opts.dioph.bit_budget = b;
    }
    match a.iters {
        Some(n) => {
            opts.dioph_iters = Some(n);
            opts.dioph.stop_bits = c.stop_bits;
        }
        None if a.dioph || !any_stage => {
            opts.dioph_iters = Some(c.iters.unwrap_or(DEFAULT_DIOPH_ITERS));
            opts.dioph.stop_bits = Some(c.stop_bits.unwrap_or(DEFAULT_STOP_BITS));
        }
        None => opts.dioph_iters = None,
    }
    let report = analyze(&m, &opts);
    if let Some(path) = &a.svg {
        write_svg(
            path,
            report
                .degree
                .as_ref()
                .map(|d| d.sequence.degrees.as_slice()),
            report.diophantine.as_ref(),
        )?;
    }
    match s.format {
        Format::Json => s.emit_json(&report)?,
        Format::Csv => out!("{}", analysis_csv(&report)),
    }
    for e in &report.errors {
        eprintln!("warning: {} stage: {}", e.stage, e.message);
    }
    if report.has_disagreement() {
        for c in report
            .agreement
            .iter()
            .filter(|c| c.consistent == Some(false))
        {
            eprintln!(
                "disagreement: {} vs {}: {}",
                c.methods[0], c.methods[1], c.detail
            );
        }
        return Ok(EXIT_INCONSISTENT);
    }
    Ok(0)
}

/// Columns `n,d_n,h_n`, blank where a stage has no value.
fn analysis_csv(r: &AnalysisReport) -> String {
    let d = r
        .degree
        .as_ref()
        .map(|d| d.sequence.degrees.as_slice())
        .unwrap_or(&[]);
    let h = r
        .diophantine
        .as_ref()
        .map(|t| t.samples.as_slice())
        .unwrap_or(&[]);
    let mut out = String::from("n,d_n,h_n\n");
    for n in 0..d.len().max(h.len()) {
        let dn = d.get(n).map(|v| v.to_string()).unwrap_or_default();
        let hn = h.get(n).map(|v| v.h.to_string()).unwrap_or_default();
        out.push_str(&format!("{n},{dn},{hn}\n"));
    }
    out
}

#[derive(Serialize)]
struct SingularityOutput {
    mapping: String,
    singular_values: Vec<ValueToken>,
    patterns: Vec<PatternReport>,
}

fn cmd_singularity(s: &Settings, a: &SingularityArgs) -> anyhow::Result<u8> {
    let m = source_mapping(&a.src)?;
    let n_start = a.n_start.or(s.config.n_start).unwrap_or(DEFAULT_N_START);
    let max_steps = a
        .max_steps
        .or(s.config.max_steps)
        .unwrap_or(DEFAULT_MAX_STEPS);
    let values = find_singular_values(&m, n_start)?;
    let entering = match &a.value {
        Some(v) => vec![v
            .parse::<ValueToken>()
            .map_err(|e| anyhow!("--value {v:?}: {e}"))?],
        None => values.clone(),
    };
    let mut patterns = Vec::new();
    for v in &entering {
        patterns.push(
            trace_singularity(&m, v, n_start, max_steps).with_context(|| format!("tracing {v}"))?,
        );
    }
    match s.format {
        Format::Json => s.emit_json(&SingularityOutput {
            mapping: m.name().to_string(),
            singular_values: values,
            patterns,
        })?,
        Format::Csv => {
            outln!("entering,position,value,mult");
            for p in &patterns {
                for (j, e) in p.entries.iter().enumerate() {
                    outln!("{},{j},{},{}", p.entering, e.value, e.mult);
                }
            }
        }
    }
    Ok(0)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternFile {
    patterns: Vec<PatternSpec>,
    #[serde(default)]
    exclusive: Vec<ValueToken>,
    #[serde(default)]
    symmetry: Vec<Vec<String>>,
    #[serde(default)]
    auxiliary: Option<RawSystem>,
}

fn verdict_csv(v: &Verdict) -> String {
    let mut out = String::from("power,coefficient\n");
    for (k, c) in v.characteristic.coeffs().iter().enumerate() {
        out.push_str(&format!("{k},{c}\n"));
    }
    out
}

fn finish_express(s: &Settings, out: &ExpressOutcome) -> anyhow::Result<u8> {
    match (s.format, &out.verdict) {
        (Format::Csv, Some(v)) => out!("{}", verdict_csv(v)),
        (Format::Csv, None) => {}
        (Format::Json, _) => s.emit_json(out)?,
    }
    if let Some(note) = &out.note {
        eprintln!("note: {note}");
    }
    match &out.error {
        Some(e) if out.underdetermined => {
            eprintln!("error: {e}");
            Ok(EXIT_INCONSISTENT)
        }
        Some(e) => Err(anyhow!("{e}")),
        None => Ok(0),
    }
}

fn cmd_express(s: &Settings, a: &ExpressArgs) -> anyhow::Result<u8> {
    let out = match &a.input.patterns {
        Some(path) => {
            if a.generic {
                bail!("--generic applies to catalog mappings only");
            }
            let f: PatternFile = read_json(path)?;
            solve_patterns(
                &f.patterns,
                &f.exclusive,
                &f.symmetry,
                f.auxiliary.as_ref(),
                s.precision,
            )
        }
        None => {
            let m = load_mapping(
                a.input.catalog.as_deref(),
                a.input.file.as_deref(),
                a.generic,
            )?;
            run_express(&m, &recipe_for(&m), s.precision)
        }
    };
    finish_express(s, &out)
}

fn cmd_express_raw(s: &Settings, file: &Path) -> anyhow::Result<u8> {
    let sys: RawSystem = read_json(file)?;
    match characteristic_from_equations(&sys) {
        Ok(polys) => {
            let v = verdict_with_width(&polys, &width_from_bits(s.precision));
            match s.format {
                Format::Json => s.emit_json(&v)?,
                Format::Csv => out!("{}", verdict_csv(&v)),
            }
            Ok(0)
        }
        Err(e @ ExpressError::Underdetermined { .. }) => {
            eprintln!("error: {e}; {AUXILIARY_HINT}");
            Ok(EXIT_INCONSISTENT)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockEntry {
    value: ValueToken,
    #[serde(default = "one")]
    mult: u32,
}

fn one() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitSpec {
    f: ShiftPolynomial,
    period: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LateFile {
    #[serde(default)]
    block: Vec<BlockEntry>,
    #[serde(default)]
    closing: Vec<BlockEntry>,
    limit: Option<LimitSpec>,
}

#[derive(Serialize)]
struct LateRow {
    ell: usize,
    verdict: Verdict,
}

#[derive(Serialize)]
struct LateOutput {
    rows: Vec<LateRow>,
    /// Roots strictly increase with ℓ.
    increasing: bool,
    limit: Option<Verdict>,
    /// Every row root lies below the limit root.
    bounded_by_limit: Option<bool>,
}

fn parse_range(s: &str) -> anyhow::Result<(usize, usize)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("--ell-range: expected A..B, got {s:?}"))?;
    let a: usize = a.trim().parse().context("--ell-range start")?;
    let b: usize = b.trim().parse().context("--ell-range end")?;
    if a == 0 || b < a {
        bail!("--ell-range: need 1 ≤ A ≤ B, got {s:?}");
    }
    Ok((a, b))
}

fn cmd_late_limit(s: &Settings, a: &LateLimitArgs) -> anyhow::Result<u8> {
    let f: LateFile = read_json(&a.file)?;
    let width = width_from_bits(s.precision);
    let pairs = |v: &[BlockEntry]| -> Vec<(ValueToken, u32)> {
        v.iter().map(|e| (e.value.clone(), e.mult)).collect()
    };
    let (block, closing) = (pairs(&f.block), pairs(&f.closing));
    let mut rows = Vec::new();
    if !block.is_empty() {
        let (lo, hi) = parse_range(&a.ell_range)?;
        for ell in lo..=hi {
            let p = late_confinement_polynomial(&block, ell, &closing)
                .with_context(|| format!("ℓ = {ell}"))?;
            rows.push(LateRow {
                ell,
                verdict: verdict_with_width(&[p], &width),
            });
        }
    } else if !a.limit {
        bail!(
            "{}: no block to tabulate and --limit not given",
            a.file.display()
        );
    }
    let limit = match (&f.limit, a.limit) {
        (Some(l), true) => {
            if l.period == 0 {
                bail!("limit period must be positive");
            }
            Some(verdict_with_width(
                &[late_confinement_limit(&l.f, l.period)],
                &width,
            ))
        }
        (None, true) => bail!("{}: --limit needs a `limit` entry", a.file.display()),
        (_, false) => None,
    };
    let lambdas: Vec<f64> = rows
        .iter()
        .map(|r| r.verdict.dynamical_degree.value())
        .collect();
    let increasing = lambdas.windows(2).all(|w| w[0] < w[1]);
    let bounded_by_limit = limit.as_ref().map(|l| {
        let top = l.dynamical_degree.value();
        lambdas.iter().all(|&x| x < top)
    });
    let out = LateOutput {
        rows,
        increasing,
        limit,
        bounded_by_limit,
    };
    match s.format {
        Format::Json => s.emit_json(&out)?,
        Format::Csv => {
            outln!("ell,lambda,characteristic");
            let rows = out.rows.iter().map(|r| (r.ell.to_string(), &r.verdict));
            for (ell, v) in rows.chain(out.limit.iter().map(|l| ("inf".to_string(), l))) {
                let coeffs: Vec<String> = v
                    .characteristic
                    .coeffs()
                    .iter()
                    .map(|c| c.to_string())
                    .collect();
                outln!("{ell},{},{}", v.dynamical_degree.value(), coeffs.join(" "));
            }
        }
    }
    Ok(0)
}

fn cmd_dioph(s: &Settings, a: &DiophArgs) -> anyhow::Result<u8> {
    let m = source_mapping(&a.src)?;
    let c = &s.config;
    let (d0, d1) = default_seeds();
    let x0 = match a.x0.as_deref().or(c.dioph_x0.as_deref()) {
        Some(x) => rational(x, "--x0")?,
        None => d0,
    };
    let x1 = match a.x1.as_deref().or(c.dioph_x1.as_deref()) {
        Some(x) => rational(x, "--x1")?,
        None => d1,
    };
    let mut opts = DiophOptions::default();
    if let Some(b) = a.bit_budget.or(c.bit_budget) {
        opts.bit_budget = b;
    }
    let iters = match a.iters {
        Some(n) => {
            opts.stop_bits = a.stop_bits;
            n
        }
        None => {
            opts.stop_bits = Some(a.stop_bits.or(c.stop_bits).unwrap_or(DEFAULT_STOP_BITS));
            c.iters.unwrap_or(DEFAULT_DIOPH_ITERS)
        }
    };
    let t = diophantine_degree_with(&m, &x0, &x1, iters, opts)?;
    if let Some(path) = &a.svg {
        write_svg(path, None, Some(&t))?;
    }
    match s.format {
        Format::Json => s.emit_json(&t)?,
        Format::Csv => out!("{}", t.to_csv()),
    }
    Ok(0)
}
