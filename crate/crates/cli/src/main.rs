//! `algent`: integrability analysis of three-point rational mappings.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod svg;

/// Exit status when methods disagree or a count system is underdetermined.
pub const EXIT_INCONSISTENT: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "algent",
    version,
    about = "Degree growth, singularity confinement and dynamical degrees of rational mappings"
)]
pub struct Cli {
    /// Flat TOML file of defaults; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Omit the `generated_at` field from JSON output.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Root isolation width 2^-BITS.
    #[arg(long, global = true, value_name = "BITS")]
    pub precision: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Built-in mapping (see `catalog list`).
    #[arg(long, value_name = "NAME")]
    pub catalog: Option<String>,
    /// JSON mapping definition.
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    #[command(flatten)]
    pub source: Source,
    /// Replace the catalog stream by the constraint-violating 1 + n + n^2/2.
    #[arg(long)]
    pub generic: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Built-in mappings.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run degree, singularity, express and height stages and compare them.
    /// With no stage flag all four run.
    Analyze(AnalyzeArgs),
    /// Trace singularities entering at each singular value.
    Singularity(SingularityArgs),
    /// Express-method verdict from a mapping recipe or a pattern file.
    Express(ExpressArgs),
    /// Verdict from hand-written count relations.
    ExpressRaw { file: PathBuf },
    /// Late-confinement roots by repetition count, and their limit.
    LateLimit(LateLimitArgs),
    /// Height growth of an exact rational orbit.
    Dioph(DiophArgs),
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    /// Degree sequence d_0..d_N.
    #[arg(long, value_name = "N")]
    pub degrees: Option<usize>,
    /// Seed x0 of the degree computation.
    #[arg(long, value_name = "p/q")]
    pub x0: Option<String>,
    #[arg(long, value_name = "D")]
    pub degree_cap: Option<usize>,
    #[arg(long)]
    pub singularities: bool,
    #[arg(long)]
    pub express: bool,
    /// Height stage, stopping early at the bit target.
    #[arg(long)]
    pub dioph: bool,
    /// Height stage with exactly N iterations.
    #[arg(long, value_name = "N")]
    pub iters: Option<usize>,
    #[arg(long, value_name = "p/q")]
    pub dioph_x0: Option<String>,
    #[arg(long, value_name = "p/q")]
    pub dioph_x1: Option<String>,
    /// Chart of d_n and h_n.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SingularityArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    /// Entering value (`0`, `p/q`, `inf`, `param:NAME`, `stream:NAME[+k]`);
    /// every singular value when absent.
    #[arg(long, value_name = "TOKEN")]
    pub value: Option<String>,
    #[arg(long, value_name = "N")]
    pub n_start: Option<i64>,
    #[arg(long, value_name = "N")]
    pub max_steps: Option<usize>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "input")]
pub struct ExpressInput {
    #[arg(long, value_name = "NAME")]
    pub catalog: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
    /// JSON `{patterns, exclusive, symmetry, auxiliary}`.
    #[arg(long, value_name = "PATH")]
    pub patterns: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExpressArgs {
    #[command(flatten)]
    pub input: ExpressInput,
    #[arg(long)]
    pub generic: bool,
}

#[derive(Args, Debug)]
pub struct LateLimitArgs {
    /// JSON `{block, closing, limit: {f, period}}`.
    pub file: PathBuf,
    /// Inclusive range `a..b` of repetition counts.
    #[arg(long, value_name = "A..B", default_value = "1..6")]
    pub ell_range: String,
    /// Also solve the limit relation.
    #[arg(long)]
    pub limit: bool,
}

#[derive(Args, Debug)]
pub struct DiophArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    /// Exact iteration count; without it the orbit stops at the bit target.
    #[arg(long, value_name = "N")]
    pub iters: Option<usize>,
    #[arg(long, value_name = "p/q")]
    pub x0: Option<String>,
    #[arg(long, value_name = "p/q")]
    pub x1: Option<String>,
    #[arg(long, value_name = "BITS")]
    pub stop_bits: Option<u64>,
    #[arg(long, value_name = "BITS")]
    pub bit_budget: Option<u64>,
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// A reader that stops early, as `head` does, is not an error.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}
