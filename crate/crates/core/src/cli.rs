//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unreadable or invalid input, 2 underdetermined
//! (`validate`), 3 inconsistent (`validate`), 4 fill and oracle disagree
//! (`oracle-diff`).

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::fill::{
    basis_array, check_support_cases, FillStatus, FillStrategy, StrategyOptions, StrategyRegistry,
};
use crate::oracle::{Classification, LinearSystem};
use crate::problem::{load_problem_file, ProblemSpec};
use crate::verify::oracle_diff_with;
use crate::window::{ArrayWindow, Coord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNDERDETERMINED: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "recur2d",
    version,
    about = "Exact fills of two-dimensional linear recurrences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Tsv,
    Json,
    Ascii,
}

#[derive(Debug, clap::Args)]
pub struct StrategyArgs {
    /// Fill strategy (see `strategies`).
    #[arg(long, default_value = "worklist")]
    pub strategy: String,
    /// Seed for randomized strategies.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fill the problem's window.
    Fill {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "tsv")]
        out: OutputFormat,
        #[command(flatten)]
        strategy: StrategyArgs,
        /// Write the step log as JSON lines to this file.
        #[arg(long)]
        steps: Option<PathBuf>,
    },
    /// Classify the window's linear system: exit 0 unique, 2 underdetermined, 3 inconsistent.
    Validate { spec: PathBuf },
    /// Fill with value one at a layout coordinate and zero elsewhere.
    Basis {
        spec: PathBuf,
        /// Layout coordinate as `r,c`.
        #[arg(long, value_parser = parse_coord, allow_hyphen_values = true)]
        at: Coord,
        #[arg(long, value_enum, default_value = "tsv")]
        out: OutputFormat,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Check the vanishing regions of every basis array of a standard layout.
    CheckSupport {
        spec: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Known nonzero cells of the fill as `r c value` lines.
    Series {
        spec: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Compare a fill with the oracle on the same window.
    OracleDiff {
        spec: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Print the overlay grid and its shape parameters.
    Overlay { spec: PathBuf },
    /// Print the window's linear system in coordinate format.
    DumpSystem { spec: PathBuf },
    /// List the available fill strategies.
    Strategies,
}

fn parse_coord(text: &str) -> Result<Coord, String> {
    let (r, c) = text
        .split_once(',')
        .ok_or_else(|| format!("expected `r,c`, got `{text}`"))?;
    let num = |s: &str| s.trim().parse::<i64>().map_err(|e| format!("`{s}`: {e}"));
    Ok((num(r)?, num(c)?))
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn strategy(args: &StrategyArgs) -> Result<Box<dyn FillStrategy>, Failure> {
    Ok(StrategyRegistry::builtin().create(&args.strategy, &StrategyOptions { seed: args.seed })?)
}

fn render(window: &ArrayWindow, status: Option<&FillStatus>, format: OutputFormat) -> String {
    match format {
        OutputFormat::Tsv => window.to_tsv(),
        OutputFormat::Ascii => {
            let mut s = window.render_ascii();
            if let Some(status) = status {
                writeln!(s, "status: {}", status_line(status)).unwrap();
            }
            s
        }
        OutputFormat::Json => {
            let mut v = window.to_json();
            if let Some(status) = status {
                v["status"] = status.label().into();
            }
            format!(
                "{}\n",
                serde_json::to_string_pretty(&v).expect("json value")
            )
        }
    }
}

fn status_line(status: &FillStatus) -> String {
    match status {
        FillStatus::Complete => "complete".into(),
        FillStatus::Partial { unfilled } => {
            format!("partial ({} cells undetermined)", unfilled.len())
        }
        FillStatus::Inconsistent { witness, residual } => format!(
            "inconsistent (placement ({}, {}) leaves residual {residual})",
            witness.0, witness.1
        ),
    }
}

fn load(path: &PathBuf) -> Result<ProblemSpec, Failure> {
    Ok(load_problem_file(path)?)
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Fill {
            spec,
            out: format,
            strategy: sargs,
            steps,
        } => {
            let p = load(&spec)?;
            let result = strategy(&sargs)?.fill(&p.overlay, &p.layout, p.bounds)?;
            if let Some(path) = steps {
                std::fs::write(&path, result.steps_jsonl())
                    .map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))?;
            }
            let text = match format {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&result.to_json()).expect("json value")
                ),
                _ => render(&result.window, Some(&result.status), format),
            };
            out.write_all(text.as_bytes())?;
            if format == OutputFormat::Tsv {
                writeln!(err, "status: {}", status_line(&result.status))?;
            }
            Ok(EXIT_OK)
        }
        Command::Validate { spec } => {
            let p = load(&spec)?;
            let sys = LinearSystem::assemble(&p.overlay, &p.layout, p.bounds)?;
            let class = sys.classify();
            writeln!(out, "{}", class.label())?;
            Ok(match class {
                Classification::Unique { assignment } => {
                    if assignment.known_all_zero() {
                        writeln!(out, "solution is identically zero")?;
                    }
                    EXIT_OK
                }
                Classification::Underdetermined { free, pinned } => {
                    writeln!(out, "free variables: {}", free.len())?;
                    if let Some((r, c)) = free.first() {
                        writeln!(out, "first free cell: ({r}, {c})")?;
                    }
                    writeln!(out, "determined cells: {}", pinned.len())?;
                    EXIT_UNDERDETERMINED
                }
                Classification::Inconsistent { certificate } => {
                    let (r, c) = certificate.trigger.coord();
                    writeln!(
                        out,
                        "certificate: {} equations combine to 0 = {} (exposed at ({r}, {c}))",
                        certificate.multipliers.len(),
                        certificate.rhs
                    )?;
                    EXIT_INCONSISTENT
                }
            })
        }
        Command::Basis {
            spec,
            at,
            out: format,
            strategy: sargs,
        } => {
            let p = load(&spec)?;
            let e = basis_array(
                strategy(&sargs)?.as_ref(),
                &p.overlay,
                &p.layout,
                at,
                p.bounds,
            )?;
            out.write_all(render(&e, None, format).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::CheckSupport {
            spec,
            strategy: sargs,
        } => {
            let p = load(&spec)?;
            let report =
                check_support_cases(strategy(&sargs)?.as_ref(), &p.overlay, &p.layout, p.bounds)?;
            write!(out, "{report}")?;
            Ok(EXIT_OK)
        }
        Command::Series {
            spec,
            strategy: sargs,
        } => {
            let p = load(&spec)?;
            let result = strategy(&sargs)?.fill(&p.overlay, &p.layout, p.bounds)?;
            writeln!(out, "r\tc\tvalue")?;
            for (r, c, v) in result.window.series_terms() {
                writeln!(out, "{r}\t{c}\t{v}")?;
            }
            Ok(EXIT_OK)
        }
        Command::OracleDiff {
            spec,
            strategy: sargs,
        } => {
            let p = load(&spec)?;
            let diff =
                oracle_diff_with(strategy(&sargs)?.as_ref(), &p.overlay, &p.layout, p.bounds)?;
            write!(out, "{diff}")?;
            Ok(if diff.agrees() {
                EXIT_OK
            } else {
                EXIT_DISAGREE
            })
        }
        Command::Overlay { spec } => {
            let p = load(&spec)?;
            let o = &p.overlay;
            writeln!(out, "template: {}", p.template)?;
            out.write_all(o.render_ascii().as_bytes())?;
            writeln!(
                out,
                "m={} n={} u={} l={} s={} t={}",
                o.m(),
                o.n(),
                o.u(),
                o.l(),
                o.s(),
                o.t()
            )?;
            if let Some(diag) = o.contiguity_diagnostic() {
                writeln!(out, "warning: {diag}")?;
            }
            Ok(EXIT_OK)
        }
        Command::DumpSystem { spec } => {
            let p = load(&spec)?;
            let sys = LinearSystem::assemble(&p.overlay, &p.layout, p.bounds)?;
            out.write_all(sys.to_matrix_market().as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Strategies => {
            for (name, description) in StrategyRegistry::builtin().list() {
                writeln!(out, "{name}\t{description}")?;
            }
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}
