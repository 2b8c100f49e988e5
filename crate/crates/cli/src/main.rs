//! `loccov` command-line front end.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::commands::{EmbedArgs, IsometryArgs};
use crate::config::{CliError, ConfigFile, Format, Global, GlobalFlags, SEED_ENV};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "loccov", version, about = "Numerical checks for locally covariant nets on finite causal sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Tolerance override, e.g. `--tol isometry=1e-9` (repeatable).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Cap on the ambient dimension of materialized algebras (at most 4096).
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    /// JSON run configuration; flags take precedence over its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (default: $LOCCOV_SEED, else 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include wall time in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Evaluate sample batches on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Causal-set operations.
    Causet {
        #[command(subcommand)]
        action: CausetCmd,
    },
    /// Embedding operations.
    Embed {
        #[command(subcommand)]
        action: EmbedCmd,
    },
    /// Axiom checks on a net.
    Axioms {
        #[command(subcommand)]
        action: AxiomsCmd,
    },
    /// Theorem-level checks.
    Theorem {
        #[command(subcommand)]
        action: TheoremCmd,
    },
    /// Tensor-norm computations.
    Norm {
        #[command(subcommand)]
        action: NormCmd,
    },
}

#[derive(Debug, Subcommand)]
enum CausetCmd {
    /// Load a causal set (fixture name or JSON file) and report its structure.
    Validate { spacetime: Option<String> },
}

#[derive(Debug, Subcommand)]
enum EmbedCmd {
    /// Check admissibility of a map between causal sets.
    Check {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// Embedding JSON file `{"from", "to", "map"}`.
        #[arg(long, conflicts_with = "map")]
        file: Option<PathBuf>,
        /// Point assignment `SOURCE=TARGET` (repeatable).
        #[arg(long)]
        map: Vec<String>,
        /// Also audit the induced algebra map under this model.
        #[arg(long)]
        model: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum AxiomsCmd {
    /// Run axiom checks over the canonical instances of a spacetime.
    Run {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        spacetime: Option<String>,
        /// Comma-separated subset of checks (default: all).
        #[arg(long)]
        checks: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
enum TheoremCmd {
    /// Causality versus tensor-functor validity of the extension.
    Equivalence {
        #[arg(long)]
        model: Option<String>,
        /// Spacetimes for the causality side (default: antichain2, diamond).
        #[arg(long)]
        fixtures: Vec<String>,
    },
    /// Product norm versus minimal tensor norm on spacelike regions.
    Isometry {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        spacetime: Option<String>,
        #[arg(long)]
        fixtures: Vec<String>,
        /// Comma-separated points of the first region.
        #[arg(long, requires = "o2")]
        o1: Option<String>,
        #[arg(long, requires = "o1")]
        o2: Option<String>,
        /// Enclosing region (default: whole spacetime).
        #[arg(long)]
        o: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        /// Also track approximation through intermediate factors.
        #[arg(long)]
        nested: bool,
    },
}

#[derive(Debug, Subcommand)]
enum NormCmd {
    /// Minimal tensor norm of an element given in JSON.
    Min {
        #[arg(long)]
        input: PathBuf,
    },
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Causet { action: CausetCmd::Validate { .. } } => "causet validate",
        Command::Embed { action: EmbedCmd::Check { .. } } => "embed check",
        Command::Axioms { action: AxiomsCmd::Run { .. } } => "axioms run",
        Command::Theorem { action: TheoremCmd::Equivalence { .. } } => "theorem equivalence",
        Command::Theorem { action: TheoremCmd::Isometry { .. } } => "theorem isometry",
        Command::Norm { action: NormCmd::Min { .. } } => "norm min",
    }
}

fn run(cli: &Cli) -> Result<(Report, Format), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::read(path)?,
        None => ConfigFile::default(),
    };
    let flags = GlobalFlags {
        format: cli.format,
        tol: &cli.tol,
        max_dim: cli.max_dim,
        seed: cli.seed,
        timing: cli.timing,
        sequential: cli.sequential,
    };
    let g = Global::resolve(flags, file, std::env::var(SEED_ENV).ok())?;
    let start = Instant::now();
    let (inputs, results) = match &cli.command {
        Command::Causet { action: CausetCmd::Validate { spacetime } } => {
            commands::causet_validate(&g, spacetime.as_deref())
        }
        Command::Embed { action: EmbedCmd::Check { source, target, file, map, model } } => commands::embed_check(
            &g,
            EmbedArgs { source, target, file: file.as_deref(), map, model: model.as_deref() },
        ),
        Command::Axioms { action: AxiomsCmd::Run { model, spacetime, checks } } => {
            commands::axioms_run(&g, model.as_deref(), spacetime.as_deref(), checks)
        }
        Command::Theorem { action: TheoremCmd::Equivalence { model, fixtures } } => {
            commands::theorem_equivalence(&g, model.as_deref(), fixtures)
        }
        Command::Theorem { action: TheoremCmd::Isometry { model, spacetime, fixtures, o1, o2, o, samples, nested } } => {
            commands::theorem_isometry(
                &g,
                IsometryArgs {
                    model: model.as_deref(),
                    spacetime: spacetime.as_deref(),
                    fixtures,
                    o1: o1.as_deref(),
                    o2: o2.as_deref(),
                    o: o.as_deref(),
                    samples: *samples,
                    nested: *nested,
                },
            )
        }
        Command::Norm { action: NormCmd::Min { input } } => commands::norm_min(&g, input),
    }?;
    let mut report = Report::new(command_name(&cli.command), inputs, results);
    if g.timing {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok((report, g.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, format)) => {
            let text = match format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(report.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("loccov: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
