use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use monolab::locality::{Ceilings, DEFAULT_GLOBAL_CEILING, DEFAULT_NS_CEILING};

mod commands;
mod fixtures;

use commands::Report;

/// Exact analysis of measurement scenarios, no-signalling models and their
/// macroscopic averages.
///
/// Exit status: 0 success (acyclic, local, holds, found), 1 negative
/// verdict, 2 usage or input error.
#[derive(Parser, Debug)]
#[command(name = "monolab", version)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Also write the command's document (witness, functional, model,
    /// scenario) to this file; commands without one write their report.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest number of global assignments enumerated or used as LP
    /// variables.
    #[arg(
        long,
        env = "MONOLAB_CEILING_GLOBAL",
        default_value_t = DEFAULT_GLOBAL_CEILING as u64,
        value_parser = clap::value_parser!(u64).range(1..),
        global = true
    )]
    ceiling_global: u64,

    /// Largest number of context cells in a no-signalling LP.
    #[arg(
        long,
        default_value_t = DEFAULT_NS_CEILING as u64,
        value_parser = clap::value_parser!(u64).range(1..),
        global = true
    )]
    ceiling_ns: u64,

    /// Seed for randomised subcommands.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Log every simplex pivot (very verbose).
    #[arg(long, global = true)]
    lp_trace: bool,
}

impl RunConfig {
    fn ceilings(&self) -> Ceilings {
        Ceilings {
            global: self.ceiling_global.into(),
            ns: self.ceiling_ns.into(),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// A scenario given either as a file or as a `Σ(n, k, r)` literal.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct ScenarioArg {
    /// Scenario (or complex) JSON file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Spec literal such as "n=2;k=2,3;r=1,2".
    #[arg(long)]
    pub spec: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graham-reduce a complex and report the verdict.
    CheckAcyclic { complex: PathBuf },
    /// Quotient a scenario by a vertex partition.
    Quotient { scenario: PathBuf, partition: PathBuf },
    /// Validate a model and decide whether it has a global extension.
    CheckModel { model: PathBuf },
    /// Average a model along a vertex partition.
    Average { model: PathBuf, partition: PathBuf },
    /// Evaluate a functional on a model.
    BellEval { functional: PathBuf, model: PathBuf },
    /// Maximum of a functional over deterministic models.
    LocalBound {
        functional: PathBuf,
        #[command(flatten)]
        target: ScenarioArg,
    },
    /// Maximum of a functional over no-signalling models.
    NsMax {
        functional: PathBuf,
        #[command(flatten)]
        target: ScenarioArg,
    },
    /// Check the lifted (monogamy) form of a base functional.
    Monogamy { functional: PathBuf, spec: String },
    /// Compare computed quotient acyclicity with the predicate.
    Scan {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        r: usize,
    },
    /// Search for a microscopic model with a non-local average.
    Witness { spec: String },
    /// Random no-signalling model (mixture of LP vertices), seeded.
    RandomModel {
        #[command(flatten)]
        target: ScenarioArg,
    },
    /// Write the fixture library.
    Fixtures {
        /// Target directory.
        dir: PathBuf,
    },
}

fn init_logging(run: &RunConfig) {
    let mut builder = env_logger::Builder::new();
    builder.filter_level(log::LevelFilter::Warn).parse_default_env();
    if run.lp_trace {
        builder.filter_module("monolab::lp", log::LevelFilter::Trace);
    }
    let _ = builder.try_init();
}

fn run(cli: Cli) -> Result<u8> {
    let run = &cli.run;
    let report: Report = match &cli.command {
        Command::CheckAcyclic { complex } => commands::check_acyclic(complex)?,
        Command::Quotient { scenario, partition } => commands::quotient(scenario, partition)?,
        Command::CheckModel { model } => commands::check_model(model, run.ceilings())?,
        Command::Average { model, partition } => commands::average(model, partition)?,
        Command::BellEval { functional, model } => commands::bell_eval(functional, model)?,
        Command::LocalBound { functional, target } => commands::local_bound(functional, target, run.ceilings())?,
        Command::NsMax { functional, target } => commands::ns_max(functional, target, run.ceilings())?,
        Command::Monogamy { functional, spec } => commands::monogamy(functional, spec, run.ceilings())?,
        Command::Scan { n, k, r } => {
            if *n == 0 || *k == 0 || *r == 0 {
                bail!("scan bounds must be positive");
            }
            commands::scan(*n, *k, *r)
        }
        Command::Witness { spec } => commands::witness(spec, run.ceilings())?,
        Command::RandomModel { target } => commands::random_model(target, run.seed, run.ceilings())?,
        Command::Fixtures { dir } => fixtures::write_library(dir)?,
    };
    let rendered = match run.format {
        Format::Text => report.text.clone(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json)?;
            s.push('\n');
            s
        }
    };
    print!("{rendered}");
    if let Some(path) = &run.out {
        let body = report.document.as_ref().unwrap_or(&rendered);
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(&cli.run);
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
