use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

mod commands;

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "stacky", version, about = "Exact analysis of stacky moment polytopes and finite crossed-module actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for the Monte Carlo sampler.
    #[arg(long, global = true, default_value_t = 0x5EED)]
    seed: u64,

    /// Number of Monte Carlo samples.
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,

    /// Grid resolution: coverage spacing for `analyze`, row spacing for `dh-scan`.
    #[arg(long, global = true, default_value_t = 0.01)]
    grid: f64,

    /// Entry bound for the unimodular search in `morita`.
    #[arg(long, global = true, default_value_t = 3)]
    bound: i64,

    /// Output path. `dh-scan` writes its CSV here and keeps the summary on
    /// stdout; without it the CSV is embedded in the summary.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full report on a stacky polytope.
    Analyze { input: String },
    /// Slice-volume scan along a direction.
    DhScan {
        input: String,
        /// Comma-separated exact literals, e.g. `1,0` or `1/2,-1+1*sqrt(2)`.
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Exhaustive checks of a finite crossed-module action.
    FiniteCheck { input: String },
    /// Equivalence of two quasi-lattices.
    Morita { input: String },
}

fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))?;
    Ok(text)
}

fn emit(report: &Value, out: Option<&PathBuf>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let config = commands::Config { seed: cli.seed, samples: cli.samples, grid: cli.grid, bound: cli.bound };
    match &cli.command {
        Command::Analyze { input } => emit(&commands::analyze(&read_input(input)?, &config)?, cli.out.as_ref()),
        Command::DhScan { input, xi } => {
            let (mut summary, csv) = commands::dh_scan(&read_input(input)?, xi, &config)?;
            match &cli.out {
                Some(p) => {
                    std::fs::write(p, csv).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?;
                    summary["csv"] = p.display().to_string().into();
                }
                None => summary["csv"] = csv.into(),
            }
            emit(&summary, None)
        }
        Command::FiniteCheck { input } => emit(&commands::finite_check(&read_input(input)?, &config)?, cli.out.as_ref()),
        Command::Morita { input } => emit(&commands::morita(&read_input(input)?, &config)?, cli.out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = json!({"error": "usage", "message": e.to_string().trim_end()});
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.body);
            ExitCode::from(f.code)
        }
    }
}
