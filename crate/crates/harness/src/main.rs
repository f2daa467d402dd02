use std::path::PathBuf;
use std::process::ExitCode;

use aqft1d_harness::config::RunConfig;
use aqft1d_harness::{run_commutator, run_propagate, run_verify, write_file, HarnessError, VerifyOptions};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aqft1d", version, about = "Verify and explore quantized field theories on smooth families of 1-dimensional spacetimes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Override a tolerance, `name=value`; repeatable.
        #[arg(long = "tol")]
        tol: Vec<String>,
        /// Include per-check wall time in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Tabulate a Green operator applied to a test field as CSV.
    Propagate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        samples: usize,
    },
    /// Print the normal form of the (anti)commutator of two expressions.
    Commutator {
        #[arg(long)]
        config: PathBuf,
        a: String,
        b: String,
    },
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Verify { config, report, tol, timings } => {
            let mut config = RunConfig::load(&config)?;
            config.override_tolerances(&tol)?;
            let r = run_verify(&config, VerifyOptions { timings })?;
            let path = report.or_else(|| config.output.report.as_ref().map(PathBuf::from));
            if let Some(path) = path {
                write_file(&path, &r.to_json())?;
            }
            print!("{}", r.summary());
            Ok(r.passed)
        }
        Command::Propagate { config, csv, samples } => {
            let config = RunConfig::load(&config)?;
            let rows = run_propagate(&config, &csv, samples)?;
            println!("wrote {rows} rows to {}", csv.display());
            Ok(true)
        }
        Command::Commutator { config, a, b } => {
            let config = RunConfig::load(&config)?;
            println!("{}", run_commutator(&config, &a, &b)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
