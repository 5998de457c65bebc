use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prequant_cli::report::{emit, Format};

#[derive(Parser)]
#[command(name = "prequant", about = "Run manifest checks against the prequantization engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load a manifest, run its checks and print a report.
    Check {
        manifest: PathBuf,
        #[arg(long, value_enum, env = "PREQ_REPORT_FORMAT", default_value = "text")]
        format: Format,
        /// Run a single check by id.
        #[arg(long)]
        only: Option<String>,
        /// Override the manifest seed for randomized checks.
        #[arg(long)]
        seed: Option<u64>,
        /// Add wall-clock timings (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Cmd::Check { manifest, format, only, seed, timing } = cli.cmd;
    let text = match std::fs::read_to_string(&manifest) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", manifest.display());
            return ExitCode::from(2);
        }
    };
    let (ws, checks) = match prequant_cli::prepare(&text, only.as_deref()) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = prequant_cli::run_checks(&ws, &checks, seed, timing);
    print!("{}", emit(&report, format));
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
