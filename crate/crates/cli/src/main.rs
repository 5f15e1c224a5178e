mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use bhbound::report::FailureKind;
use clap::Parser;

use commands::RunError;
use config::{Cli, OutputFormat, RunConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_CERTIFICATION: u8 = 3;
const EXIT_ORACLE: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = match commands::run(&cfg) {
        Ok(r) => r,
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(RunError::Compute(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CERTIFICATION);
        }
    };
    let text = match cfg.output_format {
        OutputFormat::Structured => report.to_json(),
        OutputFormat::Tabular => report.to_tsv(),
    };
    let written = match &cfg.output_path {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    eprintln!(
        "{}: {} ({} rows, {} failures)",
        cfg.command.name(),
        report.status,
        report.rows.len(),
        report.failures.len()
    );
    if report.has_failure(FailureKind::OracleViolation) {
        ExitCode::from(EXIT_ORACLE)
    } else if !report.passed() {
        ExitCode::from(EXIT_CERTIFICATION)
    } else {
        ExitCode::SUCCESS
    }
}
