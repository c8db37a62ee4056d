//! Command-line front end: argument handling, report assembly and exit codes.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure (diagnostic JSON
//! on standard error), 3 verification failure.

pub mod args;
pub mod commands;
pub mod report;

use args::{Cli, Format};
use clap::error::ErrorKind;
use clap::Parser;
use commands::{run_command, CliError};
use report::Timing;
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

/// Parses `argv`, runs the command, writes the report and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let start = Instant::now();
    let mut doc = match run_command(&cli.command, &cli.global) {
        Ok(doc) => doc,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(CliError::Numeric { kind, message, residual }) => {
            let diag = serde_json::json!({
                "error": "numeric failure",
                "kind": kind,
                "message": message,
                "residual": residual,
            });
            eprintln!("{diag}");
            return EXIT_NUMERIC;
        }
    };
    if cli.global.timing {
        doc.timing = Some(Timing {
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    let mut sink: Box<dyn Write> = match &cli.global.out {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => Box::new(std::io::BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None => Box::new(std::io::stdout().lock()),
    };
    let written = match cli.global.format {
        Format::Json => doc.write_json(&mut sink).map_err(|e| e.to_string()),
        Format::Csv => doc.write_csv(&mut sink).map_err(|e| e.to_string()),
    };
    if let Err(e) = written.and_then(|_| sink.flush().map_err(|e| e.to_string())) {
        eprintln!("error: writing report: {e}");
        return EXIT_USAGE;
    }
    if doc.passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    }
}
