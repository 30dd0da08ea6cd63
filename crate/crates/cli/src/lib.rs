//! `nlapprox` command-line front-end: every analysis of `nlapprox-core` as a
//! subcommand writing a JSON (or flattened CSV) report to standard output.

pub mod args;
mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use args::{Cli, Format};
use commands::CliError;
use report::{ErrorBody, ErrorReport, ReportEnvelope};

/// Runs one invocation and returns the process exit code: 0 on success,
/// 1 when the computation fails, 2 on usage errors.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let name = cli.command.name();
    let format = cli.command.common().format;
    match commands::execute(&cli.command) {
        Ok(o) => {
            let env = ReportEnvelope {
                schema: report::SCHEMA,
                command: name.to_string(),
                parameters: o.parameters,
                results: o.results,
                certified: o.certified,
                seed: o.seed,
                tool_version: env!("CARGO_PKG_VERSION"),
            };
            let text = match format {
                Format::Json => report::to_json(&env),
                Format::Csv => report::to_csv(&env),
            };
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try 'nlapprox {name} --help'.");
            2
        }
        Err(CliError::Compute(e)) => {
            let rep = ErrorReport {
                schema: report::ERROR_SCHEMA,
                command: name,
                error: ErrorBody {
                    kind: e.kind(),
                    message: e.to_string(),
                },
                tool_version: env!("CARGO_PKG_VERSION"),
            };
            let _ = out.write_all(report::to_json(&rep).as_bytes());
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
