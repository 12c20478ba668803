//! Command-line front end: runs a scenario file or a bundled preset and
//! writes a CSV or JSON table.
//!
//! Exit codes: 0 on success, 1 for bad input (scenario diagnostics, flags
//! that do not fit the scenario), 2 for failures while computing or writing.
//! Standard output only ever receives a complete table.

pub mod args;
mod commands;
pub mod table;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use weaklab_core::scenario::{corpus_entry, parse, validate_semantics, Diagnostic};

use crate::args::{preset_scenario, Cli, Command, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// The scenario or the flags are unusable; one message per line.
    Input(Vec<String>),
    Runtime(String),
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure::Input(vec![format!("error: {}", message.into())])
    }

    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn located(source: &str, diags: &[Diagnostic]) -> Vec<String> {
    diags.iter().map(|d| format!("{source}:{d}")).collect()
}

/// Parses `argv` (program name first), runs it and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    let Command::Run { experiment } = cli.command;
    let input = experiment.input();

    let outcome = (|| {
        let (source, text) = match (&input.file, &input.preset) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))?;
                (path.display().to_string(), text)
            }
            (None, Some(preset)) => {
                let name = preset_scenario(preset).expect("clap restricts preset names");
                (format!("preset {preset}"), corpus_entry(name).expect("bundled scenario").to_string())
            }
            (None, None) => unreachable!("clap requires a file or a preset"),
        };
        let doc = parse(&text).map_err(|d| Failure::Input(located(&source, &d)))?;
        let scenario = validate_semantics(&doc).map_err(|d| Failure::Input(located(&source, &d)))?;
        let table = commands::execute(&experiment, &scenario)?;
        let rendered = match input.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(experiment.name()),
        };
        Ok((located(&source, scenario.warnings()), rendered))
    })();

    match outcome {
        Ok((warnings, rendered)) => {
            for w in warnings {
                let _ = writeln!(stderr, "{w}");
            }
            let written = match &input.out {
                Some(path) => fs::write(path, rendered.as_bytes())
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout.write_all(rendered.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(message) => {
                    let _ = writeln!(stderr, "error: {message}");
                    EXIT_RUNTIME
                }
            }
        }
        Err(failure) => {
            match &failure {
                Failure::Input(lines) => lines.iter().for_each(|l| {
                    let _ = writeln!(stderr, "{l}");
                }),
                Failure::Runtime(message) => {
                    let _ = writeln!(stderr, "error: {message}");
                }
            }
            failure.code()
        }
    }
}
