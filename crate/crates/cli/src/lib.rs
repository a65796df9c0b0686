//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and writes a CSV document that starts with `# config:` and
//! `# seed:` comment lines.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, literals or
//! arguments), 2 on runtime failures such as a violated inequality or an
//! exhausted sample budget.

pub mod args;
mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

pub use args::Cli;

/// Directory for CSV output when `--out` is not given.
pub const OUT_DIR_ENV: &str = "ROBUSTTEST_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] robusttest_core::Error),
    #[error("cannot write {path}: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use robusttest_core::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(E::Parse { .. } | E::InvalidDistribution(_) | E::InvalidArgument(_)) => 1,
            CliError::Core(E::UnsupportedDistribution { .. }) => 1,
            CliError::Core(_) | CliError::Io { .. } => 2,
        }
    }
}

/// Runs with the output directory taken from [`OUT_DIR_ENV`].
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    run_with_out_dir(argv, out_dir, stdout, stderr)
}

pub fn run_with_out_dir<I, T>(argv: I, out_dir: Option<PathBuf>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse(argv) {
        Ok(Parsed::Run(cli)) => cli,
        Ok(Parsed::Print(text)) => {
            let _ = stdout.write_all(text.as_bytes());
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let msg = msg.trim_end();
            let prefix = if msg.starts_with("error:") { "" } else { "error: " };
            let _ = writeln!(stderr, "{prefix}{msg}");
            return e.exit_code();
        }
    };
    match execute(&cli, out_dir, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

enum Parsed {
    Run(Box<Cli>),
    /// `--help` or `--version` output.
    Print(String),
}

fn parse(argv: Vec<OsString>) -> Result<Parsed, CliError> {
    let argv = config::expand(argv)?;
    match Cli::try_parse_from(argv) {
        Ok(cli) => Ok(Parsed::Run(Box::new(cli))),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            Ok(Parsed::Print(e.render().to_string()))
        }
        Err(e) => Err(CliError::Usage(e.render().to_string())),
    }
}

fn execute(cli: &Cli, out_dir: Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let table = commands::execute(&cli.command)?;
    let config = serde_json::to_string(cli).expect("arguments serialize");
    let text = table.render(&config, cli.command.seed());

    let output = cli.command.output();
    let path = output
        .out
        .clone()
        .or_else(|| out_dir.map(|d| d.join(format!("{}.csv", cli.command.name()))));
    let io_error = |path: &PathBuf, e: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    };
    match path {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| io_error(&path, e))?;
            }
            fs::write(&path, text).map_err(|e| io_error(&path, e))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| io_error(&PathBuf::from("<stdout>"), e)),
    }
}
