//! `se2n`: synthesize datasets, extract invariant descriptors, train and
//! evaluate SVM classifiers, and run the numerical property suites.

mod args;
mod commands;
mod overlay;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Invalid flags or configuration detected after parsing; exits with 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Raised by `check` when a tolerance is missed; exits with 1 after the
/// report has been written.
#[derive(Debug)]
pub struct ChecksFailed(pub usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) exceeded their tolerance", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(value) = std::env::var("SE2N_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            UsageError(format!(
                "SE2N_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| UsageError(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let result = match &cli.command {
        Command::Synth(a) => commands::synth(a, &argv),
        Command::Extract(a) => commands::extract(a, cli.config.as_deref(), &argv),
        Command::Train(a) => commands::train(a, cli.config.as_deref(), &argv),
        Command::Predict(a) => commands::predict(a, &argv),
        Command::Eval(a) => commands::eval(a, cli.config.as_deref(), &argv),
        Command::Check(a) => commands::check(a, &argv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<ChecksFailed>().is_none() {
                eprintln!("error: {e:#}");
            } else {
                eprintln!("{e}");
            }
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
