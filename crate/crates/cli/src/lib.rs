//! Command-line driver for the curvlab verification suites.
//!
//! `curvlab <verify|analyze|search|catalog|oracle> [flags]`. Reports are JSON
//! (or CSV) with a versioned envelope; exit codes are 0 for pass, 1 for a
//! failed check and 2 for bad configuration or input.

pub mod commands;
pub mod config;
pub mod suites;

use std::ffi::OsString;

pub use config::{parse_args, ArgsError, Command, ConfigError, Format, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "CURVLAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] curvlab_core::Error),
}

/// A finished command: the report text, human-readable status lines and the exit code.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub summary: Vec<String>,
    pub code: i32,
}

/// Runs a command without writing anything except the catalog's own files.
pub fn execute(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let run = || match cfg.command {
        Command::Verify => commands::verify(cfg),
        Command::Analyze => commands::analyze(cfg),
        Command::Search => commands::search(cfg),
        Command::Catalog => commands::catalog(cfg),
        Command::Oracle => commands::oracle(cfg),
    };
    match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

/// Executes and delivers the report: to `--out` (atomically) or stdout.
/// Status lines go to stderr. Returns the exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    let out = match execute(cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    for line in &out.summary {
        eprintln!("{line}");
    }
    match (&cfg.out, cfg.command) {
        (Some(path), c) if c != Command::Catalog => {
            if let Err(e) = curvlab_core::io::write_atomic(path, &out.text) {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        }
        _ => print!("{}", out.text),
    }
    out.code
}

/// Entry point used by the binary: parses `args` (program name first) and runs.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(args) {
        Ok(cfg) => run(&cfg),
        Err(ArgsError::Clap(e)) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            code
        }
        Err(ArgsError::Config(e)) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
