//! Run configuration: command-line flags, optional JSON config files, and the
//! per-command defaults.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Run every identity and property suite.
    Verify,
    /// Classify and check a metric or direction from `--input`.
    Analyze,
    /// Randomized search for infinitesimally nonnegative directions.
    Search,
    /// Write the known so(4) families to `--out`.
    Catalog,
    /// Püttmann formula against the Koszul connection.
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Analyze => "analyze",
            Command::Search => "search",
            Command::Catalog => "catalog",
            Command::Oracle => "oracle",
        }
    }

    /// `samples` when the flag is absent.
    pub fn default_samples(self) -> usize {
        match self {
            Command::Verify => 200,
            Command::Analyze => 500,
            Command::Search => 200,
            Command::Catalog => 3,
            Command::Oracle => 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A fully resolved configuration. `out` is where the report goes and is not
/// echoed in it, so identical runs produce identical bytes wherever they land.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Overrides every suite tolerance when set.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    /// `so3`, `so4`, or a path to an algebra descriptor.
    #[serde(default)]
    pub algebra: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("bad config: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, input: None, seed: 0, samples: None, tol: None, format: Format::Json, out: None, algebra: None }
    }

    /// Parses a JSON config document (unknown keys rejected) and validates it.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.samples == Some(0) {
            return Err(ConfigError::Invalid("samples must be at least 1".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError::Invalid(format!("tol must be positive and finite, got {t}")));
            }
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or_else(|| self.command.default_samples())
    }

    /// Copy with `samples` filled in, as echoed in reports.
    pub fn resolved(&self) -> RunConfig {
        RunConfig { samples: Some(self.samples()), ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[derive(Debug, Parser)]
#[command(name = "curvlab", version, about = "Curvature variations of left-invariant metrics")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Matrix file (analyze).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Override every tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Report file (catalog: output directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// so3, so4, or a descriptor file.
    #[arg(long)]
    pub algebra: Option<String>,
    /// JSON config file; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ArgsError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.clone(), source })?;
                let mut c: RunConfig = serde_json::from_str(&text)?;
                c.command = self.command;
                c
            }
            None => RunConfig::new(self.command),
        };
        if self.input.is_some() {
            cfg.input = self.input;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.samples.is_some() {
            cfg.samples = self.samples;
        }
        if self.tol.is_some() {
            cfg.tol = self.tol;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.algebra.is_some() {
            cfg.algebra = self.algebra;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses process-style arguments (program name first) into a validated config.
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, ArgsError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Ok(Cli::try_parse_from(args)?.into_config()?)
}
