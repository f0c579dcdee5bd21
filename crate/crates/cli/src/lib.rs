//! Config-driven experiment runner for `qdd-core`.
//!
//! [`run_config_file`] reads an [`ExperimentConfig`], resolves referenced
//! files, runs the experiment and writes its table as CSV or JSON.

pub mod config;
pub mod runner;
pub mod schema;
pub mod table;

use std::path::{Path, PathBuf};

pub use config::{parse_experiment_config, ExperimentConfig, Format, Kind};
pub use runner::{run, Report};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration, or unusable paths.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    /// A computed result violates a required invariant.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

/// Where the rendered output went.
#[derive(Debug, Clone, PartialEq)]
pub enum Written {
    File(PathBuf),
    /// No `output` in the config; the caller prints this.
    Stdout(String),
}

/// Renders a report in the requested format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Csv => report.table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("JSON values serialize");
            s.push('\n');
            s
        }
    }
}

/// Loads, runs and writes one experiment. With `out_dir`, the output file
/// name from the config is placed in that directory, which is created if
/// missing.
pub fn run_config_file(path: &Path, out_dir: Option<&Path>) -> Result<Written, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config = parse_experiment_config(&bytes)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let resolved = config.resolve(base)?;
    let report = run(&resolved)?;
    match &config.output {
        None => Ok(Written::Stdout(report.table.to_csv())),
        Some(spec) => {
            let target = match out_dir {
                Some(dir) => {
                    let name = spec.path.file_name().ok_or_else(|| {
                        CliError::Config(format!("output.path: {} has no file name", spec.path.display()))
                    })?;
                    std::fs::create_dir_all(dir)
                        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
                    dir.join(name)
                }
                None => spec.path.clone(),
            };
            std::fs::write(&target, render(&report, spec.format))
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", target.display())))?;
            Ok(Written::File(target))
        }
    }
}
