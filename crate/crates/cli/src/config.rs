//! Experiment configuration files.
//!
//! A config is one JSON object. `kind` selects the experiment; the other
//! fields are read only when that experiment needs them. Model, spectral
//! model and scheme may be given inline or as a path to a JSON file,
//! resolved against the directory of the config file.

use std::fmt;
use std::path::{Path, PathBuf};

use qdd_core::decouple::DDScheme;
use qdd_core::pocket::SpectralModel;
use qdd_core::serial::{MatrixJson, ModelJson, SchemeJson, SpectralJson};
use qdd_core::{LindbladModel, Operator};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Generator,
    Evolve,
    DdAverage,
    CollisionStudy,
    Pocket,
    Kernels,
    Contrast,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Generator => "generator",
            Kind::Evolve => "evolve",
            Kind::DdAverage => "dd-average",
            Kind::CollisionStudy => "collision-study",
            Kind::Pocket => "pocket",
            Kind::Kernels => "kernels",
            Kind::Contrast => "contrast",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

/// Either a path to a JSON file or the value itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(PathBuf),
    Inline(T),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Source<serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_model: Option<Source<serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Source<serde_json::Value>>,
    /// Initial state for `evolve`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<MatrixJson>,
    /// Operators of the two-time kernel for `kernels`.
    #[serde(rename = "Y", default, skip_serializing_if = "Option::is_none")]
    pub y: Option<MatrixJson>,
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    pub x: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub taus: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    /// Pulse count for `pocket`; defaults to `round(t / tau)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kick_every: Option<usize>,
    /// Coupling rate for `contrast`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

/// Decodes a config. Errors name the offending field.
pub fn parse_experiment_config(bytes: &[u8]) -> Result<ExperimentConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Config(located("config", e)))
}

/// `prefix.path: message`, or `prefix: message` at the root.
fn located(prefix: &str, e: serde_path_to_error::Error<serde_json::Error>) -> String {
    let path = e.path().to_string();
    if path == "." {
        format!("{prefix}: {}", e.into_inner())
    } else {
        format!("{prefix}.{path}: {}", e.into_inner())
    }
}

/// Inputs decoded and validated, ready to run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub model: Option<LindbladModel>,
    pub spectral: Option<SpectralModel>,
    pub scheme: Option<DDScheme>,
    pub rho: Option<Operator>,
    pub y: Option<Operator>,
    pub x: Option<Operator>,
}

impl ExperimentConfig {
    /// Loads referenced files relative to `base_dir` and validates every
    /// value, including dimensions across fields.
    pub fn resolve(&self, base_dir: &Path) -> Result<Resolved, CliError> {
        let model = resolve_source::<ModelJson, _>(self.model.as_ref(), "model", base_dir, |j| j.to_model())?;
        let spectral =
            resolve_source::<SpectralJson, _>(self.spectral_model.as_ref(), "spectral_model", base_dir, |j| {
                j.to_spectral()
            })?;
        let scheme = resolve_source::<SchemeJson, _>(self.scheme.as_ref(), "scheme", base_dir, |j| j.to_scheme())?;
        let matrix = |m: &Option<MatrixJson>, field: &str| -> Result<Option<Operator>, CliError> {
            m.as_ref()
                .map(|m| m.to_operator().map_err(|e| CliError::Config(format!("{field}: {e}"))))
                .transpose()
        };
        let resolved = Resolved {
            config: self.clone(),
            model,
            spectral,
            scheme,
            rho: matrix(&self.rho, "rho")?,
            y: matrix(&self.y, "Y")?,
            x: matrix(&self.x, "X")?,
        };
        resolved.check_required()?;
        resolved.check_dimensions()?;
        resolved.check_numbers()?;
        Ok(resolved)
    }
}

fn resolve_source<J: DeserializeOwned, T>(
    source: Option<&Source<serde_json::Value>>,
    field: &str,
    base_dir: &Path,
    build: impl Fn(&J) -> qdd_core::Result<T>,
) -> Result<Option<T>, CliError> {
    let Some(source) = source else {
        return Ok(None);
    };
    let (json, origin): (J, String) = match source {
        Source::Path(p) => {
            let full = base_dir.join(p);
            let bytes = std::fs::read(&full)
                .map_err(|e| CliError::Config(format!("{field}: cannot read {}: {e}", full.display())))?;
            let de = &mut serde_json::Deserializer::from_slice(&bytes);
            let json = serde_path_to_error::deserialize(de)
                .map_err(|e| CliError::Config(located(&format!("{field} ({})", full.display()), e)))?;
            (json, format!("{field} ({})", full.display()))
        }
        Source::Inline(v) => {
            let json = serde_path_to_error::deserialize(v).map_err(|e| CliError::Config(located(field, e)))?;
            (json, field.to_string())
        }
    };
    build(&json)
        .map(Some)
        .map_err(|e| CliError::Config(format!("{origin}: {e}")))
}

fn missing(kind: Kind, field: &str) -> CliError {
    CliError::Config(format!("kind `{kind}` requires field `{field}`"))
}

impl Resolved {
    fn check_required(&self) -> Result<(), CliError> {
        let c = &self.config;
        let kind = c.kind;
        let need = |present: bool, field: &str| if present { Ok(()) } else { Err(missing(kind, field)) };
        match kind {
            Kind::Generator | Kind::DdAverage => {
                need(self.model.is_some(), "model")?;
                need(self.scheme.is_some(), "scheme")?;
            }
            Kind::Evolve => {
                need(self.model.is_some(), "model")?;
                need(self.rho.is_some(), "rho")?;
                need(!c.times.is_empty(), "times")?;
            }
            Kind::CollisionStudy => {
                need(self.model.is_some(), "model")?;
                need(self.scheme.is_some(), "scheme")?;
                need(c.taus.len() >= 2, "taus")?;
            }
            Kind::Pocket => {
                need(self.spectral.is_some(), "spectral_model")?;
                need(self.scheme.is_some(), "scheme")?;
                need(!c.times.is_empty(), "times")?;
            }
            Kind::Kernels => {
                need(self.spectral.is_some(), "spectral_model")?;
                need(self.y.is_some(), "Y")?;
                need(self.x.is_some(), "X")?;
                need(!c.times.is_empty(), "times")?;
            }
            Kind::Contrast => need(c.taus.len() >= 2, "taus")?,
        }
        Ok(())
    }

    fn check_dimensions(&self) -> Result<(), CliError> {
        let d = self
            .model
            .as_ref()
            .map(|m| ("model", m.dim()))
            .or_else(|| self.spectral.as_ref().map(|s| ("spectral_model", s.dim())));
        let Some((reference, d)) = d else {
            return Ok(());
        };
        let mut others: Vec<(&str, usize)> = Vec::new();
        if let Some(s) = &self.spectral {
            others.push(("spectral_model", s.dim()));
        }
        if let Some(s) = &self.scheme {
            others.push(("scheme", s.dim()));
        }
        for (field, m) in [("rho", &self.rho), ("Y", &self.y), ("X", &self.x)] {
            if let Some(m) = m {
                others.push((field, m.nrows()));
            }
        }
        for (field, found) in others {
            if found != d {
                return Err(CliError::Config(format!(
                    "{field}: dimension {found} does not match {reference} dimension {d}"
                )));
            }
        }
        Ok(())
    }

    fn check_numbers(&self) -> Result<(), CliError> {
        let c = &self.config;
        if let Some(t) = c.times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(CliError::Config(format!(
                "times: {t} is not a finite non-negative time"
            )));
        }
        if let Some(t) = c.taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(CliError::Config(format!("taus: {t} is not a positive step")));
        }
        if c.taus.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CliError::Config("taus: must be strictly descending".into()));
        }
        if let Some(t) = c.total_time {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("T: {t} is not a positive time")));
            }
        }
        if let Some(g) = c.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(CliError::Config(format!("gamma: {g} is not a positive rate")));
            }
        }
        if c.kick_every == Some(0) {
            return Err(CliError::Config("kick_every: must be at least 1".into()));
        }
        if c.steps == Some(0) {
            return Err(CliError::Config("steps: must be at least 1".into()));
        }
        Ok(())
    }
}
