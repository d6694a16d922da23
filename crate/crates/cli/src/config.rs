//! Flag and config-file resolution, and the configuration hash embedded in
//! every output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wow_uwb_core::params::{parse_column, HURRICANE_WINDS_MPH};
use wow_uwb_core::synthesis::PulseTemplate;
use wow_uwb_core::{ParameterSet, Position, RainState, ScenarioParams};

use crate::Flags;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation: exit code 2.
    Usage(String),
    /// Validation failure or runtime error: exit code 1.
    Runtime(anyhow::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

/// Resolved settings: config-file values first, then flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub scenario: Option<String>,
    pub scans: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub params: Option<PathBuf>,
    pub template: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub velocities: Option<Vec<f64>>,
    pub waveforms: Option<bool>,
    pub workers: Option<usize>,
}

impl Settings {
    pub fn resolve(flags: &Flags) -> Result<Settings, CliError> {
        let from_flags = Settings {
            scenario: flags.scenario.clone(),
            scans: flags.scans,
            seed: flags.seed,
            out: flags.out.clone(),
            input: flags.input.clone(),
            params: flags.params.clone(),
            template: flags.template.clone(),
            tolerance: flags.tolerance,
            velocities: flags.velocities.clone(),
            waveforms: flags.waveforms.then_some(true),
            workers: flags.workers,
        };
        let Some(path) = &flags.config else {
            return Ok(from_flags);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let file: Settings = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        // Relative paths in a config file are relative to the file.
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: Option<PathBuf>| p.map(|p| if p.is_relative() { base.join(p) } else { p });
        Ok(Settings {
            scenario: file.scenario.or(from_flags.scenario),
            scans: file.scans.or(from_flags.scans),
            seed: file.seed.or(from_flags.seed),
            out: rebase(file.out).or(from_flags.out),
            input: rebase(file.input).or(from_flags.input),
            params: rebase(file.params).or(from_flags.params),
            template: rebase(file.template).or(from_flags.template),
            tolerance: file.tolerance.or(from_flags.tolerance),
            velocities: file.velocities.or(from_flags.velocities),
            waveforms: file.waveforms.or(from_flags.waveforms),
            workers: file.workers.or(from_flags.workers),
        })
    }

    pub fn column(&self) -> Result<(Position, RainState), CliError> {
        let s = self.scenario.as_deref().ok_or_else(|| CliError::Usage("--scenario is required".into()))?;
        parse_column(s).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn scans(&self, default: Option<usize>) -> Result<usize, CliError> {
        match self.scans.or(default) {
            Some(0) => Err(CliError::Usage("--scans must be at least 1".into())),
            Some(n) => Ok(n),
            None => Err(CliError::Usage("--scans is required".into())),
        }
    }

    pub fn out(&self) -> Result<&Path, CliError> {
        self.out.as_deref().ok_or_else(|| CliError::Usage("--out is required".into()))
    }

    pub fn input(&self) -> Result<&Path, CliError> {
        self.input.as_deref().ok_or_else(|| CliError::Usage("--input is required".into()))
    }

    pub fn velocities(&self) -> Result<Vec<f64>, CliError> {
        let v = self.velocities.clone().unwrap_or_else(|| HURRICANE_WINDS_MPH.to_vec());
        if v.is_empty() {
            return Err(CliError::Usage("--velocities must not be empty".into()));
        }
        if let Some(bad) = v.iter().find(|w| !HURRICANE_WINDS_MPH.contains(w)) {
            return Err(CliError::Usage(format!(
                "velocity {bad} mph is not one of the hurricane steps {HURRICANE_WINDS_MPH:?}"
            )));
        }
        Ok(v)
    }

    pub fn tolerance(&self) -> Result<Option<f64>, CliError> {
        match self.tolerance {
            Some(t) if !(t >= 0.0) || !t.is_finite() => {
                Err(CliError::Usage(format!("--tolerance {t} must be a finite value >= 0")))
            }
            t => Ok(t),
        }
    }

    /// Parameter set from `--params`, or the built-in tables.
    pub fn parameter_set(&self) -> Result<(ParameterSet, Option<String>), CliError> {
        match &self.params {
            None => Ok((ParameterSet::builtin(), None)),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow::anyhow!("cannot read parameters {}: {e}", path.display()))?;
                let set = ParameterSet::from_json(&text)
                    .map_err(|e| anyhow::anyhow!("parameters {}: {e}", path.display()))?;
                Ok((set, Some(sha256_hex(text.as_bytes()))))
            }
        }
    }

    pub fn column_params(&self) -> Result<(ScenarioParams, Option<String>), CliError> {
        let (pos, rain) = self.column()?;
        let (set, hash) = self.parameter_set()?;
        Ok((set.column(pos, rain)?.clone(), hash))
    }

    pub fn pulse_template(&self) -> Result<(PulseTemplate, Option<String>), CliError> {
        match &self.template {
            None => Ok((PulseTemplate::default(), None)),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow::anyhow!("cannot read template {}: {e}", path.display()))?;
                let t = PulseTemplate::parse(&text).map_err(|e| anyhow::anyhow!("template {}: {e}", path.display()))?;
                Ok((t, Some(sha256_hex(text.as_bytes()))))
            }
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the canonical JSON of a configuration echo.
pub fn config_hash<T: Serialize>(echo: &T) -> anyhow::Result<String> {
    Ok(sha256_hex(serde_json::to_string(echo)?.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocities_default_to_hurricane_steps_and_reject_others() {
        let s = Settings::default();
        assert_eq!(s.velocities().unwrap(), HURRICANE_WINDS_MPH.to_vec());
        let s = Settings { velocities: Some(vec![90.0, 95.0]), ..Default::default() };
        assert!(matches!(s.velocities(), Err(CliError::Usage(_))));
    }

    #[test]
    fn negative_or_nan_tolerance_is_a_usage_error() {
        for t in [-0.1, f64::NAN, f64::INFINITY] {
            let s = Settings { tolerance: Some(t), ..Default::default() };
            assert!(matches!(s.tolerance(), Err(CliError::Usage(_))));
        }
        let s = Settings { tolerance: Some(0.0), ..Default::default() };
        assert_eq!(s.tolerance().unwrap(), Some(0.0));
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let a = Settings { seed: Some(1), ..Default::default() };
        let b = Settings { seed: Some(2), ..Default::default() };
        assert_eq!(config_hash(&a).unwrap(), config_hash(&a.clone()).unwrap());
        assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
