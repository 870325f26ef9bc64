use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// One JSON document; every field is optional and command-line flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand when present.
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub runs: Option<usize>,
    pub horizon: Option<usize>,

    // equivalence
    pub trials: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub proper: Option<bool>,

    // mse-sweep
    pub rho_w: Option<Vec<f64>>,
    pub rho_n: Option<Vec<f64>>,
    pub rho_n_phase: Option<f64>,
    pub panels_db: Option<Vec<[f64; 2]>>,
    pub tol: Option<f64>,

    // theta-bound
    pub draws: Option<usize>,

    // phase-demod
    pub snr_db: Option<Vec<f64>>,
    pub rho: Option<Vec<f64>>,
    pub xi_snr_db: Option<Vec<f64>>,
    pub xi_rho: Option<f64>,
    pub trajectory_snr_db: Option<f64>,
    pub trajectory_rho: Option<f64>,
    pub phi: Option<f64>,
    /// Fixed UT κ; absent means `κ = 3 − L`.
    pub kappa: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn check_kind(&self, kind: &str) -> Result<(), CliError> {
        match &self.experiment {
            Some(k) if k != kind => Err(CliError::Config(format!(
                "config is for experiment `{k}`, not `{kind}`"
            ))),
            _ => Ok(()),
        }
    }
}

pub fn nonempty(name: &str, v: &[f64]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Config(format!("`{name}` must not be empty")));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(CliError::Config(format!("`{name}` contains non-finite value {x}")));
    }
    Ok(())
}

pub fn rho_grid(name: &str, v: &[f64]) -> Result<(), CliError> {
    nonempty(name, v)?;
    if let Some(x) = v.iter().find(|x| !(0.0..1.0).contains(*x)) {
        return Err(CliError::Config(format!("`{name}` value {x} is outside [0, 1)")));
    }
    Ok(())
}

pub fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::Config(format!("`{name}` must be positive")));
    }
    Ok(v)
}
