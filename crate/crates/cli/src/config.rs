//! Flag definitions and config-file merging.
//!
//! A config file is a flat JSON object keyed by flag name (without the
//! leading dashes). Unknown keys are rejected. Flags given on the command
//! line win over file values; anything still unset takes its default.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use sqzent_core::model::{CavityBath, InitialState, ReservoirParams, SimulationConfig, C64};

use crate::error::{usage, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    Noon,
    Epr,
    General,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimFlags {
    /// Initial two-cavity state.
    #[arg(long, value_enum)]
    pub initial: Option<InitialKind>,
    /// Real amplitude for noon/epr states, in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Eight comma-separated reals (re/im interleaved) on |00>,|01>,|10>,|11>.
    #[arg(long)]
    pub amps: Option<String>,
    /// Squeeze parameter (both cavities unless --r-b is given).
    #[arg(long)]
    pub r: Option<f64>,
    /// Squeezing phase in radians.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Decay rate.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long = "r-b")]
    pub r_b: Option<f64>,
    #[arg(long = "theta-b")]
    pub theta_b: Option<f64>,
    #[arg(long = "kappa-b")]
    pub kappa_b: Option<f64>,
    /// Fock cutoff per mode.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Horizon.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Sample spacing.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Concurrence values at or below this count as zero.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// JSON config file; command-line flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AmpsValue {
    Text(String),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub initial: Option<InitialKind>,
    pub alpha: Option<f64>,
    pub amps: Option<AmpsValue>,
    pub r: Option<f64>,
    pub theta: Option<f64>,
    pub kappa: Option<f64>,
    #[serde(rename = "r-b")]
    pub r_b: Option<f64>,
    #[serde(rename = "theta-b")]
    pub theta_b: Option<f64>,
    #[serde(rename = "kappa-b")]
    pub kappa_b: Option<f64>,
    pub cutoff: Option<usize>,
    pub tmax: Option<f64>,
    pub dt: Option<f64>,
    pub epsilon: Option<f64>,
}

pub fn read_config_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Ok(ConfigFile::default());
    }
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

fn parse_amps(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad --amps entry '{s}'"))))
        .collect()
}

fn amplitudes(values: &[f64]) -> Result<[C64; 4], CliError> {
    if values.len() != 8 {
        return Err(CliError::Usage(format!("--amps needs 8 numbers, got {}", values.len())));
    }
    Ok([0, 1, 2, 3].map(|k| C64::new(values[2 * k], values[2 * k + 1])))
}

impl SimFlags {
    /// Merges the config file (if any) under the command-line flags.
    pub fn merged(&self) -> Result<ConfigFile, CliError> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => ConfigFile::default(),
        };
        Ok(ConfigFile {
            initial: self.initial.or(file.initial),
            alpha: self.alpha.or(file.alpha),
            amps: self.amps.clone().map(AmpsValue::Text).or(file.amps),
            r: self.r.or(file.r),
            theta: self.theta.or(file.theta),
            kappa: self.kappa.or(file.kappa),
            r_b: self.r_b.or(file.r_b),
            theta_b: self.theta_b.or(file.theta_b),
            kappa_b: self.kappa_b.or(file.kappa_b),
            cutoff: self.cutoff.or(file.cutoff),
            tmax: self.tmax.or(file.tmax),
            dt: self.dt.or(file.dt),
            epsilon: self.epsilon.or(file.epsilon),
        })
    }

    pub fn resolve(&self) -> Result<SimulationConfig, CliError> {
        self.merged()?.resolve()
    }
}

impl ConfigFile {
    /// Applies defaults and validates. Defaults: noon, alpha = 1/sqrt(2),
    /// r = 0, theta = 0, kappa = 1, cutoff = 1, tmax = 10, dt = 1e-3 / kappa_max,
    /// epsilon = 1e-6.
    pub fn resolve(&self) -> Result<SimulationConfig, CliError> {
        let kappa = self.kappa.unwrap_or(1.0);
        let r = self.r.unwrap_or(0.0);
        let theta = self.theta.unwrap_or(0.0);
        let bath_a = CavityBath::new(kappa, r, theta);
        let bath_b = CavityBath::new(
            self.kappa_b.unwrap_or(kappa),
            self.r_b.unwrap_or(r),
            self.theta_b.unwrap_or(theta),
        );
        let params = ReservoirParams::new(bath_a, bath_b);

        let alpha = self.alpha.unwrap_or(FRAC_1_SQRT_2);
        let initial = match self.initial.unwrap_or(InitialKind::Noon) {
            InitialKind::Noon => InitialState::Noon { alpha },
            InitialKind::Epr => InitialState::Epr { alpha },
            InitialKind::General => {
                let values = match &self.amps {
                    Some(AmpsValue::Text(t)) => parse_amps(t)?,
                    Some(AmpsValue::List(v)) => v.clone(),
                    None => return Err(CliError::Usage("--initial general requires --amps".into())),
                };
                InitialState::General { amplitudes: amplitudes(&values)? }
            }
        };

        let mut config = SimulationConfig::new(params, initial);
        if let Some(n) = self.cutoff {
            config.n_max = n;
        }
        if let Some(t) = self.tmax {
            config.t_max = t;
        }
        if let Some(dt) = self.dt {
            config.dt = dt;
        }
        if let Some(eps) = self.epsilon {
            config.esd_epsilon = eps;
        }
        config.validate().map_err(usage)?;
        Ok(config)
    }
}
