//! Experiment configuration: TOML schema, defaults matching the standard
//! simulation settings, and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{AssignmentError, ChannelSet};
use crate::channel::RadioParams;
use crate::scenario::{RateSplit, TimeGrid, Vec3, Zone};
use crate::solvers::{CandidateList, DesParams, SaParams, SolverKind};
use crate::Real;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Channels(#[from] AssignmentError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZoneConfig {
    pub size: [Real; 3],
}

impl Default for ZoneConfig {
    fn default() -> Self {
        ZoneConfig { size: [500.0, 500.0, 0.0] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub horizon: Real,
    pub period: Real,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { horizon: 30.0, period: 0.1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub tx_power_dbm: Real,
    pub wavelength_mm: Real,
    pub noise_psd_dbm_hz: Real,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig { tx_power_dbm: 20.0, wavelength_mm: 60.0, noise_psd_dbm_hz: -174.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub values_mhz: Vec<Real>,
    pub budget_mhz: Real,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig { values_mhz: vec![20.0, 40.0, 80.0, 160.0], budget_mhz: 320.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaConfig {
    pub t_max: Real,
    pub s_max: usize,
    pub delta_z: Real,
    pub beta: Real,
    /// Candidate list for the raw-fitness annealer (default: full).
    pub conv_sa_candidates: CandidateList,
    /// Candidate list for the penalized annealer (default: pruned).
    pub safnet_candidates: CandidateList,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            t_max: 1e8,
            s_max: 10_000,
            delta_z: 5.0,
            beta: 0.8,
            conv_sa_candidates: CandidateList::Auto,
            safnet_candidates: CandidateList::Auto,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesConfig {
    pub grid_step: Real,
    pub enum_cap: usize,
}

impl Default for DesConfig {
    fn default() -> Self {
        let d = DesParams::default();
        DesConfig { grid_step: d.grid_step, enum_cap: d.enum_cap }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityConfig {
    /// FEN speed for the random-waypoint generator, m/s.
    pub speed: Real,
    pub d_min: Real,
    /// Defaults to (0, Z_y / 2, 0) when absent.
    pub backhaul_pos: Option<[Real; 3]>,
    pub rate_split: RateSplit,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        MobilityConfig { speed: 5.0, d_min: 1.0, backhaul_pos: None, rate_split: RateSplit::Random }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// FEN counts to sweep.
    pub e: Vec<usize>,
    /// Total minimum-rate requirements in bit/s.
    pub total_min_rate: Vec<Real>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { e: vec![3], total_min_rate: vec![4.5e8] }
    }
}

/// Complete experiment description. All sections have defaults, so an empty
/// file is a valid single-cell toy experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    /// Number of seeded replicates per sweep cell.
    pub seeds: usize,
    pub solvers: Vec<SolverKind>,
    pub out_dir: String,
    pub zone: ZoneConfig,
    pub time: TimeConfig,
    pub radio: RadioConfig,
    pub channels: ChannelConfig,
    pub sa: SaConfig,
    pub des: DesConfig,
    pub mobility: MobilityConfig,
    pub sweep: SweepConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            master_seed: 1,
            seeds: 1,
            solvers: vec![SolverKind::ConvH, SolverKind::ConvSa, SolverKind::Safnet],
            out_dir: "out".to_string(),
            zone: ZoneConfig::default(),
            time: TimeConfig::default(),
            radio: RadioConfig::default(),
            channels: ChannelConfig::default(),
            sa: SaConfig::default(),
            des: DesConfig::default(),
            mobility: MobilityConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let config: ExperimentConfig =
            toml::from_str(&text).map_err(|e| ConfigError::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.solvers.is_empty() {
            return Err(ConfigError::Invalid("at least one solver is required".into()));
        }
        if self.seeds == 0 {
            return Err(ConfigError::Invalid("at least one seed replicate is required".into()));
        }
        if self.sweep.e.is_empty() || self.sweep.total_min_rate.is_empty() {
            return Err(ConfigError::Invalid(
                "sweep needs at least one FEN count and one total_min_rate".into(),
            ));
        }
        if self.sweep.e.contains(&0) {
            return Err(ConfigError::Invalid("FEN counts must be at least 1".into()));
        }
        if self.sweep.total_min_rate.iter().any(|&r| !(r > 0.0)) {
            return Err(ConfigError::Invalid("total_min_rate values must be positive".into()));
        }
        self.zone()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.time_grid().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.channel_set()?;
        self.radio_params()
            .validate()
            .map_err(ConfigError::Invalid)?;
        if !(self.mobility.d_min > 0.0) {
            return Err(ConfigError::Invalid("d_min must be positive".into()));
        }
        if !(self.sa.beta > 0.0 && self.sa.beta <= 1.0) {
            return Err(ConfigError::Invalid("beta must be in (0, 1]".into()));
        }
        if !(self.sa.t_max > 0.0 && self.sa.delta_z > 0.0) {
            return Err(ConfigError::Invalid("t_max and delta_z must be positive".into()));
        }
        if !(self.des.grid_step > 0.0) {
            return Err(ConfigError::Invalid("grid_step must be positive".into()));
        }
        Ok(())
    }

    pub fn zone(&self) -> Zone {
        Zone::new(self.zone.size[0], self.zone.size[1], self.zone.size[2])
    }

    pub fn time_grid(&self) -> Result<TimeGrid, crate::scenario::ScenarioError> {
        TimeGrid::new(self.time.horizon, self.time.period)
    }

    pub fn radio_params(&self) -> RadioParams {
        RadioParams::from_config_units(
            self.radio.tx_power_dbm,
            self.radio.wavelength_mm,
            self.radio.noise_psd_dbm_hz,
        )
    }

    pub fn channel_set(&self) -> Result<ChannelSet, AssignmentError> {
        ChannelSet::new(
            self.channels.values_mhz.iter().map(|v| v * 1e6).collect(),
            self.channels.budget_mhz * 1e6,
        )
    }

    pub fn backhaul_pos(&self) -> Vec3 {
        match self.mobility.backhaul_pos {
            Some([x, y, z]) => Vec3::new(x, y, z),
            None => Vec3::new(0.0, self.zone.size[1] / 2.0, 0.0),
        }
    }

    pub fn sa_params(&self, rng_seed: u64) -> SaParams {
        SaParams {
            t_max: self.sa.t_max,
            s_max: self.sa.s_max,
            delta_z: self.sa.delta_z,
            beta: self.sa.beta,
            rng_seed,
        }
    }

    pub fn des_params(&self) -> DesParams {
        DesParams { grid_step: self.des.grid_step, enum_cap: self.des.enum_cap }
    }
}
