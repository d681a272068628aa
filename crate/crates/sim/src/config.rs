//! TOML run configuration.
//!
//! Every key is optional; a missing file or an empty table yields the
//! indoor-hotspot defaults. Unknown keys are rejected.

use std::fs;
use std::path::Path;

use ncjt_core::channel::NoiseConfig;
use ncjt_core::phy::InterferenceHypothesis;
use ncjt_core::topology::LayoutConfig;
use ncjt_core::{ArrivalScope, Scheme, SimParams, TrafficParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("cannot parse config {path}: {source}")]
    Parse { path: String, source: Box<toml::de::Error> },

    #[error("invalid value for `{key}`: {value} (allowed: {allowed})")]
    Invalid { key: String, value: String, allowed: String },
}

impl ConfigError {
    fn invalid(key: &str, value: impl ToString, allowed: &str) -> Self {
        ConfigError::Invalid { key: key.into(), value: value.to_string(), allowed: allowed.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: String,
    pub users_per_trp: usize,
    pub max_coord: usize,
    pub seeds: Vec<u64>,
    pub ttis: u64,
    pub warmup_ttis: u64,
    pub deployment: DeploymentConfig,
    pub radio: RadioConfig,
    pub traffic: TrafficConfig,
    pub channel: ChannelConfig,
    pub pf: PfConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeploymentConfig {
    pub trp_count: usize,
    pub isd_m: f64,
    pub floor_length_m: f64,
    pub floor_width_m: f64,
    pub wall_offset_m: f64,
    pub trp_height_m: f64,
    pub ue_height_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub carrier_ghz: f64,
    pub n_prb: usize,
    pub prb_bandwidth_hz: f64,
    pub tti_ms: f64,
    pub tx_power_dbm: f64,
    pub n_tx: usize,
    pub n_rx: usize,
    pub trp_antenna_gain_dbi: f64,
    pub ue_antenna_gain_dbi: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub feedback_delay: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    pub file_bytes: f64,
    pub lambda: f64,
    /// `network`, `per_trp` or `per_ue`.
    pub scope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub rho: f64,
    pub subbands: usize,
    pub se_cap: f64,
    pub csi_error_std: f64,
    /// `out_of_set` or `all_others`.
    pub interference: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PfConfig {
    pub tau: f64,
    pub epsilon: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SimParams::default();
        Self {
            scheme: p.scheme.name().into(),
            users_per_trp: p.users_per_trp,
            max_coord: p.max_coord,
            seeds: (1..=10).collect(),
            ttis: p.ttis,
            warmup_ttis: p.warmup_ttis,
            deployment: DeploymentConfig::default(),
            radio: RadioConfig::default(),
            traffic: TrafficConfig::default(),
            channel: ChannelConfig::default(),
            pf: PfConfig::default(),
        }
    }
}

impl Default for DeploymentConfig {
    fn default() -> Self {
        let l = LayoutConfig::default();
        Self {
            trp_count: l.trp_count,
            isd_m: l.isd_m,
            floor_length_m: l.floor_length_m,
            floor_width_m: l.floor_width_m,
            wall_offset_m: l.wall_offset_m,
            trp_height_m: l.trp_height_m,
            ue_height_m: l.ue_height_m,
        }
    }
}

impl Default for RadioConfig {
    fn default() -> Self {
        let p = SimParams::default();
        Self {
            carrier_ghz: p.carrier_ghz,
            n_prb: p.n_prb,
            prb_bandwidth_hz: p.noise.prb_bandwidth_hz,
            tti_ms: p.tti_s * 1e3,
            tx_power_dbm: p.layout.tx_power_dbm,
            n_tx: p.layout.n_tx,
            n_rx: p.n_rx,
            trp_antenna_gain_dbi: p.layout.antenna_gain_dbi,
            ue_antenna_gain_dbi: p.ue_antenna_gain_dbi,
            noise_psd_dbm_hz: p.noise.psd_dbm_per_hz,
            noise_figure_db: p.noise.noise_figure_db,
            feedback_delay: p.feedback_delay,
        }
    }
}

impl Default for TrafficConfig {
    fn default() -> Self {
        let t = TrafficParams::default();
        Self { file_bytes: t.file_bits / 8.0, lambda: t.arrival_rate, scope: t.scope.name().into() }
    }
}

impl Default for ChannelConfig {
    fn default() -> Self {
        let p = SimParams::default();
        Self {
            rho: p.fading_rho,
            subbands: p.n_subbands,
            se_cap: p.se_cap,
            csi_error_std: p.csi_error_std,
            interference: hypothesis_name(p.hypothesis).into(),
        }
    }
}

impl Default for PfConfig {
    fn default() -> Self {
        let p = SimParams::default();
        Self { tau: p.pf_horizon_ttis, epsilon: p.pf_floor_bps }
    }
}

fn hypothesis_name(h: InterferenceHypothesis) -> &'static str {
    match h {
        InterferenceHypothesis::OutOfSet => "out_of_set",
        InterferenceHypothesis::AllOthers => "all_others",
    }
}

fn hypothesis_from_name(name: &str) -> Option<InterferenceHypothesis> {
    match name {
        "out_of_set" => Some(InterferenceHypothesis::OutOfSet),
        "all_others" => Some(InterferenceHypothesis::AllOthers),
        _ => None,
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scheme: Option<String>,
    pub users_per_trp: Option<usize>,
    pub max_coord: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub ttis: Option<u64>,
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.into(), source: Box::new(e) })
    }

    /// Reads `path`, or returns the defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let shown = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: shown.clone(), source })?;
        Self::from_toml(&text, &shown)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = &o.scheme {
            self.scheme = s.clone();
        }
        if let Some(u) = o.users_per_trp {
            self.users_per_trp = u;
        }
        if let Some(m) = o.max_coord {
            self.max_coord = m;
        }
        if let Some(s) = &o.seeds {
            self.seeds = s.clone();
        }
        if let Some(t) = o.ttis {
            self.ttis = t;
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn scheme(&self) -> Result<Scheme, ConfigError> {
        Scheme::from_name(&self.scheme)
            .ok_or_else(|| ConfigError::invalid("scheme", &self.scheme, "none, dps, fncjt, nfncjt"))
    }

    /// Full validation; the returned parameters are ready to run.
    pub fn to_params(&self) -> Result<SimParams, ConfigError> {
        let scheme = self.scheme()?;
        if self.seeds.is_empty() {
            return Err(ConfigError::invalid("seeds", "[]", "at least one seed"));
        }
        let scope = ArrivalScope::from_name(&self.traffic.scope)
            .ok_or_else(|| ConfigError::invalid("traffic.scope", &self.traffic.scope, "network, per_trp, per_ue"))?;
        let hypothesis = hypothesis_from_name(&self.channel.interference).ok_or_else(|| {
            ConfigError::invalid("channel.interference", &self.channel.interference, "out_of_set, all_others")
        })?;
        let (d, r) = (&self.deployment, &self.radio);
        let params = SimParams {
            scheme,
            users_per_trp: self.users_per_trp,
            max_coord: self.max_coord,
            ttis: self.ttis,
            warmup_ttis: self.warmup_ttis,
            layout: LayoutConfig {
                trp_count: d.trp_count,
                isd_m: d.isd_m,
                floor_length_m: d.floor_length_m,
                floor_width_m: d.floor_width_m,
                wall_offset_m: d.wall_offset_m,
                trp_height_m: d.trp_height_m,
                ue_height_m: d.ue_height_m,
                tx_power_dbm: r.tx_power_dbm,
                n_tx: r.n_tx,
                antenna_gain_dbi: r.trp_antenna_gain_dbi,
            },
            n_rx: r.n_rx,
            ue_antenna_gain_dbi: r.ue_antenna_gain_dbi,
            carrier_ghz: r.carrier_ghz,
            n_prb: r.n_prb,
            tti_s: r.tti_ms * 1e-3,
            noise: NoiseConfig {
                psd_dbm_per_hz: r.noise_psd_dbm_hz,
                noise_figure_db: r.noise_figure_db,
                prb_bandwidth_hz: r.prb_bandwidth_hz,
            },
            feedback_delay: r.feedback_delay,
            fading_rho: self.channel.rho,
            n_subbands: self.channel.subbands,
            se_cap: self.channel.se_cap,
            pf_horizon_ttis: self.pf.tau,
            pf_floor_bps: self.pf.epsilon,
            traffic: TrafficParams {
                file_bits: self.traffic.file_bytes * 8.0,
                arrival_rate: self.traffic.lambda,
                scope,
            },
            csi_error_std: self.channel.csi_error_std,
            hypothesis,
        };
        params.validate().map_err(|e| match e {
            ncjt_core::Error::InvalidParam { key, value, expected } => ConfigError::invalid(key, value, expected),
            other => ConfigError::invalid("config", other, "a consistent parameter set"),
        })?;
        Ok(params)
    }
}
