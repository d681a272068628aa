//! Simulation parameters with indoor-hotspot defaults.

use crate::channel::NoiseConfig;
use crate::error::{Error, Result};
use crate::phy::InterferenceHypothesis;
use crate::scheduler::Scheme;
use crate::topology::LayoutConfig;

/// How the configured file arrival rate scales with the deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrivalScope {
    /// One Poisson stream for the whole network.
    #[default]
    Network,
    /// The rate applies to each TRP.
    PerTrp,
    /// The rate applies to each UE.
    PerUe,
}

impl ArrivalScope {
    pub fn name(self) -> &'static str {
        match self {
            ArrivalScope::Network => "network",
            ArrivalScope::PerTrp => "per_trp",
            ArrivalScope::PerUe => "per_ue",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [ArrivalScope::Network, ArrivalScope::PerTrp, ArrivalScope::PerUe].into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficParams {
    pub file_bits: f64,
    /// Files per second, interpreted according to `scope`.
    pub arrival_rate: f64,
    pub scope: ArrivalScope,
}

impl Default for TrafficParams {
    fn default() -> Self {
        Self { file_bits: 500_000.0 * 8.0, arrival_rate: 10.0, scope: ArrivalScope::Network }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub scheme: Scheme,
    pub users_per_trp: usize,
    pub max_coord: usize,
    pub ttis: u64,
    /// Files arriving before this TTI are excluded from statistics.
    pub warmup_ttis: u64,
    pub layout: LayoutConfig,
    pub n_rx: usize,
    pub ue_antenna_gain_dbi: f64,
    pub carrier_ghz: f64,
    pub n_prb: usize,
    pub tti_s: f64,
    pub noise: NoiseConfig,
    pub feedback_delay: u64,
    pub fading_rho: f64,
    pub n_subbands: usize,
    pub se_cap: f64,
    pub pf_horizon_ttis: f64,
    pub pf_floor_bps: f64,
    pub traffic: TrafficParams,
    /// Standard deviation of additive CSI error relative to unit-power
    /// fading; zero means ideal CSI.
    pub csi_error_std: f64,
    pub hypothesis: InterferenceHypothesis,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            scheme: Scheme::Nfncjt,
            users_per_trp: 3,
            max_coord: 2,
            ttis: 10_000,
            warmup_ttis: 200,
            layout: LayoutConfig::default(),
            n_rx: 4,
            ue_antenna_gain_dbi: 0.0,
            carrier_ghz: 3.5,
            n_prb: 50,
            tti_s: 1e-3,
            noise: NoiseConfig::default(),
            feedback_delay: 5,
            fading_rho: 0.99,
            n_subbands: 4,
            se_cap: 7.4,
            pf_horizon_ttis: 100.0,
            pf_floor_bps: 1.0,
            traffic: TrafficParams::default(),
            csi_error_std: 0.0,
            hypothesis: InterferenceHypothesis::OutOfSet,
        }
    }
}

fn check(ok: bool, key: &'static str, value: f64, expected: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParam { key, value, expected })
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let l = &self.layout;
        check(l.trp_count >= 1, "trp_count", l.trp_count as f64, ">= 1")?;
        check(self.users_per_trp >= 1, "users_per_trp", self.users_per_trp as f64, ">= 1")?;
        check((1..=l.trp_count).contains(&self.max_coord), "max_coord", self.max_coord as f64, "1 ..= trp_count")?;
        check(self.ttis >= 1, "ttis", self.ttis as f64, ">= 1")?;
        check(self.warmup_ttis < self.ttis, "warmup_ttis", self.warmup_ttis as f64, "< ttis")?;
        check(l.isd_m > 0.0 && l.isd_m.is_finite(), "isd_m", l.isd_m, "> 0")?;
        check(l.tx_power_dbm.is_finite(), "tx_power_dbm", l.tx_power_dbm, "finite")?;
        check(l.n_tx >= 1 && l.n_tx <= 8, "n_tx", l.n_tx as f64, "1 ..= 8")?;
        check(self.n_rx >= 1 && self.n_rx <= 16, "n_rx", self.n_rx as f64, "1 ..= 16")?;
        check(self.carrier_ghz > 0.0 && self.carrier_ghz.is_finite(), "carrier_ghz", self.carrier_ghz, "> 0")?;
        check(self.n_prb >= 1, "n_prb", self.n_prb as f64, ">= 1")?;
        check((1..=self.n_prb).contains(&self.n_subbands), "n_subbands", self.n_subbands as f64, "1 ..= n_prb")?;
        check(self.tti_s > 0.0 && self.tti_s.is_finite(), "tti_s", self.tti_s, "> 0")?;
        check(self.noise.prb_bandwidth_hz > 0.0, "prb_bandwidth_hz", self.noise.prb_bandwidth_hz, "> 0")?;
        check(self.noise.prb_noise_dbm().is_finite(), "noise_psd_dbm_hz", self.noise.psd_dbm_per_hz, "finite")?;
        check((0.0..=1.0).contains(&self.fading_rho), "fading_rho", self.fading_rho, "0 ..= 1")?;
        check(self.se_cap > 0.0 && self.se_cap.is_finite(), "se_cap", self.se_cap, "> 0")?;
        check(self.pf_horizon_ttis >= 1.0, "pf_horizon_ttis", self.pf_horizon_ttis, ">= 1")?;
        check(self.pf_floor_bps > 0.0, "pf_floor_bps", self.pf_floor_bps, "> 0")?;
        check(
            self.traffic.file_bits >= 1.0 && self.traffic.file_bits.is_finite(),
            "file_bytes",
            self.traffic.file_bits / 8.0,
            ">= 1 bit",
        )?;
        check(
            self.traffic.arrival_rate >= 0.0 && self.traffic.arrival_rate.is_finite(),
            "arrival_rate",
            self.traffic.arrival_rate,
            ">= 0",
        )?;
        check(
            self.csi_error_std >= 0.0 && self.csi_error_std.is_finite(),
            "csi_error_std",
            self.csi_error_std,
            ">= 0",
        )?;
        Ok(())
    }

    /// Total offered arrival rate in files per second.
    pub fn network_arrival_rate(&self) -> f64 {
        let n_trps = self.layout.trp_count as f64;
        let r = self.traffic.arrival_rate;
        match self.traffic.scope {
            ArrivalScope::Network => r,
            ArrivalScope::PerTrp => r * n_trps,
            ArrivalScope::PerUe => r * n_trps * self.users_per_trp as f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = SimParams::default();
        p.validate().unwrap();
        assert_eq!(p.layout.trp_count, 8);
        assert_eq!(p.layout.isd_m, 30.0);
        assert_eq!(p.carrier_ghz, 3.5);
        assert_eq!(p.n_prb, 50);
        assert_eq!(p.layout.tx_power_dbm, 24.0);
        assert_eq!(p.layout.n_tx, 2);
        assert_eq!(p.n_rx, 4);
        assert_eq!(p.feedback_delay, 5);
        assert_eq!(p.traffic.arrival_rate, 10.0);
    }

    #[test]
    fn max_coord_range() {
        let p = SimParams { max_coord: 0, ..SimParams::default() };
        assert!(matches!(p.validate(), Err(Error::InvalidParam { key: "max_coord", .. })));
        let p = SimParams { max_coord: 9, ..SimParams::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn arrival_scopes() {
        let mut p = SimParams::default();
        assert_eq!(p.network_arrival_rate(), 10.0);
        p.traffic.scope = ArrivalScope::PerTrp;
        assert_eq!(p.network_arrival_rate(), 80.0);
        p.traffic.scope = ArrivalScope::PerUe;
        assert_eq!(p.network_arrival_rate(), 240.0);
        assert_eq!(ArrivalScope::from_name("per_ue"), Some(ArrivalScope::PerUe));
    }
}
