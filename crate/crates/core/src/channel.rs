//! Large-scale (pathloss, LOS, shadowing) and small-scale (AR(1) Rayleigh)
//! channel for every UE-TRP pair.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::linalg::CMatrix;
use crate::topology::{Position, Trp, TrpId, UeId};

/// Indoor-hotspot pathloss in dB. Distances below 1 m are clamped.
pub fn pathloss_db(distance_3d_m: f64, fc_ghz: f64, is_los: bool) -> f64 {
    let d = distance_3d_m.max(1.0);
    let f = 20.0 * libm::log10(fc_ghz);
    if is_los {
        16.9 * libm::log10(d) + 32.8 + f
    } else {
        43.3 * libm::log10(d) + 11.5 + f
    }
}

pub const LOS_RADIUS_M: f64 = 18.0;
pub const LOS_OUTER_M: f64 = 37.0;

pub fn los_probability(distance_2d_m: f64) -> f64 {
    if distance_2d_m <= LOS_RADIUS_M {
        1.0
    } else if distance_2d_m < LOS_OUTER_M {
        libm::exp(-(distance_2d_m - LOS_RADIUS_M) / 27.0)
    } else {
        0.5
    }
}

pub const SHADOWING_STD_LOS_DB: f64 = 3.0;
pub const SHADOWING_STD_NLOS_DB: f64 = 4.0;

pub fn draw_shadowing<R: Rng + ?Sized>(is_los: bool, rng: &mut R) -> f64 {
    let sigma = if is_los { SHADOWING_STD_LOS_DB } else { SHADOWING_STD_NLOS_DB };
    let z: f64 = StandardNormal.sample(rng);
    sigma * z
}

/// Large-scale state of one link, fixed at drop time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeScale {
    pub is_los: bool,
    pub pathloss_db: f64,
    pub shadowing_db: f64,
}

impl LargeScale {
    pub fn draw<R: Rng + ?Sized>(ue: &Position, trp: &Trp, fc_ghz: f64, rng: &mut R) -> Self {
        let p_los = los_probability(ue.distance_2d(&trp.position));
        let is_los = rng.random::<f64>() < p_los;
        let pathloss_db = pathloss_db(ue.distance_3d(&trp.position), fc_ghz, is_los);
        let shadowing_db = draw_shadowing(is_los, rng);
        Self { is_los, pathloss_db, shadowing_db }
    }

    /// Shadowing enters as a loss, so positive values weaken the link.
    pub fn coupling_gain_db(&self, trp_gain_dbi: f64, ue_gain_dbi: f64) -> f64 {
        -self.pathloss_db - self.shadowing_db + trp_gain_dbi + ue_gain_dbi
    }
}

/// Full state of one UE-TRP link: large-scale terms plus one unit-power
/// `n_rx x n_tx` Rayleigh matrix per subband.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    pub ue: UeId,
    pub trp: TrpId,
    pub large_scale: LargeScale,
    pub fading: Vec<CMatrix>,
}

impl LinkState {
    pub fn new<R: Rng + ?Sized>(
        ue: UeId,
        trp: TrpId,
        large_scale: LargeScale,
        n_rx: usize,
        n_tx: usize,
        n_subbands: usize,
        rng: &mut R,
    ) -> Self {
        let fading = (0..n_subbands)
            .map(|_| {
                let mut h = CMatrix::zeros(n_rx, n_tx);
                for z in h.as_mut_slice() {
                    *z = complex_gaussian(rng);
                }
                h
            })
            .collect();
        Self { ue, trp, large_scale, fading }
    }

    /// Builds a link with given fading matrices, for tests and hand-made
    /// scenarios.
    pub fn with_fading(ue: UeId, trp: TrpId, large_scale: LargeScale, fading: Vec<CMatrix>) -> Self {
        Self { ue, trp, large_scale, fading }
    }

    pub fn coupling_gain_db(&self, trp: &Trp, ue_gain_dbi: f64) -> f64 {
        self.large_scale.coupling_gain_db(trp.antenna_gain_dbi, ue_gain_dbi)
    }

    /// One TTI of first-order autoregressive evolution,
    /// `h <- rho h + sqrt(1 - rho^2) w` with `w ~ CN(0, 1)`.
    pub fn evolve_fading<R: Rng + ?Sized>(&mut self, rho: f64, rng: &mut R) {
        if rho >= 1.0 {
            return;
        }
        let innovation = libm::sqrt((1.0 - rho * rho).max(0.0));
        for h in &mut self.fading {
            for z in h.as_mut_slice() {
                *z = *z * rho + complex_gaussian(rng) * innovation;
            }
        }
    }
}

/// Circularly symmetric `CN(0, 1)` sample.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Additive noise for one PRB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub psd_dbm_per_hz: f64,
    pub noise_figure_db: f64,
    pub prb_bandwidth_hz: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { psd_dbm_per_hz: -174.0, noise_figure_db: 9.0, prb_bandwidth_hz: 180_000.0 }
    }
}

impl NoiseConfig {
    pub fn prb_noise_dbm(&self) -> f64 {
        self.psd_dbm_per_hz + 10.0 * libm::log10(self.prb_bandwidth_hz) + self.noise_figure_db
    }

    pub fn prb_noise_watts(&self) -> f64 {
        dbm_to_watts(self.prb_noise_dbm())
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Additive Gaussian CSI error: returns `h + sigma * CN(0, 1)` per element.
pub fn perturb<R: Rng + ?Sized>(h: &CMatrix, sigma: f64, rng: &mut R) -> CMatrix {
    let mut out = h.clone();
    if sigma > 0.0 {
        let normal = Normal::new(0.0, sigma * core::f64::consts::FRAC_1_SQRT_2).expect("sigma is finite and positive");
        for z in out.as_mut_slice() {
            *z += Complex64::new(normal.sample(rng), normal.sample(rng));
        }
    }
    out
}
