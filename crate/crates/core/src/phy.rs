//! Link-level abstraction: rank-1 precoding, effective-channel composition,
//! MMSE-IRC post-combining SINR, and CSI reporting.
//!
//! Every TRP sends at most one layer per PRB. A UE served by `l` TRPs of its
//! CoMP set on a PRB receives `l` layers; every other active transmission on
//! that PRB (in-set TRPs serving someone else, and all out-of-set TRPs) is
//! interference. DPS, F-NCJT and NF-NCJT differ only in which grid rows the
//! schedulers produce, so a single composition routine covers all three.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{add_outer, norm, CMatrix, CVector, Cholesky};
use crate::scheduler::GridEntry;
use crate::topology::{CompSet, TrpId, UeId};

/// Unit-norm `n_tx x 1` beamforming vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder(CVector);

impl Precoder {
    /// Normalizes `v`; returns `None` for a zero or non-finite vector.
    pub fn new(v: CVector) -> Option<Self> {
        let n = norm(&v);
        if !(n > 0.0 && n.is_finite()) {
            return None;
        }
        Some(Self(v.into_iter().map(|z| z / n).collect()))
    }

    /// First canonical basis vector.
    pub fn unit(n_tx: usize) -> Self {
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); n_tx];
        v[0] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Principal right singular vector of `h`, phase-rotated so that its first
/// non-negligible entry is real and non-negative. An all-zero channel yields
/// the first unit vector.
pub fn select_precoder(h: &CMatrix) -> Precoder {
    let n_tx = h.cols();
    if n_tx == 0 {
        return Precoder(Vec::new());
    }
    if h.frobenius_norm_sqr() == 0.0 || !h.is_finite() {
        return Precoder::unit(n_tx);
    }
    let gram = h.gram();
    let v = if n_tx == 1 {
        alloc::vec![Complex64::new(1.0, 0.0)]
    } else if n_tx == 2 {
        principal_eigvec_2x2(&gram)
    } else {
        principal_eigvec(&gram)
    };
    match Precoder::new(v) {
        Some(p) => normalize_phase(p),
        None => Precoder::unit(n_tx),
    }
}

/// Closed-form dominant eigenvector of a 2x2 Hermitian matrix
/// `[[a, b], [conj(b), d]]`.
fn principal_eigvec_2x2(g: &CMatrix) -> CVector {
    let a = g[(0, 0)].re;
    let d = g[(1, 1)].re;
    let b = g[(0, 1)];
    let half_gap = (a - d) / 2.0;
    let lambda = (a + d) / 2.0 + libm::sqrt(half_gap * half_gap + b.norm_sqr());
    let scale = a.abs().max(d.abs());
    if b.norm() <= 1e-15 * scale {
        return if a >= d {
            alloc::vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            alloc::vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        };
    }
    // (a - lambda) v0 + b v1 = 0. Pick the better-conditioned of the two
    // equivalent row equations.
    if a >= d {
        alloc::vec![Complex64::new(lambda - d, 0.0), b.conj()]
    } else {
        alloc::vec![b, Complex64::new(lambda - a, 0.0)]
    }
}

/// Dominant eigenvector of a Hermitian matrix for `n_tx > 2`.
fn principal_eigvec(g: &CMatrix) -> CVector {
    let n = g.rows();
    let m = DMatrix::from_row_slice(n, n, g.as_slice());
    let eig = m.symmetric_eigen();
    let mut best = 0;
    for i in 1..n {
        if eig.eigenvalues[i] > eig.eigenvalues[best] * (1.0 + 1e-12) {
            best = i;
        }
    }
    eig.eigenvectors.column(best).iter().copied().collect()
}

fn normalize_phase(p: Precoder) -> Precoder {
    let max = p.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let Some(pivot) = p.0.iter().find(|z| z.norm() > 1e-12 * max) else {
        return p;
    };
    let rot = pivot.conj() / pivot.norm();
    let mut v: CVector = p.0.iter().map(|z| z * rot).collect();
    // Exact zero imaginary part for the pivot.
    if let Some(first) = v.iter_mut().find(|z| z.norm() > 1e-12 * max) {
        *first = Complex64::new(first.norm(), 0.0);
    }
    Precoder(v)
}

/// Interference-plus-noise covariance, factored once so that many desired
/// columns can be evaluated against it.
#[derive(Debug, Clone)]
pub struct IrcReceiver {
    chol: Cholesky,
}

impl IrcReceiver {
    /// `R = sum_i g_i g_i^H + noise_power I`.
    pub fn new<'a, I>(n_rx: usize, interferers: I, noise_power: f64) -> Self
    where
        I: IntoIterator<Item = &'a CVector>,
    {
        let mut r = CMatrix::identity(n_rx);
        for z in r.as_mut_slice() {
            *z *= noise_power;
        }
        for g in interferers {
            add_outer(&mut r, g, 1.0);
        }
        Self::from_covariance(&r)
    }

    /// Panics if `r` is not positive definite; any `R` with a positive noise
    /// floor is.
    pub fn from_covariance(r: &CMatrix) -> Self {
        let chol = Cholesky::new(r).expect("interference-plus-noise covariance must be positive definite");
        Self { chol }
    }

    /// `d^H R^{-1} d`.
    pub fn sinr(&self, desired: &[Complex64]) -> f64 {
        self.chol.quad_inverse(desired)
    }
}

/// Post-combining SINR of one layer under an MMSE-IRC receiver.
///
/// `noise_power` must be strictly positive.
pub fn mmse_irc_sinr(desired: &[Complex64], interferers: &[CVector], noise_power: f64) -> f64 {
    assert!(noise_power > 0.0, "noise power must be positive");
    IrcReceiver::new(desired.len(), interferers, noise_power).sinr(desired)
}

/// Shannon spectral efficiency, capped at `se_cap`.
pub fn sinr_to_se(sinr: f64, se_cap: f64) -> f64 {
    if !(sinr > 0.0) {
        return 0.0;
    }
    libm::log2(1.0 + sinr).min(se_cap)
}

/// Per-(UE, TRP) CSI: recommended precoder and spectral efficiency per
/// subband, plus the wideband mean (the scalar `c` of the scheduler).
#[derive(Debug, Clone, PartialEq)]
pub struct CsiReport {
    pub ue: UeId,
    pub trp: TrpId,
    pub precoders: Vec<Precoder>,
    pub subband_se: Vec<f64>,
    pub spectral_efficiency: f64,
    pub measured_tti: u64,
}

impl CsiReport {
    /// A report may be used only once the feedback delay has elapsed.
    pub fn usable_at(&self, tti: u64, feedback_delay: u64) -> bool {
        tti >= self.measured_tti + feedback_delay
    }
}

/// Read access to the current (or estimated) channel of every link.
pub trait ChannelView {
    fn n_trps(&self) -> usize;
    fn n_rx(&self, ue: UeId) -> usize;
    fn n_tx(&self, trp: TrpId) -> usize;
    /// Unit-power fading matrix of the link on `subband`.
    fn fading(&self, ue: UeId, trp: TrpId, subband: usize) -> &CMatrix;
    /// Received amplitude per layer: `sqrt(per-PRB tx power * coupling gain)`.
    fn amplitude(&self, ue: UeId, trp: TrpId) -> f64;
}

/// Which TRPs are assumed to transmit while a UE measures CSI towards a TRP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterferenceHypothesis {
    /// TRPs outside the measuring UE's CoMP set interfere; in-set TRPs are
    /// silent.
    #[default]
    OutOfSet,
    /// Every TRP other than the measured one interferes.
    AllOthers,
}

/// Spatially white interference of a TRP whose precoder is unknown to the
/// UE: `n_tx` columns carrying `amp^2 / n_tx` each, i.e. the covariance of an
/// isotropically random unit-norm precoder.
fn isotropic_columns(h: &CMatrix, amplitude: f64) -> impl Iterator<Item = CVector> + '_ {
    let scale = amplitude / libm::sqrt(h.cols() as f64);
    (0..h.cols()).map(move |c| h.column(c).into_iter().map(|z| z * scale).collect())
}

/// CSI reports from `ue` towards each TRP of `comp_set`.
pub fn measure_csi<V: ChannelView + ?Sized>(
    ue: UeId,
    comp_set: &CompSet,
    channels: &V,
    noise_power: f64,
    hypothesis: InterferenceHypothesis,
    se_cap: f64,
    n_subbands: usize,
    tti: u64,
) -> Vec<CsiReport> {
    let n_rx = channels.n_rx(ue);
    let mut reports: Vec<CsiReport> = comp_set
        .trp_ids
        .iter()
        .map(|&trp| CsiReport {
            ue,
            trp,
            precoders: Vec::with_capacity(n_subbands),
            subband_se: Vec::with_capacity(n_subbands),
            spectral_efficiency: 0.0,
            measured_tti: tti,
        })
        .collect();
    let covariance_excluding = |sb: usize, excluded: &dyn Fn(TrpId) -> bool| {
        let mut r = CMatrix::identity(n_rx);
        for z in r.as_mut_slice() {
            *z *= noise_power;
        }
        for t in (0..channels.n_trps()).map(TrpId) {
            if excluded(t) {
                continue;
            }
            let h = channels.fading(ue, t, sb);
            for col in isotropic_columns(h, channels.amplitude(ue, t)) {
                add_outer(&mut r, &col, 1.0);
            }
        }
        r
    };
    for sb in 0..n_subbands {
        let shared = match hypothesis {
            InterferenceHypothesis::OutOfSet => {
                Some(IrcReceiver::from_covariance(&covariance_excluding(sb, &|t| comp_set.contains(t))))
            }
            InterferenceHypothesis::AllOthers => None,
        };
        for report in &mut reports {
            let trp = report.trp;
            let h = channels.fading(ue, trp, sb);
            let precoder = select_precoder(h);
            let desired = h.mul_vec_scaled(precoder.as_slice(), channels.amplitude(ue, trp));
            let sinr = match &shared {
                Some(rx) => rx.sinr(&desired),
                None => IrcReceiver::from_covariance(&covariance_excluding(sb, &|t| t == trp)).sinr(&desired),
            };
            report.subband_se.push(sinr_to_se(sinr, se_cap));
            report.precoders.push(precoder);
        }
    }
    for report in &mut reports {
        report.spectral_efficiency =
            if n_subbands == 0 { 0.0 } else { report.subband_se.iter().sum::<f64>() / n_subbands as f64 };
    }
    reports
}

/// Received-signal structure seen by one UE on one PRB.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    /// One column per desired layer: `amplitude * H * w`.
    pub desired_columns: Vec<CVector>,
    /// TRP carrying each desired layer, parallel to `desired_columns`.
    pub desired_trps: Vec<TrpId>,
    /// In-set layers for other users plus all out-of-set transmissions.
    pub interference_columns: Vec<CVector>,
    pub noise_power: f64,
}

impl EffectiveChannel {
    pub fn n_rx(&self) -> usize {
        self.desired_columns.first().map_or(0, Vec::len)
    }

    /// Per-layer MMSE-IRC SINR; the other desired layers count as
    /// interference for each layer.
    pub fn layer_sinrs(&self) -> Vec<f64> {
        let n_rx = self.n_rx();
        if self.desired_columns.len() == 1 {
            let rx = IrcReceiver::new(n_rx, &self.interference_columns, self.noise_power);
            return alloc::vec![rx.sinr(&self.desired_columns[0])];
        }
        (0..self.desired_columns.len())
            .map(|i| {
                let others = self
                    .desired_columns
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, c)| c)
                    .chain(&self.interference_columns);
                IrcReceiver::new(n_rx, others, self.noise_power).sinr(&self.desired_columns[i])
            })
            .collect()
    }
}

/// Builds the effective channel of `target` on one PRB of `subband`.
///
/// `row[t]` is the allocation of TRP `t` on this PRB. Returns `None` when no
/// TRP of `comp_set` serves `target` on the PRB.
pub fn compose_effective_channel<V: ChannelView + ?Sized>(
    comp_set: &CompSet,
    row: &[GridEntry],
    target: UeId,
    subband: usize,
    channels: &V,
    noise_power: f64,
) -> Option<EffectiveChannel> {
    let mut desired_columns = Vec::new();
    let mut desired_trps = Vec::new();
    let mut interference_columns = Vec::new();
    for (t, entry) in row.iter().enumerate() {
        let GridEntry::Serve { ue, precoder } = entry else {
            continue;
        };
        let trp = TrpId(t);
        let h = channels.fading(target, trp, subband);
        let column = h.mul_vec_scaled(precoder.as_slice(), channels.amplitude(target, trp));
        if *ue == target && comp_set.contains(trp) {
            desired_columns.push(column);
            desired_trps.push(trp);
        } else {
            interference_columns.push(column);
        }
    }
    if desired_columns.is_empty() {
        return None;
    }
    Some(EffectiveChannel { desired_columns, desired_trps, interference_columns, noise_power })
}
