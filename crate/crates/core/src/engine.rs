//! The TTI loop: traffic, channel evolution, delayed CSI, scheduling,
//! per-PRB SINR evaluation, delivery and throughput bookkeeping.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::channel::{db_to_linear, dbm_to_watts, perturb, LargeScale, LinkState};
use crate::error::Result;
use crate::linalg::CMatrix;
use crate::params::SimParams;
use crate::phy::{compose_effective_channel, measure_csi, sinr_to_se, ChannelView};
use crate::scheduler::{
    schedule_baseline, schedule_dps, schedule_fncjt, schedule_nfncjt, CsiTable, GridEntry, PfState, PrbMap,
    ScheduleGrid, Scheme,
};
use crate::topology::{
    build_indoor_layout, drop_users, form_comp_sets, singleton_sets, users_of, CompSet, Trp, TrpId, Ue, UeId,
};

/// One FTP file download.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficFile {
    pub ue: UeId,
    pub size_bits: f64,
    pub arrival_tti: u64,
    pub remaining_bits: f64,
    pub completion_tti: Option<u64>,
}

impl TrafficFile {
    pub fn new(ue: UeId, size_bits: f64, arrival_tti: u64) -> Self {
        Self { ue, size_bits, arrival_tti, remaining_bits: size_bits, completion_tti: None }
    }
}

/// A completed file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputSample {
    pub ue: UeId,
    pub file_bits: f64,
    pub arrival_tti: u64,
    pub completion_tti: u64,
    pub duration_s: f64,
}

impl ThroughputSample {
    pub fn throughput_bps(&self) -> f64 {
        self.file_bits / self.duration_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimClock {
    pub tti: u64,
    pub tti_s: f64,
    pub n_prb: usize,
}

/// Poisson file arrivals for one TTI at `rate_per_s` over the whole network,
/// each file assigned to a uniformly chosen UE.
pub fn spawn_arrivals<R: Rng + ?Sized>(
    rng: &mut R,
    tti: u64,
    n_ues: usize,
    rate_per_s: f64,
    tti_s: f64,
    file_bits: f64,
) -> Vec<TrafficFile> {
    let mean = rate_per_s * tti_s;
    if !(mean > 0.0) || n_ues == 0 {
        return Vec::new();
    }
    let count: f64 = Poisson::new(mean).expect("positive finite mean").sample(rng);
    (0..count as usize).map(|_| TrafficFile::new(UeId(rng.random_range(0..n_ues)), file_bits, tti)).collect()
}

/// Link table of a deployment, with per-link received amplitude cached.
#[derive(Debug, Clone)]
pub struct Channels {
    n_trps: usize,
    n_rx: usize,
    n_tx: Vec<usize>,
    links: Vec<LinkState>,
    amplitude: Vec<f64>,
}

impl Channels {
    /// `links` must be ordered UE-major: `links[ue * n_trps + trp]`.
    pub fn new(trps: &[Trp], n_rx: usize, links: Vec<LinkState>, n_prb: usize, ue_gain_dbi: f64) -> Self {
        let n_trps = trps.len();
        let amplitude = links
            .iter()
            .map(|l| {
                let trp = &trps[l.trp.0];
                let prb_power = dbm_to_watts(trp.tx_power_dbm) / n_prb as f64;
                libm::sqrt(prb_power * db_to_linear(l.coupling_gain_db(trp, ue_gain_dbi)))
            })
            .collect();
        Self { n_trps, n_rx, n_tx: trps.iter().map(|t| t.n_tx).collect(), links, amplitude }
    }

    pub fn link(&self, ue: UeId, trp: TrpId) -> &LinkState {
        &self.links[ue.0 * self.n_trps + trp.0]
    }

    pub fn links(&self) -> &[LinkState] {
        &self.links
    }

    fn evolve<R: Rng + ?Sized>(&mut self, rho: f64, rng: &mut R) {
        for link in &mut self.links {
            link.evolve_fading(rho, rng);
        }
    }

    fn with_error<R: Rng + ?Sized>(&self, sigma: f64, rng: &mut R) -> Self {
        let mut noisy = self.clone();
        for link in &mut noisy.links {
            let perturbed: Vec<CMatrix> = link.fading.iter().map(|h| perturb(h, sigma, rng)).collect();
            link.fading = perturbed;
        }
        noisy
    }
}

impl ChannelView for Channels {
    fn n_trps(&self) -> usize {
        self.n_trps
    }

    fn n_rx(&self, _ue: UeId) -> usize {
        self.n_rx
    }

    fn n_tx(&self, trp: TrpId) -> usize {
        self.n_tx[trp.0]
    }

    fn fading(&self, ue: UeId, trp: TrpId, subband: usize) -> &CMatrix {
        &self.link(ue, trp).fading[subband]
    }

    fn amplitude(&self, ue: UeId, trp: TrpId) -> f64 {
        self.amplitude[ue.0 * self.n_trps + trp.0]
    }
}

/// What the schedulers produced in one TTI.
pub struct GridEvent<'a> {
    pub tti: u64,
    /// Measurement TTI of the CSI the schedulers consumed, if any.
    pub csi_measured_tti: Option<u64>,
    pub comp_sets: &'a [CompSet],
    pub ues: &'a [Ue],
    pub active: &'a [bool],
    pub grid: &'a ScheduleGrid,
}

/// Debug hooks; all default to no-ops.
pub trait Observer {
    fn on_grid(&mut self, _event: &GridEvent<'_>) {}
    fn on_links(&mut self, _tti: u64, _channels: &Channels) {}
    fn on_layer_sinr(&mut self, _tti: u64, _prb: usize, _ue: UeId, _sinrs: &[f64]) {}
}

pub struct NoObserver;

impl Observer for NoObserver {}

/// Result of a single seeded run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub seed: u64,
    pub samples: Vec<ThroughputSample>,
    /// Post-warm-up files still in flight when the run ended.
    pub unfinished_files: usize,
    pub delivered_bits: f64,
}

const STREAM_DROP: u64 = 0;
const STREAM_FADING: u64 = 1;
const STREAM_TRAFFIC: u64 = 2;
const STREAM_CSI_ERROR: u64 = 3;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Per-layer delivery of one UE on one PRB.
#[derive(Debug, Clone)]
struct PrbDelivery {
    ue: UeId,
    sinrs: Vec<f64>,
    layer_bits: Vec<(TrpId, f64)>,
}

/// Complete simulation state of one run.
pub struct World {
    params: SimParams,
    trps: Vec<Trp>,
    ues: Vec<Ue>,
    comp_sets: Vec<CompSet>,
    set_of_trp: Vec<usize>,
    own_users: Vec<Vec<UeId>>,
    channels: Channels,
    noise_power: f64,
    prbs: PrbMap,
    csi_pipeline: VecDeque<CsiTable>,
    pf_global: PfState,
    pf_local: Vec<PfState>,
    queues: Vec<VecDeque<TrafficFile>>,
    samples: Vec<ThroughputSample>,
    delivered_bits: f64,
    tti: u64,
    seed: u64,
    fading_rng: ChaCha8Rng,
    traffic_rng: ChaCha8Rng,
    csi_rng: ChaCha8Rng,
}

impl World {
    /// Builds the indoor layout, drops users and draws every link.
    pub fn new(params: SimParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let trps = build_indoor_layout(&params.layout)?;
        let mut drop_rng = stream(seed, STREAM_DROP);
        let fc = params.carrier_ghz;
        let ue_gain = params.ue_antenna_gain_dbi;
        let (ues, large) =
            drop_users(&trps, &params.layout, params.n_rx, params.users_per_trp, &mut drop_rng, |pos, rng| {
                let ls: Vec<LargeScale> = trps.iter().map(|t| LargeScale::draw(pos, t, fc, rng)).collect();
                let gains =
                    ls.iter().zip(&trps).map(|(l, t)| l.coupling_gain_db(t.antenna_gain_dbi, ue_gain)).collect();
                (gains, ls)
            })?;
        let mut fading_rng = stream(seed, STREAM_FADING);
        let links = ues
            .iter()
            .zip(large)
            .flat_map(|(ue, ls)| ls.into_iter().enumerate().map(move |(t, l)| (ue.id, TrpId(t), l)))
            .map(|(ue, trp, l)| {
                LinkState::new(ue, trp, l, params.n_rx, trps[trp.0].n_tx, params.n_subbands, &mut fading_rng)
            })
            .collect();
        Ok(Self::assemble(params, trps, ues, links, seed, fading_rng))
    }

    /// Builds a world from an explicit deployment. `links` are UE-major and
    /// every UE's `serving_trp` is taken as given.
    pub fn from_parts(
        params: SimParams,
        trps: Vec<Trp>,
        ues: Vec<Ue>,
        links: Vec<LinkState>,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        assert_eq!(links.len(), trps.len() * ues.len(), "one link per UE-TRP pair");
        let fading_rng = stream(seed, STREAM_FADING);
        Ok(Self::assemble(params, trps, ues, links, seed, fading_rng))
    }

    fn assemble(
        params: SimParams,
        trps: Vec<Trp>,
        ues: Vec<Ue>,
        links: Vec<LinkState>,
        seed: u64,
        fading_rng: ChaCha8Rng,
    ) -> Self {
        let comp_sets = match params.scheme {
            Scheme::None => singleton_sets(&trps, &ues),
            _ => form_comp_sets(&trps, &ues, params.max_coord),
        };
        let mut set_of_trp = vec![0; trps.len()];
        for s in &comp_sets {
            for t in &s.trp_ids {
                set_of_trp[t.0] = s.id;
            }
        }
        let own_users = trps.iter().map(|t| users_of(&[t.id], &ues)).collect();
        let channels = Channels::new(&trps, params.n_rx, links, params.n_prb, params.ue_antenna_gain_dbi);
        let n_ues = ues.len();
        let pf = || PfState::new(n_ues, params.pf_horizon_ttis, params.pf_floor_bps);
        Self {
            noise_power: params.noise.prb_noise_watts(),
            prbs: PrbMap { n_prb: params.n_prb, n_subbands: params.n_subbands },
            csi_pipeline: VecDeque::with_capacity(params.feedback_delay as usize + 1),
            pf_global: pf(),
            pf_local: (0..trps.len()).map(|_| pf()).collect(),
            queues: vec![VecDeque::new(); n_ues],
            samples: Vec::new(),
            delivered_bits: 0.0,
            tti: 0,
            traffic_rng: stream(seed, STREAM_TRAFFIC),
            csi_rng: stream(seed, STREAM_CSI_ERROR),
            fading_rng,
            seed,
            params,
            trps,
            ues,
            comp_sets,
            set_of_trp,
            own_users,
            channels,
        }
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn clock(&self) -> SimClock {
        SimClock { tti: self.tti, tti_s: self.params.tti_s, n_prb: self.params.n_prb }
    }

    pub fn trps(&self) -> &[Trp] {
        &self.trps
    }

    pub fn ues(&self) -> &[Ue] {
        &self.ues
    }

    pub fn comp_sets(&self) -> &[CompSet] {
        &self.comp_sets
    }

    pub fn channels(&self) -> &Channels {
        &self.channels
    }

    pub fn samples(&self) -> &[ThroughputSample] {
        &self.samples
    }

    pub fn queue(&self, ue: UeId) -> &VecDeque<TrafficFile> {
        &self.queues[ue.0]
    }

    pub fn pf_global(&self) -> &PfState {
        &self.pf_global
    }

    pub fn pf_local(&self, trp: TrpId) -> &PfState {
        &self.pf_local[trp.0]
    }

    /// Queues a file for `ue` arriving now.
    pub fn push_file(&mut self, ue: UeId, size_bits: f64) {
        self.queues[ue.0].push_back(TrafficFile::new(ue, size_bits, self.tti));
    }

    pub fn step(&mut self) {
        self.step_with(&mut NoObserver);
    }

    pub fn step_with<O: Observer + ?Sized>(&mut self, obs: &mut O) {
        let tti = self.tti;
        let p = &self.params;

        let arrivals = spawn_arrivals(
            &mut self.traffic_rng,
            tti,
            self.ues.len(),
            p.network_arrival_rate(),
            p.tti_s,
            p.traffic.file_bits,
        );
        for f in arrivals {
            self.queues[f.ue.0].push_back(f);
        }

        self.channels.evolve(p.fading_rho, &mut self.fading_rng);
        obs.on_links(tti, &self.channels);

        let table = self.measure_all(tti);
        self.csi_pipeline.push_back(table);
        let due = self.csi_pipeline.front().is_some_and(|t| t.measured_tti + self.params.feedback_delay <= tti);
        let csi = if due { self.csi_pipeline.pop_front() } else { None };

        let active: Vec<bool> = self.queues.iter().map(|q| !q.is_empty()).collect();
        let mut grid = ScheduleGrid::new(self.trps.len(), self.params.n_prb);
        if let Some(csi) = &csi {
            self.schedule(csi, &active, &mut grid);
        }
        obs.on_grid(&GridEvent {
            tti,
            csi_measured_tti: csi.as_ref().map(|c| c.measured_tti),
            comp_sets: &self.comp_sets,
            ues: &self.ues,
            active: &active,
            grid: &grid,
        });

        let delivered = self.transmit(&grid, obs);
        self.deliver(delivered);
        self.tti += 1;
    }

    fn measure_all(&mut self, tti: u64) -> CsiTable {
        let p = &self.params;
        let mut table = CsiTable::new(tti, self.ues.len(), self.trps.len());
        let noisy;
        let view: &Channels = if p.csi_error_std > 0.0 {
            noisy = self.channels.with_error(p.csi_error_std, &mut self.csi_rng);
            &noisy
        } else {
            &self.channels
        };
        for ue in &self.ues {
            let set = &self.comp_sets[self.set_of_trp[ue.serving_trp.0]];
            for r in measure_csi(ue.id, set, view, self.noise_power, p.hypothesis, p.se_cap, p.n_subbands, tti) {
                table.insert(r);
            }
        }
        table
    }

    fn schedule(&self, csi: &CsiTable, active: &[bool], grid: &mut ScheduleGrid) {
        let prbs = self.prbs;
        match self.params.scheme {
            Scheme::Dps => {
                for set in &self.comp_sets {
                    schedule_dps(&csi.set_view(set), &self.pf_global, active, prbs, grid);
                }
            }
            Scheme::Fncjt => {
                for set in &self.comp_sets {
                    schedule_fncjt(&csi.set_view(set), &self.pf_global, active, prbs, grid);
                }
            }
            Scheme::Nfncjt => {
                for trp in &self.trps {
                    let set = &self.comp_sets[self.set_of_trp[trp.id.0]];
                    let row =
                        schedule_nfncjt(&csi.local(trp.id), &set.user_vector, &self.pf_local[trp.id.0], active, prbs);
                    grid.set_trp_row(trp.id, row);
                }
            }
            Scheme::None => {
                for trp in &self.trps {
                    let row = schedule_baseline(
                        &csi.local(trp.id),
                        &self.own_users[trp.id.0],
                        &self.pf_local[trp.id.0],
                        active,
                        prbs,
                    );
                    grid.set_trp_row(trp.id, row);
                }
            }
        }
    }

    /// Bits each TRP delivers to each UE this TTI (before file caps),
    /// UE-major.
    fn transmit<O: Observer + ?Sized>(&self, grid: &ScheduleGrid, obs: &mut O) -> Vec<f64> {
        let n_trps = self.trps.len();
        let bits_per_se = self.params.noise.prb_bandwidth_hz * self.params.tti_s;
        let mut out = vec![0.0; self.ues.len() * n_trps];
        let mut cache: Vec<PrbDelivery> = Vec::new();
        let mut cache_key: Option<(usize, Vec<Option<UeId>>)> = None;
        for prb in 0..grid.n_prb() {
            let row = grid.prb_row(prb);
            let sb = self.prbs.subband(prb);
            let key: Vec<Option<UeId>> = row.iter().map(GridEntry::ue).collect();
            // Within a subband, equal user ids imply equal precoders.
            let hit = cache_key.as_ref().is_some_and(|(s, k)| *s == sb && *k == key);
            if !hit {
                cache.clear();
                let mut served: Vec<UeId> = key.iter().flatten().copied().collect();
                served.sort_unstable();
                served.dedup();
                for ue in served {
                    let set = &self.comp_sets[self.set_of_trp[self.ues[ue.0].serving_trp.0]];
                    let eff = compose_effective_channel(set, row, ue, sb, &self.channels, self.noise_power)
                        .expect("a served UE has at least one desired layer from its own CoMP set");
                    let sinrs = eff.layer_sinrs();
                    let layer_bits = eff
                        .desired_trps
                        .iter()
                        .zip(&sinrs)
                        .map(|(&t, &s)| (t, sinr_to_se(s, self.params.se_cap) * bits_per_se))
                        .collect();
                    cache.push(PrbDelivery { ue, sinrs, layer_bits });
                }
                cache_key = Some((sb, key));
            }
            for d in &cache {
                obs.on_layer_sinr(self.tti, prb, d.ue, &d.sinrs);
                for &(t, bits) in &d.layer_bits {
                    out[d.ue.0 * n_trps + t.0] += bits;
                }
            }
        }
        out
    }

    fn deliver(&mut self, delivered: Vec<f64>) {
        let n_trps = self.trps.len();
        let tti_s = self.params.tti_s;
        let mut served_total = vec![0.0; self.ues.len()];
        let mut served_local = vec![vec![0.0; self.ues.len()]; n_trps];
        for (u, per_trp) in delivered.chunks_exact(n_trps).enumerate() {
            let total: f64 = per_trp.iter().sum();
            if total <= 0.0 {
                continue;
            }
            let Some(file) = self.queues[u].front_mut() else {
                continue;
            };
            let served = if total >= file.remaining_bits {
                let s = file.remaining_bits;
                file.remaining_bits = 0.0;
                file.completion_tti = Some(self.tti);
                s
            } else {
                file.remaining_bits -= total;
                total
            };
            let scale = served / total;
            for (t, &b) in per_trp.iter().enumerate() {
                served_local[t][u] = b * scale;
            }
            served_total[u] = served;
            self.delivered_bits += served;
            if file.completion_tti.is_some() {
                let f = self.queues[u].pop_front().expect("front exists");
                if f.arrival_tti >= self.params.warmup_ttis {
                    let completion = self.tti;
                    self.samples.push(ThroughputSample {
                        ue: f.ue,
                        file_bits: f.size_bits,
                        arrival_tti: f.arrival_tti,
                        completion_tti: completion,
                        duration_s: (completion - f.arrival_tti + 1) as f64 * tti_s,
                    });
                }
            }
        }
        self.pf_global.update_all(&served_total, tti_s);
        for (pf, bits) in self.pf_local.iter_mut().zip(&served_local) {
            pf.update_all(bits, tti_s);
        }
    }

    pub fn into_output(self) -> RunOutput {
        let warmup = self.params.warmup_ttis;
        let unfinished_files = self.queues.iter().flatten().filter(|f| f.arrival_tti >= warmup).count();
        RunOutput { seed: self.seed, samples: self.samples, unfinished_files, delivered_bits: self.delivered_bits }
    }
}

/// Runs `params.ttis` TTIs for one seed.
pub fn run(params: &SimParams, seed: u64) -> Result<RunOutput> {
    run_with(params, seed, &mut NoObserver)
}

pub fn run_with<O: Observer + ?Sized>(params: &SimParams, seed: u64, obs: &mut O) -> Result<RunOutput> {
    let mut world = World::new(params.clone(), seed)?;
    for _ in 0..params.ttis {
        world.step_with(obs);
    }
    Ok(world.into_output())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{LayoutConfig, Position};

    #[test]
    fn arrivals_poisson_count() {
        // Monte-Carlo: 10 s at 10 files/s, count within 3 sigma of 100.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n: usize = (0..10_000).map(|t| spawn_arrivals(&mut rng, t, 24, 10.0, 1e-3, 8.0).len()).sum();
        assert!((70..=130).contains(&n), "{n}");
        let mut total = 0usize;
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            total += (0..10_000).map(|t| spawn_arrivals(&mut rng, t, 24, 10.0, 1e-3, 8.0).len()).sum::<usize>();
        }
        let mean = total as f64 / 200.0;
        assert!((mean - 100.0).abs() < 3.0 * 10.0 / (200f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn arrivals_zero_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!((0..1000).all(|t| spawn_arrivals(&mut rng, t, 24, 0.0, 1e-3, 8.0).is_empty()));
    }

    #[test]
    fn arrivals_reproducible() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(12);
            (0..5000).flat_map(|t| spawn_arrivals(&mut rng, t, 24, 10.0, 1e-3, 8.0)).collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    fn single_link_world(frozen: bool) -> World {
        let params = SimParams {
            scheme: Scheme::None,
            users_per_trp: 1,
            max_coord: 1,
            layout: LayoutConfig { trp_count: 1, ..LayoutConfig::default() },
            fading_rho: if frozen { 1.0 } else { 0.99 },
            traffic: crate::params::TrafficParams { arrival_rate: 0.0, ..Default::default() },
            warmup_ttis: 0,
            ..SimParams::default()
        };
        let trps = build_indoor_layout(&params.layout).unwrap();
        let ue = Ue { id: UeId(0), position: Position::new(70.0, 25.0, 1.5), n_rx: 4, serving_trp: TrpId(0) };
        let ls = LargeScale { is_los: false, pathloss_db: 120.0, shadowing_db: 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let link = LinkState::new(UeId(0), TrpId(0), ls, 4, 2, params.n_subbands, &mut rng);
        World::from_parts(params, trps, vec![ue], vec![link], 1).unwrap()
    }

    #[test]
    fn idle_network_decays_pf() {
        let mut w = single_link_world(false);
        for _ in 0..50 {
            w.step();
        }
        assert!(w.samples().is_empty());
        assert_eq!(w.pf_local(TrpId(0)).average(UeId(0)), 1.0);
        assert_eq!(w.into_output().delivered_bits, 0.0);
    }

    #[test]
    fn frozen_channel_completion_time() {
        // Closed form: constant per-TTI rate r from the fixed SE, so a file of
        // size S arriving at tti 0 completes at tti delay + ceil(S / r) - 1.
        let mut w = single_link_world(true);
        let delay = w.params().feedback_delay;
        let se_cap = w.params().se_cap;
        let noise = w.params().noise.prb_noise_watts();
        let prbs = w.prbs;
        let per_tti: f64 = (0..w.params().n_prb)
            .map(|p| {
                let sb = prbs.subband(p);
                let h = w.channels().fading(UeId(0), TrpId(0), sb);
                let pre = crate::phy::select_precoder(h);
                let d = h.mul_vec_scaled(pre.as_slice(), w.channels().amplitude(UeId(0), TrpId(0)));
                sinr_to_se(crate::linalg::norm_sqr(&d) / noise, se_cap) * 180.0
            })
            .sum();
        let size = 1.0e6;
        w.push_file(UeId(0), size);
        let expected_ttis = (size / per_tti).ceil() as u64;
        for _ in 0..(delay + expected_ttis + 5) {
            w.step();
        }
        let s = w.samples()[0];
        assert_eq!(s.completion_tti, delay + expected_ttis - 1);
        assert!((s.duration_s - (delay + expected_ttis) as f64 * 1e-3).abs() < 1e-12);
    }

    struct DelayProbe {
        delay: u64,
        seen: Vec<(u64, Option<u64>)>,
    }

    impl Observer for DelayProbe {
        fn on_grid(&mut self, e: &GridEvent<'_>) {
            if let Some(m) = e.csi_measured_tti {
                assert!(e.tti >= m + self.delay);
            }
            self.seen.push((e.tti, e.csi_measured_tti));
        }
    }

    #[test]
    fn scheduler_consumes_report_from_delay_ago() {
        let mut w = single_link_world(false);
        let mut probe = DelayProbe { delay: 5, seen: Vec::new() };
        for _ in 0..10 {
            w.step_with(&mut probe);
        }
        assert_eq!(probe.seen[4], (4, None));
        assert_eq!(probe.seen[7], (7, Some(2)));
    }

    #[test]
    fn file_conservation() {
        let mut w = single_link_world(false);
        let sizes = [3.0e5, 1.0e5 + 0.5, 7.77e5];
        for s in sizes {
            w.push_file(UeId(0), s);
        }
        let mut delivered_before = 0.0;
        for _ in 0..2000 {
            w.step();
            let q = w.queue(UeId(0));
            for f in q {
                assert!(f.remaining_bits >= 0.0 && f.remaining_bits <= f.size_bits);
            }
            delivered_before = w.delivered_bits;
        }
        let out = w.into_output();
        assert_eq!(out.samples.len(), 3);
        assert!((delivered_before - sizes.iter().sum::<f64>()).abs() < 1e-6);
        for (s, size) in out.samples.iter().zip(sizes) {
            assert_eq!(s.file_bits, size);
            assert!(s.duration_s > 0.0 && s.throughput_bps().is_finite());
        }
    }
}
