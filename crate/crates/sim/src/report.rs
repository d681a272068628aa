//! CSV outputs. All files are UTF-8 with a header row.
//!
//! | file | columns |
//! |------|---------|
//! | `samples_<cell>.csv` | `seed, ue_id, file_bits, duration_s, throughput_bps` |
//! | `cdf_<cell>.csv` | `throughput_bps, probability` |
//! | `summary.csv` | `scheme, users_per_trp, max_coord, seed_count, samples, unfinished, p5, p50, p95` |
//! | `comparison.csv` | `scheme, users_per_trp, max_coord, reference, d_p5_pct, d_p50_pct, d_p95_pct` |
//! | `layout.csv` | `trp_id, x, y, z` |
//! | `users.csv` | `ue_id, x, y, z, serving_trp, comp_set` |
//! | `grids.csv` | `tti, prb, trp_id, state, ue_id` |
//! | `sinr.csv` | `tti, prb, ue_id, layer, sinr_db` |
//! | `links.csv` | `tti, ue_id, trp_id, subband, rx_power_dbm` |

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use csv::Writer;
use ncjt_core::engine::{Channels, GridEvent};
use ncjt_core::phy::ChannelView;
use ncjt_core::scheduler::GridEntry;
use ncjt_core::stats::{empirical_cdf, Percentiles};
use ncjt_core::topology::{CompSet, Trp, Ue, UeId};
use ncjt_core::{Observer, RunOutput};
use serde::Serialize;

pub type CsvOut = Writer<BufWriter<File>>;

pub fn create(path: &Path) -> Result<CsvOut> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(Writer::from_writer(BufWriter::new(file)))
}

#[derive(Serialize)]
struct SampleRow {
    seed: u64,
    ue_id: usize,
    file_bits: f64,
    duration_s: f64,
    throughput_bps: f64,
}

/// Samples of every run, seed by seed.
pub fn write_samples<W: Write>(out: W, runs: &[RunOutput]) -> Result<()> {
    let mut w = Writer::from_writer(out);
    for run in runs {
        for s in &run.samples {
            w.serialize(SampleRow {
                seed: run.seed,
                ue_id: s.ue.0,
                file_bits: s.file_bits,
                duration_s: s.duration_s,
                throughput_bps: s.throughput_bps(),
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CdfRow {
    throughput_bps: f64,
    probability: f64,
}

pub fn write_cdf<W: Write>(out: W, throughputs: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut w = Writer::from_writer(out);
    for (throughput_bps, probability) in empirical_cdf(throughputs) {
        w.serialize(CdfRow { throughput_bps, probability })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scheme: String,
    pub users_per_trp: usize,
    pub max_coord: usize,
    pub seed_count: usize,
    pub samples: usize,
    pub unfinished: usize,
    pub p5: Option<f64>,
    pub p50: Option<f64>,
    pub p95: Option<f64>,
}

impl SummaryRow {
    pub fn percentiles(&self) -> Option<Percentiles> {
        Some(Percentiles { p5: self.p5?, p50: self.p50?, p95: self.p95? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub scheme: String,
    pub users_per_trp: usize,
    pub max_coord: usize,
    pub reference: String,
    pub d_p5_pct: Option<f64>,
    pub d_p50_pct: Option<f64>,
    pub d_p95_pct: Option<f64>,
}

pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_layout(path: &Path, trps: &[Trp]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["trp_id", "x", "y", "z"])?;
    for t in trps {
        let p = t.position;
        w.serialize((t.id.0, p.x, p.y, p.z))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_users(path: &Path, ues: &[Ue], sets: &[CompSet]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["ue_id", "x", "y", "z", "serving_trp", "comp_set"])?;
    for u in ues {
        let set = sets.iter().find(|s| s.contains(u.serving_trp)).map(|s| s.id);
        let p = u.position;
        w.serialize((u.id.0, p.x, p.y, p.z, u.serving_trp.0, set))?;
    }
    w.flush()?;
    Ok(())
}

/// Streams grids, per-layer SINRs and link gains of one run to CSV.
pub struct DumpObserver {
    grids: Option<(CsvOut, CsvOut)>,
    links: Option<CsvOut>,
    error: Option<anyhow::Error>,
}

impl DumpObserver {
    pub fn new(dir: &Path, grids: bool, links: bool) -> Result<Self> {
        let grids = if grids {
            let mut g = create(&dir.join("grids.csv"))?;
            g.write_record(["tti", "prb", "trp_id", "state", "ue_id"])?;
            let mut s = create(&dir.join("sinr.csv"))?;
            s.write_record(["tti", "prb", "ue_id", "layer", "sinr_db"])?;
            Some((g, s))
        } else {
            None
        };
        let links = if links {
            let mut l = create(&dir.join("links.csv"))?;
            l.write_record(["tti", "ue_id", "trp_id", "subband", "rx_power_dbm"])?;
            Some(l)
        } else {
            None
        };
        Ok(Self { grids, links, error: None })
    }

    fn keep(&mut self, r: csv::Result<()>) {
        if let (Err(e), None) = (r, &self.error) {
            self.error = Some(e.into());
        }
    }

    pub fn finish(mut self) -> Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        if let Some((mut g, mut s)) = self.grids.take() {
            g.flush()?;
            s.flush()?;
        }
        if let Some(mut l) = self.links.take() {
            l.flush()?;
        }
        Ok(())
    }
}

impl Observer for DumpObserver {
    fn on_grid(&mut self, ev: &GridEvent<'_>) {
        let Some((g, _)) = self.grids.as_mut() else { return };
        let mut res = Ok(());
        'outer: for prb in 0..ev.grid.n_prb() {
            for (trp, entry) in ev.grid.prb_row(prb).iter().enumerate() {
                let (state, ue) = match entry {
                    GridEntry::Idle => ("idle", None),
                    GridEntry::Blank => ("blank", None),
                    GridEntry::Serve { ue, .. } => ("serve", Some(ue.0)),
                };
                res = g.serialize((ev.tti, prb, trp, state, ue));
                if res.is_err() {
                    break 'outer;
                }
            }
        }
        self.keep(res);
    }

    fn on_links(&mut self, tti: u64, channels: &Channels) {
        let Some(l) = self.links.as_mut() else { return };
        let mut res = Ok(());
        'outer: for link in channels.links() {
            let amp2 = channels.amplitude(link.ue, link.trp).powi(2);
            for (sb, h) in link.fading.iter().enumerate() {
                let mean = h.frobenius_norm_sqr() / (h.rows() * h.cols()) as f64;
                let rx_power_dbm = 10.0 * (mean * amp2).log10() + 30.0;
                res = l.serialize((tti, link.ue.0, link.trp.0, sb, rx_power_dbm));
                if res.is_err() {
                    break 'outer;
                }
            }
        }
        self.keep(res);
    }

    fn on_layer_sinr(&mut self, tti: u64, prb: usize, ue: UeId, sinrs: &[f64]) {
        let Some((_, s)) = self.grids.as_mut() else { return };
        let mut res = Ok(());
        for (layer, &sinr) in sinrs.iter().enumerate() {
            res = s.serialize((tti, prb, ue.0, layer, 10.0 * sinr.log10()));
            if res.is_err() {
                break;
            }
        }
        self.keep(res);
    }
}
