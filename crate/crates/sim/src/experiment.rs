//! Seed batches, scheme sweeps and pooling.

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use ncjt_core::engine::NoObserver;
use ncjt_core::stats::collect_percentiles;
use ncjt_core::{run_with, Observer, RunOutput, Scheme, SimParams};
use rayon::prelude::*;
use thiserror::Error;

use crate::report::{self, ComparisonRow, SummaryRow};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{cell}, seed {seed}: {source}")]
    Run { cell: Cell, seed: u64, source: ncjt_core::Error },

    #[error("{cell}, seed {seed}: rerun differs from first run ({detail})")]
    Determinism { cell: Cell, seed: u64, detail: String },
}

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub scheme: Scheme,
    pub users_per_trp: usize,
    pub max_coord: usize,
}

impl Cell {
    pub fn of(p: &SimParams) -> Self {
        Self { scheme: p.scheme, users_per_trp: p.users_per_trp, max_coord: p.max_coord }
    }

    pub fn apply(&self, base: &SimParams) -> SimParams {
        SimParams { scheme: self.scheme, users_per_trp: self.users_per_trp, max_coord: self.max_coord, ..base.clone() }
    }

    /// File-name stem, e.g. `dps_u3_mc2`.
    pub fn tag(&self) -> String {
        format!("{}_u{}_mc{}", self.scheme, self.users_per_trp, self.max_coord)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} users/TRP={} max_coord={}", self.scheme, self.users_per_trp, self.max_coord)
    }
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub cell: Cell,
    /// One output per seed, in seed-list order.
    pub runs: Vec<RunOutput>,
}

impl CellResult {
    pub fn throughputs(&self) -> impl Iterator<Item = f64> + '_ {
        self.runs.iter().flat_map(|r| r.samples.iter().map(|s| s.throughput_bps()))
    }

    pub fn summary(&self) -> SummaryRow {
        let p = collect_percentiles(self.throughputs());
        SummaryRow {
            scheme: self.cell.scheme.name().into(),
            users_per_trp: self.cell.users_per_trp,
            max_coord: self.cell.max_coord,
            seed_count: self.runs.len(),
            samples: self.runs.iter().map(|r| r.samples.len()).sum(),
            unfinished: self.runs.iter().map(|r| r.unfinished_files).sum(),
            p5: p.map(|p| p.p5),
            p50: p.map(|p| p.p50),
            p95: p.map(|p| p.p95),
        }
    }
}

/// Runs every seed of `cell` in parallel, then reruns the first seed through
/// `probe` and checks that it reproduces the same samples.
pub fn run_cell<O: Observer + ?Sized>(
    base: &SimParams,
    cell: Cell,
    seeds: &[u64],
    probe: &mut O,
) -> Result<CellResult, ExperimentError> {
    let params = cell.apply(base);
    let runs = seeds
        .par_iter()
        .map(|&seed| {
            run_with(&params, seed, &mut NoObserver).map_err(|source| ExperimentError::Run { cell, seed, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(first) = runs.first() {
        let seed = first.seed;
        let again = run_with(&params, seed, probe).map_err(|source| ExperimentError::Run { cell, seed, source })?;
        if again != *first {
            let detail = format!(
                "{} vs {} samples, {} vs {} delivered bits",
                first.samples.len(),
                again.samples.len(),
                first.delivered_bits,
                again.delivered_bits
            );
            return Err(ExperimentError::Determinism { cell, seed, detail });
        }
    }
    Ok(CellResult { cell, runs })
}

/// Index of the first `max_coord` sweep cell in [`sweep_cells`].
pub const SWEEP_START: usize = 8;

/// The scheme grid at 3 and 5 users per TRP, then NF-NCJT over
/// `max_coord` 2, 3 and 4.
pub fn sweep_cells(base: &SimParams) -> Vec<Cell> {
    let mut cells = Vec::new();
    for users in [3, 5] {
        for scheme in Scheme::ALL {
            cells.push(Cell { scheme, users_per_trp: users, max_coord: 2 });
        }
    }
    for max_coord in [2, 3, 4] {
        cells.push(Cell { scheme: Scheme::Nfncjt, users_per_trp: base.users_per_trp, max_coord });
    }
    cells
}

fn delta_pct(value: Option<f64>, reference: Option<f64>) -> Option<f64> {
    let (v, r) = (value?, reference?);
    (r > 0.0).then(|| (v / r - 1.0) * 100.0)
}

/// Percentage deltas: scheme rows against `none` at the same load, the
/// `max_coord` sweep against `max_coord = 2`.
pub fn comparison(rows: &[SummaryRow], sweep_start: usize) -> Vec<ComparisonRow> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let reference = if i < sweep_start {
                rows[..sweep_start].iter().find(|r| r.scheme == "none" && r.users_per_trp == row.users_per_trp)
            } else {
                rows[sweep_start..].iter().find(|r| r.max_coord == 2)
            };
            let label = reference
                .map_or_else(|| "-".into(), |r| format!("{}_u{}_mc{}", r.scheme, r.users_per_trp, r.max_coord));
            let reference = reference.and_then(SummaryRow::percentiles);
            ComparisonRow {
                scheme: row.scheme.clone(),
                users_per_trp: row.users_per_trp,
                max_coord: row.max_coord,
                reference: label,
                d_p5_pct: delta_pct(row.p5, reference.map(|p| p.p5)),
                d_p50_pct: delta_pct(row.p50, reference.map(|p| p.p50)),
                d_p95_pct: delta_pct(row.p95, reference.map(|p| p.p95)),
            }
        })
        .collect()
}

/// Samples and CDF files of one cell.
pub fn write_cell(dir: &Path, result: &CellResult) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tag = result.cell.tag();
    let samples = dir.join(format!("samples_{tag}.csv"));
    report::write_samples(BufWriter::new(File::create(&samples)?), &result.runs)
        .with_context(|| format!("writing {}", samples.display()))?;
    let cdf = dir.join(format!("cdf_{tag}.csv"));
    report::write_cdf(BufWriter::new(File::create(&cdf)?), result.throughputs())
        .with_context(|| format!("writing {}", cdf.display()))?;
    Ok(())
}
