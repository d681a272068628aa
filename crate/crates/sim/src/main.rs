use std::fs;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use ncjt_core::engine::NoObserver;
use ncjt_core::World;
use ncjt_sim::report::{self, DumpObserver, SummaryRow};
use ncjt_sim::{comparison, run_cell, sweep_cells, Cell, Overrides, RunConfig};

/// Downlink multi-TRP coordination simulator.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// TOML configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// none, dps, fncjt or nfncjt.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    users_per_trp: Option<usize>,
    #[arg(long)]
    max_coord: Option<usize>,
    /// Comma-separated seed list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    ttis: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Run a predefined sweep instead of a single configuration.
    #[arg(long, value_parser = ["paper"])]
    suite: Option<String>,
    /// Write grids.csv and sinr.csv for the first seed.
    #[arg(long)]
    dump_grids: bool,
    /// Write links.csv for the first seed.
    #[arg(long)]
    dump_links: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = RunConfig::load(cli.config.as_deref())?;
    config.apply(&Overrides {
        scheme: cli.scheme.clone(),
        users_per_trp: cli.users_per_trp,
        max_coord: cli.max_coord,
        seeds: cli.seeds.clone(),
        ttis: cli.ttis,
    });
    let params = config.to_params()?;
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    fs::write(cli.out.join("config.resolved.toml"), config.to_toml())?;

    let cells = match cli.suite.as_deref() {
        Some(_) => sweep_cells(&params),
        None => vec![Cell::of(&params)],
    };
    // Layout and attachment of the first seed, for plotting.
    let world = World::new(cells[0].apply(&params), config.seeds[0])?;
    report::write_layout(&cli.out.join("layout.csv"), world.trps())?;
    report::write_users(&cli.out.join("users.csv"), world.ues(), world.comp_sets())?;
    drop(world);

    let mut rows: Vec<SummaryRow> = Vec::with_capacity(cells.len());
    let mut done: Vec<(Cell, SummaryRow)> = Vec::new();
    for (i, &cell) in cells.iter().enumerate() {
        if let Some((_, row)) = done.iter().find(|(c, _)| *c == cell) {
            rows.push(row.clone());
            continue;
        }
        let started = std::time::Instant::now();
        let result = if i == 0 && (cli.dump_grids || cli.dump_links) {
            let mut dump = DumpObserver::new(&cli.out, cli.dump_grids, cli.dump_links)?;
            let r = run_cell(&params, cell, &config.seeds, &mut dump)?;
            dump.finish()?;
            r
        } else {
            run_cell(&params, cell, &config.seeds, &mut NoObserver)?
        };
        ncjt_sim::experiment::write_cell(&cli.out, &result)?;
        let row = result.summary();
        eprintln!("{cell}: {} samples in {:.1?}", row.samples, started.elapsed());
        done.push((cell, row.clone()));
        rows.push(row);
    }

    let summary = cli.out.join("summary.csv");
    report::write_rows(BufWriter::new(fs::File::create(&summary)?), &rows)?;
    if cli.suite.is_some() {
        let table = comparison(&rows, ncjt_sim::experiment::SWEEP_START);
        report::write_rows(BufWriter::new(fs::File::create(cli.out.join("comparison.csv"))?), &table)?;
        report::write_rows(io::stdout().lock(), &table)?;
    } else {
        report::write_rows(io::stdout().lock(), &rows)?;
    }
    Ok(())
}
