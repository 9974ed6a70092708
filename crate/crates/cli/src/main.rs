//! `pairpump`: spectra, scenario runs, adiabatic sweeps and density
//! snapshots from one configuration file.
//!
//! Every subcommand writes its CSVs and a `manifest.json` into the output
//! directory. On failure a one-line JSON object
//! `{"error": {"category": ..., "message": ...}}` goes to stderr and the exit
//! code identifies the category: 2 config, 3 I/O, 4 numerical, 5 input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use pairpump::config::{parse_document, Config};
use pairpump::error::{Error, Result};
use pairpump::exec::Workers;
use pairpump::experiment::{
    adiabatic_sweep, boundary_monitor, run_scenario, ScenarioConfig, TimeSeries,
};
use pairpump::grid::SpatialGrid;
use pairpump::output::{
    write_boundary, write_branches, write_density, write_diving, write_spectrum, write_sweep,
    write_timeseries, RunManifest,
};
use pairpump::spectrum::{diving_points, scan, SpectrumBasis};
use pairpump::units::{C2, LAMBDA_C};

#[derive(Parser)]
#[command(
    name = "pairpump",
    version,
    about = "Electron-positron pair creation in an oscillating 1D well"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Static spectrum scan and diving points.
    Spectrum(Common),
    /// Evolve all retained negative modes and record the time series.
    Evolve(Common),
    /// One-cycle runs over a range of upper bounds.
    Sweep(Common),
    /// Like `evolve`, also writing a density snapshot per sample.
    Density(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file (TOML).
    config: PathBuf,
    /// Worker threads; 0 picks automatically, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Time step in atomic units, overriding the configuration.
    #[arg(long)]
    dt: Option<f64>,
    /// Output directory, overriding the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep every n-th grid point in density CSVs, overriding the configuration.
    #[arg(long)]
    stride: Option<usize>,
}

struct Job {
    config: Config,
    out: PathBuf,
    workers: Workers,
    started: Instant,
}

impl Job {
    fn load(args: &Common) -> Result<Self> {
        let text = fs::read_to_string(&args.config).map_err(|e| {
            std::io::Error::new(e.kind(), format!("{}: {e}", args.config.display()))
        })?;
        let mut config = parse_document(&text)?;
        if let Some(dt) = args.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "--dt must be positive, got {dt}"
                )));
            }
            config.run.dt = Some(dt);
        }
        if let Some(stride) = args.stride {
            if stride == 0 {
                return Err(Error::InvalidArgument("--stride must be at least 1".into()));
            }
            config.output.stride = stride;
        }
        let out = args
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&config.output.dir));
        fs::create_dir_all(&out)?;
        Ok(Self {
            config,
            out,
            workers: Workers::from_count(args.workers),
            started: Instant::now(),
        })
    }

    fn manifest(&self, command: &str) -> RunManifest {
        let c = &self.config;
        let mut m = RunManifest::new(command, c.to_toml(), c.n_z, c.box_length, c.n_keep);
        m.n_project = c.n_project;
        m.workers = self.workers.count();
        m
    }

    fn scenario(&self) -> Result<ScenarioConfig> {
        let mut s = self.config.scenario()?;
        s.workers = self.workers;
        Ok(s)
    }

    fn finish(&self, mut manifest: RunManifest) -> Result<()> {
        manifest.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        for w in &manifest.warnings {
            eprintln!("warning: {w}");
        }
        manifest.write(&self.out)?;
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn run_spectrum(job: &Job) -> Result<()> {
    let sc = job.config.spectrum_job()?;
    let grid = SpatialGrid::shared(job.config.n_z, job.config.box_length)?;
    let basis = match sc.n_keep {
        Some(k) => SpectrumBasis::new(&grid, k)?,
        None => SpectrumBasis::full(&grid)?,
    };
    let result = scan(&basis, &sc.family, &sc.values(), job.workers)?;
    let dives = diving_points(&basis, &result)?;
    let mut manifest = job.manifest("spectrum");
    write_spectrum(&job.path("spectrum.csv"), &result, sc.window)?;
    write_branches(&job.path("branches.csv"), &result)?;
    write_diving(&job.path("diving.csv"), &result, &dives)?;
    manifest.outputs = vec![
        "spectrum.csv".into(),
        "branches.csv".into(),
        "diving.csv".into(),
    ];
    for a in &result.ambiguities {
        manifest.warnings.push(format!(
            "branch {} lost at {:e} au (best overlap {:.3})",
            a.branch, a.value, a.best_overlap
        ));
    }
    let unit = sc.family.parameter.unit();
    for d in &dives {
        println!(
            "diving point {}: {:.4} {}",
            d.order,
            d.value / unit.scale(),
            unit.suffix()
        );
    }
    job.finish(manifest)
}

fn write_series(
    job: &Job,
    manifest: &mut RunManifest,
    series: &TimeSeries,
    box_length: f64,
    threshold: f64,
) -> Result<()> {
    write_timeseries(&job.path("timeseries.csv"), series)?;
    write_boundary(&job.path("boundary.csv"), series)?;
    manifest.outputs.push("timeseries.csv".into());
    manifest.outputs.push("boundary.csv".into());
    manifest.record_series(series);
    manifest.boundary = Some(boundary_monitor(series, box_length, threshold));
    if !series.densities.is_empty() {
        let dir = job.path("density");
        fs::create_dir_all(&dir)?;
        for (i, (el, po)) in series.densities.iter().enumerate() {
            let name = format!("density_{i:04}.csv");
            write_density(&dir.join(&name), el, po, job.config.output.stride)?;
            manifest.outputs.push(format!("density/{name}"));
        }
    }
    Ok(())
}

fn run_evolve(job: &Job, densities: bool) -> Result<()> {
    let mut scenario = job.scenario()?;
    scenario.keep_densities |= densities;
    let series = run_scenario(&scenario)?;
    let mut manifest = job.manifest(if densities { "density" } else { "evolve" });
    write_series(
        job,
        &mut manifest,
        &series,
        scenario.box_length,
        scenario.boundary_threshold,
    )?;
    if let Some(last) = series.last() {
        println!("t = {:.5e} au  N = {:.6}", last.time, last.pair_number);
    }
    job.finish(manifest)
}

fn run_sweep(job: &Job) -> Result<()> {
    let (mut base, sweep) = job.config.sweep_job()?;
    base.workers = job.workers;
    let points = adiabatic_sweep(&base, &sweep.bounds(), sweep.point_parallel)?;
    write_sweep(&job.path("sweep.csv"), &points)?;
    let mut manifest = job.manifest("sweep");
    manifest.outputs.push("sweep.csv".into());
    let scale = if base.drive.label() == "V" {
        C2
    } else {
        LAMBDA_C
    };
    for p in &points {
        println!("{:.4} {:.6}", p.upper_bound / scale, p.final_n);
    }
    job.finish(manifest)
}

fn report(e: &Error) -> ExitCode {
    let category = e.category();
    let body =
        serde_json::json!({ "error": { "category": category.as_str(), "message": e.to_string() } });
    eprintln!("{body}");
    ExitCode::from(category.exit_code() as u8)
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Spectrum(a) => run_spectrum(&Job::load(a)?),
        Command::Evolve(a) => run_evolve(&Job::load(a)?, false),
        Command::Density(a) => run_evolve(&Job::load(a)?, true),
        Command::Sweep(a) => run_sweep(&Job::load(a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
