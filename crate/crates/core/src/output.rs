//! CSV and manifest writers.
//!
//! Every CSV has a header row whose column names carry their unit suffix
//! (`_au`, `_c2`, `_lambdaC`, `_per_au`). Numbers are written with Rust's
//! shortest round-trip formatting, which is locale independent. A pump rate
//! with no pairs yet is written as an empty cell.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{BoundaryArrival, Sample, SweepPoint, TimeSeries};
use crate::observables::{DensityProfile, PumpRate};
use crate::spectrum::{DivingPoint, SpectrumScan};
use crate::units::{Unit, C2, LAMBDA_C};

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn rate(r: PumpRate) -> String {
    r.value().map(num).unwrap_or_default()
}

fn write_rows(
    path: &Path,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub const TIMESERIES_HEADER: [&str; 7] = [
    "t_au",
    "N",
    "N_in_el",
    "N_in_po",
    "alpha_el",
    "alpha_po",
    "field_free",
];

/// `t, N, N_in^el, N_in^po, α_el, α_po, field_free` per sample.
pub fn write_timeseries(path: &Path, series: &TimeSeries) -> Result<()> {
    write_rows(
        path,
        &strings(&TIMESERIES_HEADER),
        series.samples.iter().map(|s: &Sample| {
            vec![
                num(s.time),
                num(s.pair_number),
                num(s.in_well_electron),
                num(s.in_well_positron),
                rate(s.pump_electron),
                rate(s.pump_positron),
                (s.field_free as u8).to_string(),
            ]
        }),
    )
}

pub const BOUNDARY_HEADER: [&str; 3] = ["t_au", "edge_el_per_au", "edge_po_per_au"];

/// Mean density in the watched edge region per sample.
pub fn write_boundary(path: &Path, series: &TimeSeries) -> Result<()> {
    write_rows(
        path,
        &strings(&BOUNDARY_HEADER),
        series.samples.iter().map(|s| {
            vec![
                num(s.time),
                num(s.boundary_electron),
                num(s.boundary_positron),
            ]
        }),
    )
}

pub const DENSITY_HEADER: [&str; 3] = ["z_lambdaC", "N_z_el_per_au", "N_z_po_per_au"];

/// One density snapshot, keeping every `stride`-th grid point.
pub fn write_density(
    path: &Path,
    electron: &DensityProfile,
    positron: &DensityProfile,
    stride: usize,
) -> Result<()> {
    if electron.values.len() != positron.values.len() {
        return Err(Error::LengthMismatch {
            expected: electron.values.len(),
            got: positron.values.len(),
        });
    }
    let stride = stride.max(1);
    write_rows(
        path,
        &strings(&DENSITY_HEADER),
        (0..electron.values.len()).step_by(stride).map(|j| {
            vec![
                num(electron.positions()[j] / LAMBDA_C),
                num(electron.values[j]),
                num(positron.values[j]),
            ]
        }),
    )
}

/// `upper_bound, final_N, omega, mode`, bounds in the paper unit of the mode.
pub fn write_sweep(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let unit = match points.first().map(|p| p.mode.as_str()) {
        Some("V") => Unit::RestEnergy,
        _ => Unit::Compton,
    };
    let header = vec![
        format!("upper_bound_{}", unit.suffix()),
        "final_N".into(),
        "omega_c2".into(),
        "mode".into(),
    ];
    write_rows(
        path,
        &header,
        points.iter().map(|p| {
            vec![
                num(p.upper_bound / unit.scale()),
                num(p.final_n),
                num(p.omega / C2),
                p.mode.clone(),
            ]
        }),
    )
}

fn parameter_column(scan: &SpectrumScan) -> (String, f64) {
    let unit = scan.family.parameter.unit();
    (
        format!("{}_{}", scan.family.parameter.as_str(), unit.suffix()),
        unit.scale(),
    )
}

/// Parameter value followed by the eigenvalues (in `c²`) inside
/// `[-window, window]·c²`; shorter rows are padded with empty cells.
pub fn write_spectrum(path: &Path, scan: &SpectrumScan, window: f64) -> Result<()> {
    let (name, scale) = parameter_column(scan);
    let rows = scan.windowed(window);
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut header = vec![name];
    header.extend((1..=width).map(|i| format!("E{i}_c2")));
    write_rows(
        path,
        &header,
        scan.values.iter().zip(&rows).map(|(v, row)| {
            let mut out = vec![num(v / scale)];
            out.extend(row.iter().map(|e| num(e / C2)));
            out.resize(width + 1, String::new());
            out
        }),
    )
}

/// Tracked branches: one row per (value, branch).
pub fn write_branches(path: &Path, scan: &SpectrumScan) -> Result<()> {
    let (name, scale) = parameter_column(scan);
    let header = vec![
        name,
        "branch".into(),
        "E_c2".into(),
        "overlap".into(),
        "in_well".into(),
    ];
    let rows = scan.values.iter().zip(&scan.branches).flat_map(|(v, bs)| {
        bs.iter().map(move |b| {
            vec![
                num(v / scale),
                b.branch.to_string(),
                num(b.energy / C2),
                num(b.overlap),
                num(b.in_well),
            ]
        })
    });
    write_rows(path, &header, rows)
}

/// Diving points in the paper unit of the scan parameter.
pub fn write_diving(path: &Path, scan: &SpectrumScan, points: &[DivingPoint]) -> Result<()> {
    let (name, scale) = parameter_column(scan);
    let header = vec!["order".into(), name, "E_c2".into()];
    write_rows(
        path,
        &header,
        points.iter().map(|p| {
            vec![
                p.order.to_string(),
                num(p.value / scale),
                num(p.energy / C2),
            ]
        }),
    )
}

/// Provenance record written next to every run's CSVs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Resolved configuration, every value in atomic units.
    pub config: String,
    pub n_z: usize,
    pub box_length: f64,
    pub n_keep: usize,
    pub n_project: Option<usize>,
    pub dt: Option<f64>,
    pub steps_per_period: Option<usize>,
    pub in_well_window: Option<(f64, f64)>,
    pub beta_electron: Option<f64>,
    pub beta_positron: Option<f64>,
    pub boundary: Option<BoundaryArrival>,
    pub workers: usize,
    pub wall_clock_seconds: f64,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: String, n_z: usize, box_length: f64, n_keep: usize) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            n_z,
            box_length,
            n_keep,
            n_project: None,
            dt: None,
            steps_per_period: None,
            in_well_window: None,
            beta_electron: None,
            beta_positron: None,
            boundary: None,
            workers: 1,
            wall_clock_seconds: 0.0,
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record_series(&mut self, series: &TimeSeries) {
        self.n_project = Some(series.n_project);
        self.dt = Some(series.dt);
        self.steps_per_period = Some(series.steps_per_period);
        self.in_well_window = Some(series.window);
        self.beta_electron = series.beta_electron;
        self.beta_positron = series.beta_positron;
        self.warnings.extend(series.warnings.iter().cloned());
    }

    /// Write as `manifest.json` in `dir`, listing itself last.
    pub fn write(&mut self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        self.outputs.push("manifest.json".into());
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        let mut f = fs::File::create(&path)?;
        f.write_all(json.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;
    use crate::observables::Species;

    fn tmp(name: &str) -> PathBuf {
        let dir =
            std::env::temp_dir().join(format!("pairpump-output-{}-{name}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn density_csv_respects_stride() {
        let g = SpatialGrid::new(16, 2.5).unwrap();
        let el = DensityProfile::new(&g, Species::Electron, 0.0, vec![0.5; 16]).unwrap();
        let po = DensityProfile::new(&g, Species::Positron, 0.0, vec![0.25; 16]).unwrap();
        let path = tmp("density").join("d.csv");
        write_density(&path, &el, &po, 4).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "z_lambdaC,N_z_el_per_au,N_z_po_per_au");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].ends_with(",0.5,0.25"));
    }

    #[test]
    fn sweep_csv_uses_paper_units() {
        let pts = vec![SweepPoint {
            upper_bound: 7.0 * LAMBDA_C,
            final_n: 1.95,
            omega: C2 / 60.0,
            mode: "W".into(),
        }];
        let path = tmp("sweep").join("s.csv");
        write_sweep(&path, &pts).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "upper_bound_lambdaC,final_N,omega_c2,mode"
        );
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert!((row[0].parse::<f64>().unwrap() - 7.0).abs() < 1e-12);
        assert_eq!(row[3], "W");
    }
}
