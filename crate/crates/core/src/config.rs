//! Scenario configuration files.
//!
//! The format is TOML with the sections below. Every section and key is
//! optional in the grammar; each job checks for the keys it needs and lists
//! all that are missing at once.
//!
//! ```toml
//! [grid]
//! n_z = 2048              # even, >= 4
//! box_length = "2.5 au"   # length
//! n_keep = 1024           # evolved negative modes (N_p)
//! n_project = 1024        # projected positive modes, defaults to n_keep
//!
//! [drive]
//! mode = "width"          # "width" | "depth" | "static"; inferred from W2 / V2
//! V0 = "2.53 c2"          # depth of a width-oscillating or static well
//! W1 = "0 lambdaC"        # width range of a width-oscillating well
//! W2 = "10 lambdaC"
//! W = "10 lambdaC"        # width of a depth-oscillating or static well
//! V1 = "0 c2"             # depth range of a depth-oscillating well
//! V2 = "2.53 c2"
//! omega = "0.3 c2"        # angular frequency
//! D = "0.3 lambdaC"       # edge width
//!
//! [run]
//! cycles = 18
//! dt = "1e-6 au"          # optional; default (max|V| + bandwidth)·dt <= 0.1
//! snapshots = "field_free"  # or an integer m: sample every m steps
//! in_well_half_width = "5 lambdaC"
//! boundary_fraction = 0.02
//! boundary_threshold = 5e-2 # particles per a.u.
//! densities = false       # write density snapshots
//!
//! [spectrum]
//! parameter = "width"     # "width" | "depth"
//! from = "0 lambdaC"
//! to = "10 lambdaC"
//! points = 51
//! V0 = "2.53 c2"          # fixed depth of a width scan
//! W = "10 lambdaC"        # fixed width of a depth scan
//! n_keep = 512            # basis modes per branch, defaults to n_z
//! window = 1.6            # CSV eigenvalue window, multiples of c2
//!
//! [sweep]
//! from = "1 lambdaC"      # range of the drive's upper bound (W2 or V2)
//! to = "11 lambdaC"
//! step = "0.5 lambdaC"
//! point_parallel = false
//!
//! [output]
//! dir = "out"
//! stride = 1              # keep every stride-th grid point in density CSVs
//! ```
//!
//! Dimensioned values are a number followed by a unit: `c2` (multiples of
//! the rest energy, for energies and angular frequencies), `lambdaC`
//! (multiples of the Compton wavelength, for lengths) or `au` (atomic units,
//! any quantity). A bare number is read as atomic units.

use std::fmt::Write as _;
use std::ops::Range;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::exec::Workers;
use crate::experiment::{
    ScenarioConfig, SnapshotPolicy, DEFAULT_BOUNDARY_FRACTION, DEFAULT_BOUNDARY_THRESHOLD,
};
use crate::observables::DEFAULT_IN_WELL_HALF_WIDTH;
use crate::potential::{DriveMode, WellShape, DEFAULT_EDGE};
use crate::spectrum::{ScanFamily, ScanParameter, DEFAULT_WINDOW};
use crate::units::Unit;

pub const DEFAULT_N_Z: usize = 2048;
pub const DEFAULT_BOX_LENGTH: f64 = 2.5;
pub const DEFAULT_N_KEEP: usize = 1024;
pub const DEFAULT_SPECTRUM_POINTS: usize = 51;

/// Physical dimension a key expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Energy,
    Length,
    Time,
}

impl Dimension {
    fn accepts(self, unit: Unit) -> bool {
        matches!(
            (self, unit),
            (_, Unit::Atomic)
                | (Dimension::Energy, Unit::RestEnergy)
                | (Dimension::Length, Unit::Compton)
        )
    }

    fn name(self) -> &'static str {
        match self {
            Dimension::Energy => "an energy (c2 or au)",
            Dimension::Length => "a length (lambdaC or au)",
            Dimension::Time => "a time (au)",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawQuantity {
    Number(f64),
    Text(String),
}

type Q = Spanned<RawQuantity>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n_z: Option<Spanned<i64>>,
    box_length: Option<Q>,
    n_keep: Option<Spanned<i64>>,
    n_project: Option<Spanned<i64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    mode: Option<Spanned<String>>,
    #[serde(rename = "V0")]
    v0: Option<Q>,
    #[serde(rename = "W1")]
    w1: Option<Q>,
    #[serde(rename = "W2")]
    w2: Option<Q>,
    #[serde(rename = "W")]
    w: Option<Q>,
    #[serde(rename = "V1")]
    v1: Option<Q>,
    #[serde(rename = "V2")]
    v2: Option<Q>,
    omega: Option<Q>,
    #[serde(rename = "D")]
    d: Option<Q>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawSnapshots {
    Every(i64),
    Named(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    cycles: Option<Spanned<i64>>,
    dt: Option<Q>,
    snapshots: Option<Spanned<RawSnapshots>>,
    in_well_half_width: Option<Q>,
    boundary_fraction: Option<Spanned<f64>>,
    boundary_threshold: Option<Spanned<f64>>,
    densities: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    parameter: Option<Spanned<String>>,
    from: Option<Q>,
    to: Option<Q>,
    points: Option<Spanned<i64>>,
    #[serde(rename = "V0")]
    v0: Option<Q>,
    #[serde(rename = "W")]
    w: Option<Q>,
    n_keep: Option<Spanned<i64>>,
    window: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    from: Option<Q>,
    to: Option<Q>,
    step: Option<Q>,
    point_parallel: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    stride: Option<Spanned<i64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    #[serde(default)]
    grid: RawGrid,
    drive: Option<RawDrive>,
    run: Option<RawRun>,
    spectrum: Option<RawSpectrum>,
    sweep: Option<RawSweep>,
    #[serde(default)]
    output: RawOutput,
}

/// Parameters of a spectrum scan, in a.u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub family: ScanFamily,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    /// Basis modes per branch; `None` uses the full basis.
    pub n_keep: Option<usize>,
    /// CSV window in multiples of `c²`.
    pub window: f64,
}

impl SpectrumConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let step = (self.to - self.from) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.from + i as f64 * step)
            .collect()
    }
}

/// Upper bounds of an adiabatic sweep, in a.u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub point_parallel: bool,
}

impl SweepConfig {
    pub fn bounds(&self) -> Vec<f64> {
        let n = ((self.to - self.from) / self.step * (1.0 + 1e-12) + 1e-9).floor() as usize;
        (0..=n).map(|i| self.from + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: String,
    pub stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            stride: 1,
        }
    }
}

/// A parsed configuration file. Sections a job does not use may be absent.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub n_z: usize,
    pub box_length: f64,
    pub n_keep: usize,
    pub n_project: Option<usize>,
    pub drive: Option<DriveMode>,
    pub run: RunSection,
    pub spectrum: Option<SpectrumConfig>,
    pub sweep: Option<SweepConfig>,
    pub output: OutputConfig,
    missing_drive: Vec<String>,
    missing_spectrum: Vec<String>,
    missing_sweep: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSection {
    pub cycles: Option<usize>,
    pub dt: Option<f64>,
    pub snapshots: SnapshotPolicy,
    pub in_well_half_width: f64,
    pub boundary_fraction: f64,
    pub boundary_threshold: f64,
    pub densities: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            cycles: None,
            dt: None,
            snapshots: SnapshotPolicy::FieldFree,
            in_well_half_width: DEFAULT_IN_WELL_HALF_WIDTH,
            boundary_fraction: DEFAULT_BOUNDARY_FRACTION,
            boundary_threshold: DEFAULT_BOUNDARY_THRESHOLD,
            densities: false,
        }
    }
}

/// Maps byte offsets to 1-based line numbers.
struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn line(&self, span: &Range<usize>) -> usize {
        let end = span.start.min(self.0.len());
        self.0[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn err(&self, span: &Range<usize>, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.line(span),
            message: message.into(),
        }
    }

    fn quantity(&self, q: &Q, key: &str, dim: Dimension) -> Result<f64> {
        let (value, unit) = match q.get_ref() {
            RawQuantity::Number(x) => (*x, Unit::Atomic),
            RawQuantity::Text(s) => {
                let mut parts = s.split_whitespace();
                let number = parts.next().and_then(|p| p.parse::<f64>().ok());
                let unit = match parts.next() {
                    None => Some(Unit::Atomic),
                    Some(u) => Unit::from_suffix(u),
                };
                match (number, unit, parts.next()) {
                    (Some(x), Some(u), None) => (x, u),
                    _ => {
                        return Err(self.err(
                            &q.span(),
                            format!(
                            "`{key}`: cannot read {s:?} as a number with unit c2, lambdaC or au"
                        ),
                        ))
                    }
                }
            }
        };
        if !dim.accepts(unit) {
            return Err(self.err(
                &q.span(),
                format!("`{key}` expects {}, got unit {}", dim.name(), unit.suffix()),
            ));
        }
        if !value.is_finite() {
            return Err(self.err(&q.span(), format!("`{key}` must be finite")));
        }
        Ok(value * unit.scale())
    }

    fn opt(&self, q: &Option<Q>, key: &str, dim: Dimension) -> Result<Option<f64>> {
        q.as_ref().map(|q| self.quantity(q, key, dim)).transpose()
    }

    fn count(&self, v: &Spanned<i64>, key: &str, min: i64) -> Result<usize> {
        let x = *v.get_ref();
        if x < min {
            return Err(self.err(
                &v.span(),
                format!("`{key}` must be at least {min}, got {x}"),
            ));
        }
        Ok(x as usize)
    }
}

/// Parse a configuration file.
pub fn parse_document(text: &str) -> Result<Config> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| Lines(text).line(&s));
        Error::Config {
            line,
            message: e.message().to_string(),
        }
    })?;
    let lines = Lines(text);

    let n_z = raw
        .grid
        .n_z
        .as_ref()
        .map(|v| lines.count(v, "n_z", 4))
        .transpose()?
        .unwrap_or(DEFAULT_N_Z);
    let box_length = lines
        .opt(&raw.grid.box_length, "box_length", Dimension::Length)?
        .unwrap_or(DEFAULT_BOX_LENGTH);
    let n_keep = raw
        .grid
        .n_keep
        .as_ref()
        .map(|v| lines.count(v, "n_keep", 1))
        .transpose()?
        .unwrap_or(DEFAULT_N_KEEP.min(n_z));
    let n_project = raw
        .grid
        .n_project
        .as_ref()
        .map(|v| lines.count(v, "n_project", 1))
        .transpose()?;

    let (drive, missing_drive) = match &raw.drive {
        None => (
            None,
            vec![
                "drive.omega".into(),
                "drive.V0 or drive.V2".into(),
                "drive.W2 or drive.W".into(),
            ],
        ),
        Some(d) => parse_drive(&lines, d)?,
    };

    // sweep bounds share the dimension of the drive's oscillating parameter
    let sweep_dim = match drive {
        Some(DriveMode::WidthOsc { .. }) => Some(Dimension::Length),
        Some(DriveMode::DepthOsc { .. }) => Some(Dimension::Energy),
        _ => None,
    };

    let mut run = RunSection::default();
    if let Some(r) = &raw.run {
        run.cycles = r
            .cycles
            .as_ref()
            .map(|v| lines.count(v, "cycles", 1))
            .transpose()?;
        run.dt = lines.opt(&r.dt, "dt", Dimension::Time)?;
        if let Some(dt) = &r.dt {
            if run.dt.is_some_and(|x| x <= 0.0) {
                return Err(lines.err(&dt.span(), "`dt` must be positive"));
            }
        }
        if let Some(s) = &r.snapshots {
            run.snapshots = match s.get_ref() {
                RawSnapshots::Named(n) if n == "field_free" => SnapshotPolicy::FieldFree,
                RawSnapshots::Every(m) if *m >= 1 => SnapshotPolicy::EverySteps(*m as usize),
                _ => {
                    return Err(lines.err(
                        &s.span(),
                        "`snapshots` must be \"field_free\" or a positive step count",
                    ))
                }
            };
        }
        if let Some(h) = lines.opt(
            &r.in_well_half_width,
            "in_well_half_width",
            Dimension::Length,
        )? {
            run.in_well_half_width = h;
        }
        if let Some(f) = &r.boundary_fraction {
            run.boundary_fraction = *f.get_ref();
            if !(run.boundary_fraction > 0.0 && run.boundary_fraction < 1.0) {
                return Err(lines.err(&f.span(), "`boundary_fraction` must lie in (0, 1)"));
            }
        }
        if let Some(t) = &r.boundary_threshold {
            run.boundary_threshold = *t.get_ref();
            if !(run.boundary_threshold > 0.0) {
                return Err(lines.err(&t.span(), "`boundary_threshold` must be positive"));
            }
        }
        run.densities = r.densities.unwrap_or(false);
    }

    let (spectrum, missing_spectrum) = match &raw.spectrum {
        None => (
            None,
            vec!["spectrum.parameter".into(), "spectrum.to".into()],
        ),
        Some(s) => parse_spectrum(&lines, s)?,
    };

    let (sweep, missing_sweep) = match &raw.sweep {
        None => (
            None,
            vec!["sweep.from".into(), "sweep.to".into(), "sweep.step".into()],
        ),
        Some(s) => {
            let read = |q: &Option<Q>, key: &str| match sweep_dim {
                Some(dim) => lines.opt(q, key, dim),
                None => lines
                    .opt(q, key, Dimension::Length)
                    .or_else(|_| lines.opt(q, key, Dimension::Energy)),
            };
            let (from, to, step) = (
                read(&s.from, "from")?,
                read(&s.to, "to")?,
                read(&s.step, "step")?,
            );
            let mut missing = Vec::new();
            for (v, k) in [(from, "sweep.from"), (to, "sweep.to"), (step, "sweep.step")] {
                if v.is_none() {
                    missing.push(k.to_string());
                }
            }
            match (from, to, step) {
                (Some(from), Some(to), Some(step)) => {
                    if !(step > 0.0 && to >= from) {
                        let span = s.step.as_ref().map(|q| q.span()).unwrap_or(0..0);
                        return Err(lines.err(&span, "sweep needs `step` > 0 and `to` >= `from`"));
                    }
                    (
                        Some(SweepConfig {
                            from,
                            to,
                            step,
                            point_parallel: s.point_parallel.unwrap_or(false),
                        }),
                        missing,
                    )
                }
                _ => (None, missing),
            }
        }
    };

    let mut output = OutputConfig::default();
    if let Some(d) = &raw.output.dir {
        output.dir = d.clone();
    }
    if let Some(s) = &raw.output.stride {
        output.stride = lines.count(s, "stride", 1)?;
    }

    Ok(Config {
        n_z,
        box_length,
        n_keep,
        n_project,
        drive,
        run,
        spectrum,
        sweep,
        output,
        missing_drive,
        missing_spectrum,
        missing_sweep,
    })
}

fn parse_drive(lines: &Lines, d: &RawDrive) -> Result<(Option<DriveMode>, Vec<String>)> {
    use Dimension::{Energy, Length};
    let v0 = lines.opt(&d.v0, "V0", Energy)?;
    let w1 = lines.opt(&d.w1, "W1", Length)?;
    let w2 = lines.opt(&d.w2, "W2", Length)?;
    let w = lines.opt(&d.w, "W", Length)?;
    let v1 = lines.opt(&d.v1, "V1", Energy)?;
    let v2 = lines.opt(&d.v2, "V2", Energy)?;
    let omega = lines.opt(&d.omega, "omega", Energy)?;
    let edge = lines.opt(&d.d, "D", Length)?.unwrap_or(DEFAULT_EDGE);

    let mode = match &d.mode {
        Some(m) => match m.get_ref().as_str() {
            "width" | "W" => "width",
            "depth" | "V" => "depth",
            "static" => "static",
            other => {
                return Err(lines.err(
                    &m.span(),
                    format!("unknown drive mode {other:?}; expected width, depth or static"),
                ))
            }
        },
        None if w2.is_some() => "width",
        None if v2.is_some() => "depth",
        None => {
            return Ok((
                None,
                vec!["drive.mode, or drive.W2 / drive.V2 to infer it".into()],
            ))
        }
    };
    let mut missing = Vec::new();
    let mut need = |v: Option<f64>, key: &str| {
        if v.is_none() {
            missing.push(format!("drive.{key}"));
        }
        v.unwrap_or(0.0)
    };
    let drive = match mode {
        "width" => DriveMode::WidthOsc {
            depth: need(v0, "V0"),
            w_min: w1.unwrap_or(0.0),
            w_max: need(w2, "W2"),
            omega: need(omega, "omega"),
            edge,
        },
        "depth" => DriveMode::DepthOsc {
            width: need(w, "W"),
            v_min: v1.unwrap_or(0.0),
            v_max: need(v2, "V2"),
            omega: need(omega, "omega"),
            edge,
        },
        _ => DriveMode::Static {
            shape: WellShape {
                depth: need(v0, "V0"),
                width: need(w, "W"),
                edge,
            },
        },
    };
    if !missing.is_empty() {
        return Ok((None, missing));
    }
    drive.validate().map_err(|e| {
        let span = d
            .mode
            .as_ref()
            .map(|m| m.span())
            .or(d.omega.as_ref().map(|q| q.span()))
            .unwrap_or(0..0);
        lines.err(&span, e.to_string())
    })?;
    Ok((Some(drive), Vec::new()))
}

fn parse_spectrum(lines: &Lines, s: &RawSpectrum) -> Result<(Option<SpectrumConfig>, Vec<String>)> {
    let mut missing = Vec::new();
    let parameter = match &s.parameter {
        None => {
            missing.push("spectrum.parameter".to_string());
            None
        }
        Some(p) => Some(match p.get_ref().as_str() {
            "width" => ScanParameter::Width,
            "depth" => ScanParameter::Depth,
            other => {
                return Err(lines.err(
                    &p.span(),
                    format!("unknown scan parameter {other:?}; expected width or depth"),
                ))
            }
        }),
    };
    let Some(parameter) = parameter else {
        return Ok((None, missing));
    };
    let (dim, fixed_key, fixed_dim) = match parameter {
        ScanParameter::Width => (Dimension::Length, "V0", Dimension::Energy),
        ScanParameter::Depth => (Dimension::Energy, "W", Dimension::Length),
    };
    let from = lines.opt(&s.from, "from", dim)?.unwrap_or(0.0);
    let to = lines.opt(&s.to, "to", dim)?;
    let fixed_raw = match parameter {
        ScanParameter::Width => &s.v0,
        ScanParameter::Depth => &s.w,
    };
    let fixed = lines.opt(fixed_raw, fixed_key, fixed_dim)?;
    if to.is_none() {
        missing.push("spectrum.to".into());
    }
    if fixed.is_none() {
        missing.push(format!("spectrum.{fixed_key}"));
    }
    let (Some(to), Some(fixed)) = (to, fixed) else {
        return Ok((None, missing));
    };
    let points = s
        .points
        .as_ref()
        .map(|v| lines.count(v, "points", 1))
        .transpose()?
        .unwrap_or(DEFAULT_SPECTRUM_POINTS);
    if !(to > from || (points == 1 && to >= from)) {
        let span = s.to.as_ref().map(|q| q.span()).unwrap_or(0..0);
        return Err(lines.err(&span, "spectrum `to` must exceed `from`"));
    }
    let n_keep = s
        .n_keep
        .as_ref()
        .map(|v| lines.count(v, "n_keep", 1))
        .transpose()?;
    let window = s
        .window
        .as_ref()
        .map(|w| *w.get_ref())
        .unwrap_or(DEFAULT_WINDOW);
    let family = match parameter {
        ScanParameter::Width => ScanFamily::width(fixed),
        ScanParameter::Depth => ScanFamily::depth(fixed),
    };
    Ok((
        Some(SpectrumConfig {
            family,
            from,
            to,
            points,
            n_keep,
            window,
        }),
        missing,
    ))
}

fn missing_error(keys: &[String]) -> Error {
    Error::ConfigMissing(keys.join(", "))
}

impl Config {
    /// The scenario for `evolve` and `density`.
    pub fn scenario(&self) -> Result<ScenarioConfig> {
        let mut missing = self.missing_drive.clone();
        if self.run.cycles.is_none() {
            missing.push("run.cycles".into());
        }
        let (Some(drive), Some(cycles), true) = (self.drive, self.run.cycles, missing.is_empty())
        else {
            return Err(missing_error(&missing));
        };
        self.scenario_with(drive, cycles)
    }

    fn scenario_with(&self, drive: DriveMode, cycles: usize) -> Result<ScenarioConfig> {
        let mut c = ScenarioConfig::new(self.n_z, self.box_length, drive, cycles, self.n_keep);
        c.dt = self.run.dt;
        c.n_project = self.n_project;
        c.snapshots = self.run.snapshots;
        c.in_well_half_width = self.run.in_well_half_width;
        c.boundary_fraction = self.run.boundary_fraction;
        c.boundary_threshold = self.run.boundary_threshold;
        c.keep_densities = self.run.densities;
        c.workers = Workers::Auto;
        c.validate()?;
        Ok(c)
    }

    /// The scenario template and bounds for `sweep`. `run.cycles` is not needed.
    pub fn sweep_job(&self) -> Result<(ScenarioConfig, SweepConfig)> {
        let mut missing = self.missing_drive.clone();
        missing.extend(self.missing_sweep.iter().cloned());
        let (Some(drive), Some(sweep), true) = (self.drive, self.sweep, missing.is_empty()) else {
            return Err(missing_error(&missing));
        };
        Ok((self.scenario_with(drive, 1)?, sweep))
    }

    pub fn spectrum_job(&self) -> Result<SpectrumConfig> {
        match self.spectrum {
            Some(s) if self.missing_spectrum.is_empty() => Ok(s),
            _ => Err(missing_error(&self.missing_spectrum)),
        }
    }

    /// Emit the resolved configuration with every value in atomic units.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let au = |x: f64| format!("\"{x:e} au\"");
        let _ = writeln!(
            s,
            "[grid]\nn_z = {}\nbox_length = {}\nn_keep = {}",
            self.n_z,
            au(self.box_length),
            self.n_keep
        );
        if let Some(p) = self.n_project {
            let _ = writeln!(s, "n_project = {p}");
        }
        if let Some(d) = self.drive {
            let _ = writeln!(s, "\n[drive]");
            match d {
                DriveMode::WidthOsc {
                    depth,
                    w_min,
                    w_max,
                    omega,
                    edge,
                } => {
                    let _ = writeln!(
                        s,
                        "mode = \"width\"\nV0 = {}\nW1 = {}\nW2 = {}\nomega = {}\nD = {}",
                        au(depth),
                        au(w_min),
                        au(w_max),
                        au(omega),
                        au(edge)
                    );
                }
                DriveMode::DepthOsc {
                    width,
                    v_min,
                    v_max,
                    omega,
                    edge,
                } => {
                    let _ = writeln!(
                        s,
                        "mode = \"depth\"\nW = {}\nV1 = {}\nV2 = {}\nomega = {}\nD = {}",
                        au(width),
                        au(v_min),
                        au(v_max),
                        au(omega),
                        au(edge)
                    );
                }
                DriveMode::Static { shape } => {
                    let _ = writeln!(
                        s,
                        "mode = \"static\"\nV0 = {}\nW = {}\nD = {}",
                        au(shape.depth),
                        au(shape.width),
                        au(shape.edge)
                    );
                }
            }
        }
        let r = &self.run;
        let _ = writeln!(s, "\n[run]");
        if let Some(c) = r.cycles {
            let _ = writeln!(s, "cycles = {c}");
        }
        if let Some(dt) = r.dt {
            let _ = writeln!(s, "dt = {}", au(dt));
        }
        match r.snapshots {
            SnapshotPolicy::FieldFree => {
                let _ = writeln!(s, "snapshots = \"field_free\"");
            }
            SnapshotPolicy::EverySteps(m) => {
                let _ = writeln!(s, "snapshots = {m}");
            }
        }
        let _ = writeln!(
            s,
            "in_well_half_width = {}\nboundary_fraction = {:e}\nboundary_threshold = {:e}\ndensities = {}",
            au(r.in_well_half_width),
            r.boundary_fraction,
            r.boundary_threshold,
            r.densities
        );
        if let Some(sp) = self.spectrum {
            let fixed_key = match sp.family.parameter {
                ScanParameter::Width => "V0",
                ScanParameter::Depth => "W",
            };
            let _ = writeln!(
                s,
                "\n[spectrum]\nparameter = \"{}\"\nfrom = {}\nto = {}\npoints = {}\n{} = {}\nwindow = {:e}",
                sp.family.parameter.as_str(),
                au(sp.from),
                au(sp.to),
                sp.points,
                fixed_key,
                au(sp.family.fixed),
                sp.window
            );
            if let Some(k) = sp.n_keep {
                let _ = writeln!(s, "n_keep = {k}");
            }
        }
        if let Some(sw) = self.sweep {
            let _ = writeln!(
                s,
                "\n[sweep]\nfrom = {}\nto = {}\nstep = {}\npoint_parallel = {}",
                au(sw.from),
                au(sw.to),
                au(sw.step),
                sw.point_parallel
            );
        }
        let _ = writeln!(
            s,
            "\n[output]\ndir = {:?}\nstride = {}",
            self.output.dir, self.output.stride
        );
        s
    }
}

/// Parse a configuration and resolve the scenario it describes.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_document(text)?.scenario()
}
