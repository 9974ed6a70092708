//! Scenario orchestration: evolve every retained negative mode under one
//! drive, sample observables on a schedule, run adiabatic sweeps and watch
//! the box edges.
//!
//! Modes are the unit of parallelism. Per-step potential phases are computed
//! once per segment and shared read-only by all workers; every reduction runs
//! on the calling thread in mode order.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, BasisSet, EnergySign};
use crate::error::{Error, Result};
use crate::exec::Workers;
use crate::grid::{SpatialGrid, SpinorField};
use crate::observables::{
    fit_pump_beta, in_well_number, pair_number, pump_rate, DensityProfile, OverlapMatrix,
    Projector, PumpRate, DEFAULT_IN_WELL_HALF_WIDTH,
};
use crate::potential::DriveMode;
use crate::propagator::{dt_bound, PhaseTable, SplitStepPropagator};
use crate::units::C;

/// Default step budget: `(max|V| + bandwidth)·dt ≤ 0.1`.
pub const DEFAULT_DT_BUDGET: f64 = 0.1;
/// Default fraction of the box (both edges together) watched for arrivals.
pub const DEFAULT_BOUNDARY_FRACTION: f64 = 0.02;
/// Default arrival threshold on the mean edge density, particles per a.u.
pub const DEFAULT_BOUNDARY_THRESHOLD: f64 = 5e-2;
/// Longest run of steps whose phases are tabulated at once.
const SEGMENT_STEPS: usize = 256;

/// When observables are recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "steps", rename_all = "snake_case")]
pub enum SnapshotPolicy {
    /// At `t = jT` only, where the potential vanishes.
    FieldFree,
    /// Every `m` steps, plus every field-free instant and the final step.
    EverySteps(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_z: usize,
    pub box_length: f64,
    pub drive: DriveMode,
    /// Total time is `n_cycles` drive periods.
    pub n_cycles: usize,
    /// Time step; `None` applies the default budget rule.
    pub dt: Option<f64>,
    /// Number of evolved negative modes.
    pub n_keep: usize,
    /// Number of positive modes projected on; `None` means `n_keep`.
    pub n_project: Option<usize>,
    pub snapshots: SnapshotPolicy,
    pub in_well_half_width: f64,
    pub boundary_fraction: f64,
    pub boundary_threshold: f64,
    /// Keep full density profiles in the output series.
    pub keep_densities: bool,
    #[serde(skip)]
    pub workers: Workers,
}

impl ScenarioConfig {
    pub fn new(
        n_z: usize,
        box_length: f64,
        drive: DriveMode,
        n_cycles: usize,
        n_keep: usize,
    ) -> Self {
        Self {
            n_z,
            box_length,
            drive,
            n_cycles,
            dt: None,
            n_keep,
            n_project: None,
            snapshots: SnapshotPolicy::FieldFree,
            in_well_half_width: DEFAULT_IN_WELL_HALF_WIDTH,
            boundary_fraction: DEFAULT_BOUNDARY_FRACTION,
            boundary_threshold: DEFAULT_BOUNDARY_THRESHOLD,
            keep_densities: false,
            workers: Workers::Auto,
        }
    }

    pub fn n_project(&self) -> usize {
        self.n_project.unwrap_or(self.n_keep)
    }

    pub fn period(&self) -> Result<f64> {
        self.drive
            .period()
            .ok_or_else(|| Error::InvalidSchedule("a scenario needs an oscillating drive".into()))
    }

    pub fn validate(&self) -> Result<()> {
        self.drive.validate()?;
        let grid = SpatialGrid::new(self.n_z, self.box_length)?;
        self.period()?;
        if self.n_cycles == 0 {
            return Err(Error::InvalidSchedule("n_cycles must be at least 1".into()));
        }
        for n in [self.n_keep, self.n_project()] {
            if n == 0 || n > self.n_z {
                return Err(Error::Truncation {
                    requested: n,
                    available: self.n_z,
                });
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidSchedule(format!(
                    "dt must be positive, got {dt}"
                )));
            }
        }
        if let SnapshotPolicy::EverySteps(0) = self.snapshots {
            return Err(Error::InvalidSchedule(
                "snapshot interval must be at least 1 step".into(),
            ));
        }
        if !(self.in_well_half_width >= 0.0 && self.in_well_half_width <= 0.5 * grid.box_length()) {
            return Err(Error::InvalidArgument(format!(
                "in-well half-width {} outside the box",
                self.in_well_half_width
            )));
        }
        if !(self.boundary_fraction > 0.0 && self.boundary_fraction < 1.0) {
            return Err(Error::InvalidArgument(
                "boundary fraction must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    /// Steps per period and the step actually used, `dt = T / steps`.
    ///
    /// A requested `dt` is shortened to the nearest value that divides the
    /// period; the default takes the budget rule with the bandwidth of the
    /// retained modes.
    pub fn resolve_dt(&self) -> Result<(usize, f64)> {
        let period = self.period()?;
        let target = match self.dt {
            Some(dt) => dt,
            None => {
                let grid = SpatialGrid::shared(self.n_z, self.box_length)?;
                let bandwidth = build_basis(
                    &grid,
                    self.n_keep.max(self.n_project()),
                    EnergySign::Negative,
                )?
                .max_energy();
                dt_bound(self.drive.max_depth(), bandwidth, DEFAULT_DT_BUDGET)
            }
        };
        let steps = (period / target * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok((steps, period / steps as f64))
    }

    /// Total evolution time.
    pub fn total_time(&self) -> Result<f64> {
        Ok(self.n_cycles as f64 * self.period()?)
    }
}

/// Observables at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub step: usize,
    pub time: f64,
    /// `Σ|U_pn|²`.
    pub pair_number: f64,
    /// `∫ N_z^el dz`.
    pub electron_total: f64,
    /// `∫ N_z^po dz`.
    pub positron_total: f64,
    pub in_well_electron: f64,
    pub in_well_positron: f64,
    pub pump_electron: PumpRate,
    pub pump_positron: PumpRate,
    pub field_free: bool,
    /// Mean density in the watched edge region.
    pub boundary_electron: f64,
    pub boundary_positron: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeSeries {
    pub samples: Vec<Sample>,
    pub dt: f64,
    pub steps_per_period: usize,
    pub n_keep: usize,
    pub n_project: usize,
    /// In-well window actually used after snapping to grid points.
    pub window: (f64, f64),
    /// Least-squares `β` in `α ≈ 1 − β/t` per species, over field-free samples.
    pub beta_electron: Option<f64>,
    pub beta_positron: Option<f64>,
    pub warnings: Vec<String>,
    /// Density profiles `(electron, positron)` per sample when requested.
    #[serde(skip)]
    pub densities: Vec<(DensityProfile, DensityProfile)>,
}

impl TimeSeries {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn field_free(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(|s| s.field_free)
    }
}

/// Every sample step for a run of `total` steps.
fn sample_steps(policy: SnapshotPolicy, steps_per_period: usize, n_cycles: usize) -> Vec<usize> {
    let total = steps_per_period * n_cycles;
    let mut out: Vec<usize> = (0..=n_cycles).map(|j| j * steps_per_period).collect();
    if let SnapshotPolicy::EverySteps(m) = policy {
        out.extend((0..=total).step_by(m));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// A sample, the snapped in-well window and the `(electron, positron)` profiles.
type SampleOutcome = (Sample, (f64, f64), (DensityProfile, DensityProfile));

/// Shared state for one scenario.
struct Run {
    grid: Arc<SpatialGrid>,
    positive: BasisSet,
    negative: BasisSet,
    projector: Projector,
    propagator: SplitStepPropagator,
}

impl Run {
    fn sample(
        &self,
        fields: &[SpinorField],
        config: &ScenarioConfig,
        step: usize,
        steps_per_period: usize,
        workers: Workers,
    ) -> Result<SampleOutcome> {
        let time = step as f64 * self.propagator.dt();
        let columns = workers
            .map_range(fields.len(), |n| {
                self.projector
                    .overlap_column(&fields[n], &self.positive)
                    .map_err(|e| Error::Mode {
                        mode: n,
                        source: Box::new(e),
                    })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let u = OverlapMatrix::from_columns(&columns, self.positive.len(), time)?;
        let el = self
            .projector
            .electron_density(&u, &self.positive, workers)?;
        let po = self
            .projector
            .positron_density(&u, &self.negative, workers)?;
        let in_el = in_well_number(&el, config.in_well_half_width)?;
        let in_po = in_well_number(&po, config.in_well_half_width)?;
        let total = pair_number(&u);
        let edge = 0.5 * self.grid.box_length() * (1.0 - config.boundary_fraction);
        let sample = Sample {
            step,
            time,
            pair_number: total,
            electron_total: el.total(),
            positron_total: po.total(),
            in_well_electron: in_el.count,
            in_well_positron: in_po.count,
            pump_electron: pump_rate(total, in_el.count),
            pump_positron: pump_rate(total, in_po.count),
            field_free: step.is_multiple_of(steps_per_period),
            boundary_electron: el.mean_beyond(edge),
            boundary_positron: po.mean_beyond(edge),
        };
        Ok((sample, (in_el.z_lo, in_el.z_hi), (el, po)))
    }
}

/// Evolve all retained negative modes under the configured drive and record
/// observables at every sample step.
pub fn run_scenario(config: &ScenarioConfig) -> Result<TimeSeries> {
    config.validate()?;
    let workers = config.workers;
    let grid = SpatialGrid::shared(config.n_z, config.box_length)?;
    let (steps_per_period, dt) = config.resolve_dt()?;
    let run = Run {
        positive: build_basis(&grid, config.n_project(), EnergySign::Positive)?,
        negative: build_basis(&grid, config.n_keep, EnergySign::Negative)?,
        projector: Projector::new(&grid),
        propagator: SplitStepPropagator::new(grid.clone(), dt),
        grid,
    };

    let mut warnings = Vec::new();
    let crossing = 0.5 * config.box_length / C;
    let total_time = config.total_time()?;
    if total_time > crossing {
        warnings.push(format!(
            "total time {total_time:.4e} exceeds L/(2c) = {crossing:.4e}; particles reach the periodic box edge"
        ));
    }

    let mut fields: Vec<SpinorField> = run.negative.fields().collect();
    let stops = sample_steps(config.snapshots, steps_per_period, config.n_cycles);
    let mut samples = Vec::with_capacity(stops.len());
    let mut densities = Vec::new();
    let mut window = (0.0, 0.0);
    let mut done = 0usize;
    for &stop in &stops {
        while done < stop {
            let len = (stop - done).min(SEGMENT_STEPS);
            let phases = PhaseTable::new(&config.drive, &run.grid, done as f64 * dt, dt, len);
            workers
                .map_mut(&mut fields, |n, f| {
                    let mut ws = run.propagator.workspace();
                    run.propagator
                        .advance_with_phases(f, &phases, &mut ws)
                        .map_err(|e| Error::Mode {
                            mode: n,
                            source: Box::new(e),
                        })
                })
                .into_iter()
                .collect::<Result<Vec<()>>>()?;
            done += len;
        }
        let (sample, snapped, profiles) =
            run.sample(&fields, config, stop, steps_per_period, workers)?;
        window = snapped;
        samples.push(sample);
        if config.keep_densities {
            densities.push(profiles);
        }
    }

    let fit = |pick: fn(&Sample) -> PumpRate| {
        let (t, a): (Vec<f64>, Vec<f64>) = samples
            .iter()
            .filter(|s| s.field_free)
            .filter_map(|s| pick(s).value().map(|a| (s.time, a)))
            .unzip();
        fit_pump_beta(&t, &a)
    };
    Ok(TimeSeries {
        beta_electron: fit(|s| s.pump_electron),
        beta_positron: fit(|s| s.pump_positron),
        samples,
        dt,
        steps_per_period,
        n_keep: config.n_keep,
        n_project: config.n_project(),
        window,
        warnings,
        densities,
    })
}

/// Final pair number after one cycle for one upper bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub upper_bound: f64,
    pub final_n: f64,
    pub omega: f64,
    pub mode: String,
}

/// One-cycle runs over the given upper bounds (`W2` or `V2`).
///
/// Points run one after another with mode-level parallelism inside each, or
/// with `point_parallel` set, concurrently with sequential points.
pub fn adiabatic_sweep(
    base: &ScenarioConfig,
    upper_bounds: &[f64],
    point_parallel: bool,
) -> Result<Vec<SweepPoint>> {
    let omega = base
        .drive
        .omega()
        .ok_or_else(|| Error::InvalidSchedule("a sweep needs an oscillating drive".into()))?;
    let configs = upper_bounds
        .iter()
        .map(|&b| {
            let mut c = *base;
            c.drive = base.drive.with_upper_bound(b)?;
            c.n_cycles = 1;
            c.snapshots = SnapshotPolicy::FieldFree;
            c.keep_densities = false;
            if point_parallel {
                c.workers = Workers::Sequential;
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let outer = if point_parallel {
        base.workers
    } else {
        Workers::Sequential
    };
    outer
        .map_range(configs.len(), |i| {
            let series = run_scenario(&configs[i])?;
            Ok(SweepPoint {
                upper_bound: upper_bounds[i],
                final_n: series.last().map_or(0.0, |s| s.pair_number),
                omega,
                mode: base.drive.label().to_string(),
            })
        })
        .into_iter()
        .collect()
}

/// First time each species' edge density exceeded the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryArrival {
    /// `None` when the threshold was never reached.
    pub electron: Option<f64>,
    pub positron: Option<f64>,
    /// Light-travel estimate `L/(2c)`.
    pub estimate: f64,
    pub threshold: f64,
}

pub fn boundary_monitor(series: &TimeSeries, box_length: f64, threshold: f64) -> BoundaryArrival {
    let first = |pick: fn(&Sample) -> f64| {
        series
            .samples
            .iter()
            .find(|s| pick(s) > threshold)
            .map(|s| s.time)
    };
    BoundaryArrival {
        electron: first(|s| s.boundary_electron),
        positron: first(|s| s.boundary_positron),
        estimate: 0.5 * box_length / C,
        threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{C2, LAMBDA_C};
    use approx::assert_relative_eq;

    fn w_drive(w2: f64, omega: f64) -> DriveMode {
        DriveMode::WidthOsc {
            depth: 2.53 * C2,
            w_min: 0.0,
            w_max: w2 * LAMBDA_C,
            omega,
            edge: crate::potential::DEFAULT_EDGE,
        }
    }

    fn small(drive: DriveMode) -> ScenarioConfig {
        let mut c = ScenarioConfig::new(64, 2.5, drive, 1, 16);
        c.dt = Some(2e-5);
        c
    }

    #[test]
    fn sample_steps_include_field_free_instants() {
        assert_eq!(
            sample_steps(SnapshotPolicy::FieldFree, 10, 3),
            vec![0, 10, 20, 30]
        );
        assert_eq!(
            sample_steps(SnapshotPolicy::EverySteps(4), 10, 2),
            vec![0, 4, 8, 10, 12, 16, 20]
        );
    }

    #[test]
    fn dt_divides_the_period() {
        let c = small(w_drive(10.0, 0.3 * C2));
        let (steps, dt) = c.resolve_dt().unwrap();
        assert_relative_eq!(steps as f64 * dt, c.period().unwrap(), max_relative = 1e-14);
        assert!(dt <= 2e-5);
        let mut auto = c;
        auto.dt = None;
        let (_, dt) = auto.resolve_dt().unwrap();
        let bw = build_basis(
            &SpatialGrid::shared(64, 2.5).unwrap(),
            16,
            EnergySign::Negative,
        )
        .unwrap()
        .max_energy();
        assert!((2.53 * C2 + bw) * dt <= DEFAULT_DT_BUDGET * (1.0 + 1e-12));
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = small(w_drive(10.0, 0.3 * C2));
        c.n_cycles = 0;
        assert!(c.validate().is_err());
        let mut c = small(w_drive(10.0, 0.3 * C2));
        c.n_keep = 65;
        assert!(c.validate().is_err());
        let mut c = small(w_drive(10.0, 0.3 * C2));
        c.in_well_half_width = 2.0;
        assert!(c.validate().is_err());
        let c = small(DriveMode::Static {
            shape: crate::potential::WellShape::new(C2, LAMBDA_C, LAMBDA_C).unwrap(),
        });
        assert!(run_scenario(&c).is_err());
    }

    #[test]
    fn zero_amplitude_creates_nothing() {
        let mut c = small(w_drive(10.0, 0.3 * C2).zero_amplitude());
        c.snapshots = SnapshotPolicy::EverySteps(7);
        let s = run_scenario(&c).unwrap();
        assert!(s.samples.iter().all(|x| x.pair_number < 1e-10));
        assert!(s
            .samples
            .iter()
            .all(|x| x.pump_electron == PumpRate::NoPairs));
        let arrival = boundary_monitor(&s, 2.5, DEFAULT_BOUNDARY_THRESHOLD);
        assert_eq!(arrival.electron, None);
        assert_eq!(arrival.positron, None);
    }

    #[test]
    fn driven_run_is_consistent_and_worker_independent() {
        let mut c = small(w_drive(6.0, 0.3 * C2));
        c.snapshots = SnapshotPolicy::EverySteps(50);
        c.keep_densities = true;
        c.workers = Workers::Sequential;
        let a = run_scenario(&c).unwrap();
        c.workers = Workers::Fixed(3);
        let b = run_scenario(&c).unwrap();
        assert!(a.last().unwrap().pair_number > 1e-6);
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x.pair_number - y.pair_number).abs() <= 1e-10);
            for t in [x.electron_total, x.positron_total] {
                assert!((t - x.pair_number).abs() <= 1e-8 * x.pair_number.max(1e-300));
            }
            assert!(x.in_well_electron <= x.electron_total + 1e-12);
        }
        assert!(a.samples.windows(2).all(|w| w[1].time > w[0].time));
        assert_eq!(a.densities.len(), a.samples.len());
        assert_eq!(a.field_free().count(), 2);
        assert!(!a.warnings.is_empty() || a.samples.last().unwrap().time <= 0.5 * 2.5 / C);
    }

    #[test]
    fn sweep_reports_each_bound() {
        let c = small(w_drive(1.0, 0.3 * C2));
        let pts = adiabatic_sweep(&c, &[0.0, 2.0], false).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].mode, "W");
        assert!(pts[0].final_n < 1e-10);
        let par = adiabatic_sweep(&c, &[0.0, 2.0], true).unwrap();
        assert_eq!(pts, par);
    }
}
