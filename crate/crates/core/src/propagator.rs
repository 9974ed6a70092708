//! Strang-split spectral propagation of spinor fields.
//!
//! One step is `K(dt/2) · P(dt) · K(dt/2)` where `K` is the exact free
//! propagator applied in momentum space (a 2×2 unitary per lattice momentum)
//! and `P` is the pointwise phase `e^{-i V dt}` with `V` sampled at the step
//! midpoint. Consecutive half kinetic steps are fused, so a run of `n` steps
//! costs `2n + 2` batched FFTs per field.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, SpinorField};
use crate::potential::DriveMode;
use crate::spectral::SpectralTransform;
use crate::units::{C, C2};

/// `e^{-iτh(k)}` for `h(k) = c k σ₁ + c² σ₃`, stored as the symmetric matrix
/// `[[diag_upper, off], [off, diag_lower]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticFactor {
    pub diag_upper: Complex64,
    pub off: Complex64,
    pub diag_lower: Complex64,
}

impl KineticFactor {
    /// `cos φ · I − i sin φ · (k σ₁ + c σ₃)/√(c² + k²)` with `φ = c τ √(c² + k²)`.
    pub fn new(k: f64, tau: f64) -> Self {
        let root = (C2 + k * k).sqrt();
        let phi = C * tau * root;
        let (s, c) = phi.sin_cos();
        let mass = C / root;
        let mom = k / root;
        Self {
            diag_upper: Complex64::new(c, -s * mass),
            off: Complex64::new(0.0, -s * mom),
            diag_lower: Complex64::new(c, s * mass),
        }
    }

    fn scaled(self, f: f64) -> Self {
        Self {
            diag_upper: self.diag_upper * f,
            off: self.off * f,
            diag_lower: self.diag_lower * f,
        }
    }

    #[inline]
    fn apply(&self, upper: &mut Complex64, lower: &mut Complex64) {
        let (a, b) = (*upper, *lower);
        *upper = self.diag_upper * a + self.off * b;
        *lower = self.off * a + self.diag_lower * b;
    }
}

/// Pointwise potential phases `e^{-i V(z_j, t_s) dt}` for a run of steps,
/// `t_s = t0 + (s + ½) dt`. Static drives store one row.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    n_z: usize,
    steps: usize,
    rows: usize,
    data: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(drive: &DriveMode, grid: &SpatialGrid, t0: f64, dt: f64, steps: usize) -> Self {
        let n = grid.n_z();
        let rows = match drive {
            DriveMode::Static { .. } => steps.min(1),
            _ => steps,
        };
        let mut data = vec![Complex64::new(0.0, 0.0); rows * n];
        let mut v = vec![0.0; n];
        for (s, row) in data.chunks_exact_mut(n).enumerate() {
            drive.sample_into(grid, t0 + (s as f64 + 0.5) * dt, &mut v);
            for (p, &x) in row.iter_mut().zip(&v) {
                *p = Complex64::from_polar(1.0, -x * dt);
            }
        }
        Self {
            n_z: n,
            steps,
            rows,
            data,
        }
    }

    /// A table repeating one sampled potential for `steps` steps.
    pub fn from_potential(v: &[f64], dt: f64, steps: usize) -> Self {
        let rows = steps.min(1);
        let data = if rows == 0 {
            Vec::new()
        } else {
            v.iter()
                .map(|&x| Complex64::from_polar(1.0, -x * dt))
                .collect()
        };
        Self {
            n_z: v.len(),
            steps,
            rows,
            data,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn row(&self, s: usize) -> &[Complex64] {
        let r = if self.rows == 1 { 0 } else { s };
        &self.data[r * self.n_z..(r + 1) * self.n_z]
    }
}

/// Per-caller FFT scratch.
#[derive(Debug, Clone)]
pub struct Workspace {
    scratch: Vec<Complex64>,
}

/// Split-step propagator for a fixed grid and (signed) time step.
#[derive(Debug, Clone)]
pub struct SplitStepPropagator {
    grid: Arc<SpatialGrid>,
    transform: SpectralTransform,
    dt: f64,
    // both pre-divided by n_z, which absorbs the scale of the raw FFT pair
    half: Vec<KineticFactor>,
    full: Vec<KineticFactor>,
}

impl SplitStepPropagator {
    pub fn new(grid: Arc<SpatialGrid>, dt: f64) -> Self {
        let n = grid.n_z();
        let inv_n = 1.0 / n as f64;
        let half = grid
            .momenta()
            .iter()
            .map(|&k| KineticFactor::new(k, 0.5 * dt).scaled(inv_n))
            .collect();
        let full = grid
            .momenta()
            .iter()
            .map(|&k| KineticFactor::new(k, dt).scaled(inv_n))
            .collect();
        Self {
            transform: SpectralTransform::new(n),
            grid,
            dt,
            half,
            full,
        }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn transform(&self) -> &SpectralTransform {
        &self.transform
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            scratch: self.transform.scratch(),
        }
    }

    fn apply_kinetic(&self, buf: &mut [Complex64], factors: &[KineticFactor]) {
        let (u, l) = buf.split_at_mut(self.grid.n_z());
        for ((a, b), f) in u.iter_mut().zip(l.iter_mut()).zip(factors) {
            f.apply(a, b);
        }
    }

    /// Advance `field` by `phases.steps()` Strang steps.
    pub fn advance_with_phases(
        &self,
        field: &mut SpinorField,
        phases: &PhaseTable,
        ws: &mut Workspace,
    ) -> Result<()> {
        if !field.grid().same_lattice(&self.grid) {
            return Err(Error::GridMismatch);
        }
        if phases.n_z != self.grid.n_z() && phases.steps > 0 {
            return Err(Error::LengthMismatch {
                expected: self.grid.n_z(),
                got: phases.n_z,
            });
        }
        let steps = phases.steps();
        if steps == 0 {
            return Ok(());
        }
        let n = self.grid.n_z();
        let buf = field.as_mut_slice();
        let scratch = &mut ws.scratch;
        self.transform.forward_raw(buf, scratch);
        self.apply_kinetic(buf, &self.half);
        for s in 0..steps {
            self.transform.inverse_raw(buf, scratch);
            let row = phases.row(s);
            let (u, l) = buf.split_at_mut(n);
            for ((a, b), p) in u.iter_mut().zip(l.iter_mut()).zip(row) {
                *a *= p;
                *b *= p;
            }
            self.transform.forward_raw(buf, scratch);
            let k = if s + 1 == steps {
                &self.half
            } else {
                &self.full
            };
            self.apply_kinetic(buf, k);
        }
        self.transform.inverse_raw(buf, scratch);
        Ok(())
    }

    /// Advance `field` by `steps` steps from `t0` under `drive`.
    pub fn advance(
        &self,
        field: &mut SpinorField,
        drive: &DriveMode,
        t0: f64,
        steps: usize,
        ws: &mut Workspace,
    ) -> Result<()> {
        let phases = PhaseTable::new(drive, &self.grid, t0, self.dt, steps);
        self.advance_with_phases(field, &phases, ws)
    }

    /// Apply `e^{-i τ H_free}` exactly, with `τ = dt/2` for the half step.
    pub fn apply_free(&self, field: &mut SpinorField, tau: f64, ws: &mut Workspace) {
        let factors: Vec<KineticFactor> = self
            .grid
            .momenta()
            .iter()
            .map(|&k| KineticFactor::new(k, tau))
            .collect();
        let buf = field.as_mut_slice();
        self.transform.forward(buf, &mut ws.scratch);
        self.apply_kinetic(buf, &factors);
        self.transform.inverse(buf, &mut ws.scratch);
    }
}

/// `e^{-i (dt/2) H_free}` applied through momentum space.
pub fn kinetic_half_step(field: &SpinorField, dt: f64) -> SpinorField {
    let prop = SplitStepPropagator::new(field.grid().clone(), dt);
    let mut ws = prop.workspace();
    let mut out = field.clone();
    prop.apply_free(&mut out, 0.5 * dt, &mut ws);
    out
}

/// Pointwise `e^{-i V(z_j) dt}` on both components.
pub fn potential_step(field: &SpinorField, v: &[f64], dt: f64) -> Result<SpinorField> {
    let n = field.grid().n_z();
    if v.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let mut out = field.clone();
    let (u, l) = out.components_mut();
    for ((a, b), &x) in u.iter_mut().zip(l.iter_mut()).zip(v) {
        let p = Complex64::from_polar(1.0, -x * dt);
        *a *= p;
        *b *= p;
    }
    Ok(out)
}

/// One Strang step from `t` to `t + dt`, potential sampled at `t + dt/2`.
pub fn strang_step(field: &SpinorField, drive: &DriveMode, t: f64, dt: f64) -> SpinorField {
    let prop = SplitStepPropagator::new(field.grid().clone(), dt);
    let mut ws = prop.workspace();
    let mut out = field.clone();
    prop.advance(&mut out, drive, t, 1, &mut ws)
        .expect("field and propagator share a grid");
    out
}

/// Uniform step schedule starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSchedule {
    dt: f64,
    n_steps: usize,
    snapshot_steps: Vec<usize>,
}

impl StepSchedule {
    /// `t_final/dt` must be an integer to 1e-9; snapshot times must sit on step boundaries.
    pub fn new(dt: f64, t_final: f64, snapshot_times: &[f64]) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if !(t_final >= 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "final time must be non-negative, got {t_final}"
            )));
        }
        let n_steps = whole_steps(t_final, dt).ok_or_else(|| {
            Error::InvalidSchedule(format!(
                "t_final={t_final} is not a whole number of dt={dt}"
            ))
        })?;
        let snapshot_steps = snapshot_times
            .iter()
            .map(|&t| {
                whole_steps(t, dt).filter(|&s| s <= n_steps).ok_or_else(|| {
                    Error::InvalidSchedule(format!("snapshot time {t} is off the step grid"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_steps(dt, n_steps, snapshot_steps)
    }

    pub fn from_steps(dt: f64, n_steps: usize, mut snapshot_steps: Vec<usize>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if snapshot_steps.iter().any(|&s| s > n_steps) {
            return Err(Error::InvalidSchedule(
                "snapshot after the final step".into(),
            ));
        }
        snapshot_steps.sort_unstable();
        snapshot_steps.dedup();
        Ok(Self {
            dt,
            n_steps,
            snapshot_steps,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn t_final(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    pub fn snapshot_steps(&self) -> &[usize] {
        &self.snapshot_steps
    }
}

fn whole_steps(t: f64, dt: f64) -> Option<usize> {
    let x = t / dt;
    let r = x.round();
    ((x - r).abs() <= 1e-9 * r.max(1.0) && r >= 0.0).then_some(r as usize)
}

/// Output of [`evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub final_field: SpinorField,
    /// `(step, time, field)` at each requested snapshot step.
    pub snapshots: Vec<(usize, f64, SpinorField)>,
}

/// Repeated Strang steps under `drive`, recording snapshots.
pub fn evolve(
    initial: &SpinorField,
    drive: &DriveMode,
    schedule: &StepSchedule,
) -> Result<Evolution> {
    let prop = SplitStepPropagator::new(initial.grid().clone(), schedule.dt());
    let mut ws = prop.workspace();
    let mut field = initial.clone();
    let mut snapshots = Vec::with_capacity(schedule.snapshot_steps().len());
    let mut done = 0usize;
    for &stop in schedule.snapshot_steps() {
        prop.advance(
            &mut field,
            drive,
            done as f64 * schedule.dt(),
            stop - done,
            &mut ws,
        )?;
        done = stop;
        snapshots.push((stop, stop as f64 * schedule.dt(), field.clone()));
    }
    prop.advance(
        &mut field,
        drive,
        done as f64 * schedule.dt(),
        schedule.n_steps() - done,
        &mut ws,
    )?;
    Ok(Evolution {
        final_field: field,
        snapshots,
    })
}

/// Largest step with `(max|V| + bandwidth)·dt ≤ budget`.
pub fn dt_bound(max_abs_potential: f64, bandwidth: f64, budget: f64) -> f64 {
    budget / (max_abs_potential + bandwidth)
}
