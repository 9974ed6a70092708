//! Smooth-edged square well and its two oscillation modes.
//!
//! `V(z) = (V0/2)[tanh((z - W/2)/D) - tanh((z + W/2)/D)]`, which is `≈ -V0`
//! inside the well and vanishes outside. `V0` is stored as a positive depth.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::units::LAMBDA_C;

/// Edge width used throughout: `0.3 λ_C`.
pub const DEFAULT_EDGE: f64 = 0.3 * LAMBDA_C;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellShape {
    /// Depth magnitude `V0 ≥ 0`.
    pub depth: f64,
    /// Width `W ≥ 0`.
    pub width: f64,
    /// Edge width `D > 0`.
    pub edge: f64,
}

impl WellShape {
    pub fn new(depth: f64, width: f64, edge: f64) -> Result<Self> {
        let shape = Self { depth, width, edge };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.edge > 0.0) {
            return Err(Error::InvalidDrive(format!(
                "edge width must be positive, got {}",
                self.edge
            )));
        }
        if !(self.width >= 0.0) || !(self.depth >= 0.0) {
            return Err(Error::InvalidDrive(format!(
                "width and depth must be non-negative, got W={} V0={}",
                self.width, self.depth
            )));
        }
        Ok(())
    }

    /// Potential value at `z`; always `≤ 0` and even in `z`.
    pub fn profile(&self, z: f64) -> f64 {
        let half = 0.5 * self.width;
        0.5 * self.depth * (((z - half) / self.edge).tanh() - ((z + half) / self.edge).tanh())
    }
}

/// Free-function form of [`WellShape::profile`].
pub fn well_profile(shape: &WellShape, z: f64) -> f64 {
    shape.profile(z)
}

/// Time dependence of the well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DriveMode {
    Static {
        shape: WellShape,
    },
    /// Constant depth, width oscillating between `w_min` and `w_max`.
    WidthOsc {
        depth: f64,
        w_min: f64,
        w_max: f64,
        omega: f64,
        edge: f64,
    },
    /// Constant width, depth oscillating between `v_min` and `v_max`.
    DepthOsc {
        width: f64,
        v_min: f64,
        v_max: f64,
        omega: f64,
        edge: f64,
    },
}

/// `lo + ½(hi - lo)[1 + sin(ωt - π/2)]`, written as `lo + ½(hi - lo)(1 - cos ωt)`
/// so that whole periods return to `lo` without cancellation error.
fn oscillate(lo: f64, hi: f64, omega: f64, t: f64) -> f64 {
    lo + 0.5 * (hi - lo) * (1.0 - (omega * t).cos())
}

impl DriveMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DriveMode::Static { shape } => shape.validate(),
            DriveMode::WidthOsc {
                depth,
                w_min,
                w_max,
                omega,
                edge,
            } => {
                check_omega(omega)?;
                if !(w_max >= w_min && w_min >= 0.0) {
                    return Err(Error::InvalidDrive(format!(
                        "need W2 >= W1 >= 0, got W1={w_min} W2={w_max}"
                    )));
                }
                WellShape::new(depth, w_max, edge).map(|_| ())
            }
            DriveMode::DepthOsc {
                width,
                v_min,
                v_max,
                omega,
                edge,
            } => {
                check_omega(omega)?;
                if !(v_max >= v_min && v_min >= 0.0) {
                    return Err(Error::InvalidDrive(format!(
                        "need V2 >= V1 >= 0, got V1={v_min} V2={v_max}"
                    )));
                }
                WellShape::new(v_max, width, edge).map(|_| ())
            }
        }
    }

    /// Angular frequency, `None` for a static well.
    pub fn omega(&self) -> Option<f64> {
        match *self {
            DriveMode::Static { .. } => None,
            DriveMode::WidthOsc { omega, .. } | DriveMode::DepthOsc { omega, .. } => Some(omega),
        }
    }

    /// Drive period `2π/ω`.
    pub fn period(&self) -> Option<f64> {
        self.omega().map(|w| 2.0 * PI / w)
    }

    /// Instantaneous well shape at time `t`.
    pub fn shape_at(&self, t: f64) -> WellShape {
        match *self {
            DriveMode::Static { shape } => shape,
            DriveMode::WidthOsc {
                depth,
                w_min,
                w_max,
                omega,
                edge,
            } => WellShape {
                depth,
                width: oscillate(w_min, w_max, omega, t),
                edge,
            },
            DriveMode::DepthOsc {
                width,
                v_min,
                v_max,
                omega,
                edge,
            } => WellShape {
                depth: oscillate(v_min, v_max, omega, t),
                width,
                edge,
            },
        }
    }

    /// Largest `|V|` the drive ever reaches.
    pub fn max_depth(&self) -> f64 {
        match *self {
            DriveMode::Static { shape } => shape.depth,
            DriveMode::WidthOsc { depth, .. } => depth,
            DriveMode::DepthOsc { v_max, .. } => v_max,
        }
    }

    /// Copy of the drive with its amplitude switched off (`W2 = W1 = 0` or
    /// `V2 = V1 = 0`), which must produce no pairs at all.
    pub fn zero_amplitude(&self) -> Self {
        match *self {
            DriveMode::Static { shape } => DriveMode::Static {
                shape: WellShape {
                    depth: 0.0,
                    ..shape
                },
            },
            DriveMode::WidthOsc {
                depth, omega, edge, ..
            } => DriveMode::WidthOsc {
                depth,
                w_min: 0.0,
                w_max: 0.0,
                omega,
                edge,
            },
            DriveMode::DepthOsc {
                width, omega, edge, ..
            } => DriveMode::DepthOsc {
                width,
                v_min: 0.0,
                v_max: 0.0,
                omega,
                edge,
            },
        }
    }

    /// Upper bound of the oscillating parameter (`W2` or `V2`), `None` for a static well.
    pub fn upper_bound(&self) -> Option<f64> {
        match *self {
            DriveMode::Static { .. } => None,
            DriveMode::WidthOsc { w_max, .. } => Some(w_max),
            DriveMode::DepthOsc { v_max, .. } => Some(v_max),
        }
    }

    /// Copy with the oscillation's upper bound replaced.
    pub fn with_upper_bound(&self, bound: f64) -> Result<Self> {
        let mut out = *self;
        match &mut out {
            DriveMode::Static { .. } => {
                return Err(Error::InvalidDrive(
                    "a static well has no upper bound".into(),
                ))
            }
            DriveMode::WidthOsc { w_max, .. } => *w_max = bound,
            DriveMode::DepthOsc { v_max, .. } => *v_max = bound,
        }
        out.validate()?;
        Ok(out)
    }

    /// Short label, `"W"` for width oscillation and `"V"` for depth oscillation.
    pub fn label(&self) -> &'static str {
        match self {
            DriveMode::Static { .. } => "static",
            DriveMode::WidthOsc { .. } => "W",
            DriveMode::DepthOsc { .. } => "V",
        }
    }

    pub fn sample_into(&self, grid: &SpatialGrid, t: f64, out: &mut [f64]) {
        let shape = self.shape_at(t);
        for (v, &z) in out.iter_mut().zip(grid.positions()) {
            *v = shape.profile(z);
        }
    }

    /// Potential on the grid at time `t`.
    pub fn sample(&self, grid: &SpatialGrid, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; grid.n_z()];
        self.sample_into(grid, t, &mut out);
        out
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDrive(format!(
            "angular frequency must be positive, got {omega}"
        )))
    }
}

/// Width of a width-oscillating drive at time `t` (the drive's own depth is unchanged).
pub fn width_at(drive: &DriveMode, t: f64) -> f64 {
    drive.shape_at(t).width
}

/// Depth of a depth-oscillating drive at time `t`.
pub fn depth_at(drive: &DriveMode, t: f64) -> f64 {
    drive.shape_at(t).depth
}

/// Free-function form of [`DriveMode::sample`].
pub fn sample_potential(drive: &DriveMode, grid: &SpatialGrid, t: f64) -> Vec<f64> {
    drive.sample(grid, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::C2;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn width_drive(w_max: f64, omega: f64) -> DriveMode {
        DriveMode::WidthOsc {
            depth: 2.53 * C2,
            w_min: 0.0,
            w_max,
            omega,
            edge: DEFAULT_EDGE,
        }
    }

    fn depth_drive(v_max: f64, omega: f64) -> DriveMode {
        DriveMode::DepthOsc {
            width: 10.0 * LAMBDA_C,
            v_min: 0.0,
            v_max,
            omega,
            edge: DEFAULT_EDGE,
        }
    }

    #[test]
    fn width_law_endpoints() {
        let omega = 0.3 * C2;
        let d = DriveMode::WidthOsc {
            depth: 2.53 * C2,
            w_min: 1.0 * LAMBDA_C,
            w_max: 10.0 * LAMBDA_C,
            omega,
            edge: DEFAULT_EDGE,
        };
        assert_relative_eq!(width_at(&d, 0.0), 1.0 * LAMBDA_C);
        assert_relative_eq!(
            width_at(&d, PI / omega),
            10.0 * LAMBDA_C,
            max_relative = 1e-14
        );
        // zero slope at switch-on
        let h = 1e-9 / omega;
        assert!((width_at(&d, h) - width_at(&d, 0.0)).abs() / h < 1e-6 * LAMBDA_C * omega);
    }

    #[test]
    fn width_period_matches_quoted_value() {
        let d = width_drive(10.0 * LAMBDA_C, 0.3 * C2);
        let period = d.period().unwrap();
        assert_relative_eq!(period, 1.115e-3, max_relative = 1e-3);
        assert!((period - 1.12e-3).abs() < 0.01e-3);
    }

    #[test]
    fn depth_law_endpoints() {
        let d = depth_drive(2.53 * C2, C2 / 60.0);
        let period = d.period().unwrap();
        assert_eq!(depth_at(&d, 0.0), 0.0);
        assert_relative_eq!(depth_at(&d, 0.5 * period), 2.53 * C2, max_relative = 1e-14);
        assert!(depth_at(&d, period).abs() < 1e-12 * C2);
    }

    #[test]
    fn profile_center_and_tails() {
        let shape = WellShape::new(2.53 * C2, 10.0 * LAMBDA_C, DEFAULT_EDGE).unwrap();
        let expected = -2.53 * C2 * (10.0 / 0.6f64).tanh();
        assert_relative_eq!(shape.profile(0.0), expected, max_relative = 1e-14);
        assert_relative_eq!(shape.profile(0.0), -2.53 * C2, max_relative = 1e-13);
        assert!(shape.profile(1.25).abs() < 1e-10 * shape.depth);
        assert!(shape.profile(-1.25).abs() < 1e-10 * shape.depth);

        let flat = WellShape::new(2.53 * C2, 0.0, DEFAULT_EDGE).unwrap();
        for z in [-1.0, -1e-3, 0.0, 0.02] {
            assert_eq!(flat.profile(z), 0.0);
        }
    }

    #[test]
    fn rejects_invalid_drives() {
        assert!(WellShape::new(1.0, 1.0, 0.0).is_err());
        assert!(WellShape::new(-1.0, 1.0, 0.1).is_err());
        assert!(width_drive(1.0, 0.0).validate().is_err());
        let bad = DriveMode::WidthOsc {
            depth: 1.0,
            w_min: 2.0,
            w_max: 1.0,
            omega: 1.0,
            edge: 0.1,
        };
        assert!(bad.validate().is_err());
        assert!(depth_drive(1.0, 1.0).validate().is_ok());
    }

    #[test]
    fn switched_off_drives_sample_to_zero() {
        let grid = SpatialGrid::new(256, 2.5).unwrap();
        let w = width_drive(10.0 * LAMBDA_C, 0.3 * C2);
        assert!(w.sample(&grid, 0.0).iter().all(|&v| v == 0.0));
        let v = depth_drive(2.53 * C2, 0.3 * C2);
        assert!(v.sample(&grid, 0.0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn static_minimum_at_center() {
        let grid = SpatialGrid::new(512, 2.5).unwrap();
        let shape = WellShape::new(2.53 * C2, 10.0 * LAMBDA_C, DEFAULT_EDGE).unwrap();
        let v = DriveMode::Static { shape }.sample(&grid, 123.0);
        let (imin, vmin) =
            v.iter().enumerate().fold(
                (0, f64::MAX),
                |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc },
            );
        assert_eq!(grid.positions()[imin], 0.0);
        assert_relative_eq!(vmin, -2.53 * C2, max_relative = 1e-13);
    }

    proptest! {
        #[test]
        fn sampled_potential_is_even(t in 0.0f64..2e-3, w in 0.0f64..20.0) {
            let grid = SpatialGrid::new(128, 2.5).unwrap();
            let d = width_drive(w * LAMBDA_C, 0.3 * C2);
            let v = d.sample(&grid, t);
            let n = grid.n_z();
            for j in 1..n {
                prop_assert!((v[j] - v[n - j]).abs() <= 1e-12 * C2);
            }
            prop_assert!(v.iter().all(|&x| x <= 0.0));
        }

        #[test]
        fn sampled_potential_is_periodic(t in 0.0f64..5e-3, cycles in 1u32..20) {
            let grid = SpatialGrid::new(64, 2.5).unwrap();
            for d in [width_drive(10.0 * LAMBDA_C, 0.3 * C2), depth_drive(2.53 * C2, 0.3 * C2)] {
                let period = d.period().unwrap();
                let a = d.sample(&grid, t);
                let b = d.sample(&grid, t + cycles as f64 * period);
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() <= 1e-9 * C2);
                }
            }
        }

        #[test]
        fn wider_upper_bound_never_raises_potential(t in 0.0f64..2e-3, w in 0.0f64..15.0, dw in 0.0f64..5.0) {
            let grid = SpatialGrid::new(128, 2.5).unwrap();
            let a = width_drive(w * LAMBDA_C, 0.3 * C2).sample(&grid, t);
            let b = width_drive((w + dw) * LAMBDA_C, 0.3 * C2).sample(&grid, t);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!(*y <= *x + 1e-12 * C2);
            }
        }
    }
}
