//! Unitary DFT on spinor fields, shared by the propagator and the observables.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse plans for one grid size, scaled so the pair is unitary
/// (`1/√n` each way). Plans are `Send + Sync`; scratch is per caller.
#[derive(Clone)]
pub struct SpectralTransform {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralTransform")
            .field("n", &self.n)
            .finish()
    }
}

impl SpectralTransform {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Self {
            n,
            forward,
            inverse,
            scale: 1.0 / (n as f64).sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        let len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        vec![Complex64::new(0.0, 0.0); len]
    }

    /// Unitary forward transform of every length-`n` chunk of `buf`.
    pub fn forward(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
        let s = self.scale;
        buf.iter_mut().for_each(|a| *a *= s);
    }

    /// Unitary inverse transform of every length-`n` chunk of `buf`.
    pub fn inverse(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
        let s = self.scale;
        buf.iter_mut().for_each(|a| *a *= s);
    }

    /// Unnormalized transforms, for callers that fold the scale into other factors.
    pub fn forward_raw(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    pub fn inverse_raw(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip_preserves_norm(
            values in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64)
        ) {
            let t = SpectralTransform::new(32);
            let mut buf: Vec<Complex64> = values.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let orig = buf.clone();
            let norm0: f64 = buf.iter().map(|a| a.norm_sqr()).sum();
            let mut scratch = t.scratch();
            t.forward(&mut buf, &mut scratch);
            let norm1: f64 = buf.iter().map(|a| a.norm_sqr()).sum();
            t.inverse(&mut buf, &mut scratch);
            let norm2: f64 = buf.iter().map(|a| a.norm_sqr()).sum();
            if norm0 > 1e-12 {
                prop_assert!(((norm1 - norm0) / norm0).abs() < 1e-13);
                prop_assert!(((norm2 - norm0) / norm0).abs() < 1e-13);
            }
            for (a, b) in buf.iter().zip(&orig) {
                prop_assert!((a - b).norm() < 1e-13);
            }
        }
    }
}
