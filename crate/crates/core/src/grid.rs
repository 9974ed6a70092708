//! Periodic position grid, its conjugate momentum lattice, and two-component
//! spinor fields living on it.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform periodic grid `z_j = -L/2 + j dz` with momenta in DFT index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    n_z: usize,
    box_length: f64,
    dz: f64,
    positions: Vec<f64>,
    momenta: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(n_z: usize, box_length: f64) -> Result<Self> {
        if n_z < 4 || !n_z.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and at least 4, got {n_z}"
            )));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        let dz = box_length / n_z as f64;
        let positions = (0..n_z)
            .map(|j| -0.5 * box_length + j as f64 * dz)
            .collect();
        let momenta = (0..n_z)
            .map(|m| 2.0 * PI * signed_index(m, n_z) as f64 / box_length)
            .collect();
        Ok(Self {
            n_z,
            box_length,
            dz,
            positions,
            momenta,
        })
    }

    /// Shared handle, the form every field carries.
    pub fn shared(n_z: usize, box_length: f64) -> Result<Arc<Self>> {
        Self::new(n_z, box_length).map(Arc::new)
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Momenta `2π m̃ / L` in DFT index order, `m̃ ∈ [-n_z/2, n_z/2)`.
    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn max_momentum(&self) -> f64 {
        PI * self.n_z as f64 / self.box_length
    }

    /// Signed lattice index of DFT slot `m`.
    pub fn signed_index(&self, m: usize) -> i64 {
        signed_index(m, self.n_z)
    }

    /// DFT slot of momentum `k`, if `k` lies on the lattice.
    pub fn lattice_index(&self, k: f64) -> Option<usize> {
        let x = k * self.box_length / (2.0 * PI);
        let r = x.round();
        if (x - r).abs() > 1e-8 * (1.0 + r.abs()) {
            return None;
        }
        let r = r as i64;
        let half = (self.n_z / 2) as i64;
        if r < -half || r >= half {
            return None;
        }
        Some(r.rem_euclid(self.n_z as i64) as usize)
    }

    /// Grids are compatible when they describe the same lattice.
    pub fn same_lattice(&self, other: &SpatialGrid) -> bool {
        self.n_z == other.n_z && self.box_length == other.box_length
    }
}

fn signed_index(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// One two-component Dirac state sampled on a grid.
///
/// Storage is `[upper | lower]`, contiguous, so both components can be
/// transformed with a single batched FFT call.
#[derive(Debug, Clone)]
pub struct SpinorField {
    grid: Arc<SpatialGrid>,
    data: Vec<Complex64>,
}

impl SpinorField {
    pub fn zeros(grid: Arc<SpatialGrid>) -> Self {
        let n = grid.n_z();
        Self {
            grid,
            data: vec![Complex64::new(0.0, 0.0); 2 * n],
        }
    }

    pub fn from_components(
        grid: Arc<SpatialGrid>,
        upper: Vec<Complex64>,
        lower: Vec<Complex64>,
    ) -> Result<Self> {
        let n = grid.n_z();
        for part in [&upper, &lower] {
            if part.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: part.len(),
                });
            }
        }
        let mut data = upper;
        data.extend(lower);
        Ok(Self { grid, data })
    }

    pub(crate) fn from_raw(grid: Arc<SpatialGrid>, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), 2 * grid.n_z());
        Self { grid, data }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn upper(&self) -> &[Complex64] {
        &self.data[..self.grid.n_z()]
    }

    pub fn lower(&self) -> &[Complex64] {
        &self.data[self.grid.n_z()..]
    }

    pub fn components_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        let n = self.grid.n_z();
        self.data.split_at_mut(n)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<Complex64> {
        self.data
    }

    /// `dz Σ_j (|upper_j|² + |lower_j|²)`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid.dz() * self.data.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.data.iter_mut().for_each(|a| *a *= factor);
    }

    /// Pointwise density `|upper_j|² + |lower_j|²`.
    pub fn density(&self) -> Vec<f64> {
        self.upper()
            .iter()
            .zip(self.lower())
            .map(|(u, l)| u.norm_sqr() + l.norm_sqr())
            .collect()
    }

    /// `⟨self|other⟩ = dz Σ_j (conj(a↑)b↑ + conj(a↓)b↓)`.
    pub fn inner(&self, other: &SpinorField) -> Result<Complex64> {
        inner_product(self, other)
    }
}

/// Discrete inner product; conjugate-linear in `a`.
pub fn inner_product(a: &SpinorField, b: &SpinorField) -> Result<Complex64> {
    if !a.grid.same_lattice(&b.grid) {
        return Err(Error::GridMismatch);
    }
    let sum: Complex64 = a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum();
    Ok(sum * a.grid.dz())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn paper_resolution_grid() {
        let g = SpatialGrid::new(2048, 2.5).unwrap();
        assert_relative_eq!(g.dz(), 2.5 / 2048.0);
        assert_relative_eq!(g.dz(), 1.2207e-3, max_relative = 1e-4);
        assert_relative_eq!(g.max_momentum(), 2573.6, max_relative = 1e-4);
    }

    #[test]
    fn four_point_lattice_in_dft_order() {
        let g = SpatialGrid::new(4, 2.0).unwrap();
        let expected = [0.0, PI, -2.0 * PI, -PI];
        for (k, e) in g.momenta().iter().zip(expected) {
            assert_relative_eq!(*k, e, epsilon = 1e-15);
        }
        assert_eq!(g.positions(), &[-1.0, -0.5, 0.0, 0.5]);
    }

    #[test]
    fn reduced_grid_spacing() {
        let g = SpatialGrid::new(512, 2.5).unwrap();
        assert_relative_eq!(g.dz(), 4.8828e-3, max_relative = 1e-4);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SpatialGrid::new(7, 1.0).is_err());
        assert!(SpatialGrid::new(2, 1.0).is_err());
        assert!(SpatialGrid::new(8, 0.0).is_err());
        assert!(SpatialGrid::new(8, -1.0).is_err());
        assert!(SpatialGrid::new(8, f64::NAN).is_err());
    }

    #[test]
    fn lattice_lookup() {
        let g = SpatialGrid::new(8, 2.0).unwrap();
        for (m, &k) in g.momenta().iter().enumerate() {
            assert_eq!(g.lattice_index(k), Some(m));
        }
        assert_eq!(g.lattice_index(0.5), None);
        // +n/2 aliases onto the Nyquist slot, which is stored as -n/2.
        assert_eq!(g.lattice_index(4.0 * PI), None);
    }

    #[test]
    fn inner_product_linearity_and_mismatch() {
        let g = SpatialGrid::shared(8, 2.0).unwrap();
        let n = g.n_z();
        let amp = Complex64::new(0.5, 0.0);
        let a = SpinorField::from_components(g.clone(), vec![amp; n], vec![amp; n]).unwrap();
        let norm = a.norm_sqr();
        assert_relative_eq!(norm, 1.0);
        let mut b = a.clone();
        b.scale(Complex64::i());
        let ip = inner_product(&a, &b).unwrap();
        assert_relative_eq!(ip.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(ip.im, norm, epsilon = 1e-15);

        let other = SpatialGrid::shared(16, 2.0).unwrap();
        let c = SpinorField::zeros(other);
        assert!(matches!(inner_product(&a, &c), Err(Error::GridMismatch)));
        assert!(SpinorField::from_components(g, vec![amp; 3], vec![amp; n]).is_err());
    }
}
