//! Pair number, spatial densities and pumping diagnostics from the overlap
//! matrix `U_pn = ⟨W_p | W_n(t)⟩`.
//!
//! All basis modes are plane waves, so every sum over a basis is done as one
//! FFT plus a per-momentum spinor contraction. Reductions over modes run in a
//! fixed index order, which keeps results bit-identical for any worker count.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisSet, FreeMode};
use crate::error::{Error, Result};
use crate::exec::Workers;
use crate::grid::{SpatialGrid, SpinorField};
use crate::spectral::SpectralTransform;
use crate::units::LAMBDA_C;

/// Default half-width of the in-well window, `5 λ_C`.
pub const DEFAULT_IN_WELL_HALF_WIDTH: f64 = 5.0 * LAMBDA_C;

/// `U[p][n]`, rows in positive-basis order, columns in evolved-mode order.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
    pub time: f64,
}

impl OverlapMatrix {
    pub fn zeros(rows: usize, cols: usize, time: f64) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
            time,
        }
    }

    /// Assemble from per-column vectors (one per evolved mode).
    pub fn from_columns(columns: &[Vec<Complex64>], rows: usize, time: f64) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len(), time);
        for (n, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::LengthMismatch {
                    expected: rows,
                    got: col.len(),
                });
            }
            for (p, &u) in col.iter().enumerate() {
                m.entries[p * m.cols + n] = u;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, p: usize, n: usize) -> Complex64 {
        self.entries[p * self.cols + n]
    }

    pub fn set(&mut self, p: usize, n: usize, value: Complex64) {
        self.entries[p * self.cols + n] = value;
    }

    pub fn row(&self, p: usize) -> &[Complex64] {
        &self.entries[p * self.cols..(p + 1) * self.cols]
    }

    /// `Σ_p |U_pn|²` for each column.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for p in 0..self.rows {
            for (acc, u) in out.iter_mut().zip(self.row(p)) {
                *acc += u.norm_sqr();
            }
        }
        out
    }
}

/// Projects fields onto a positive basis and rebuilds densities from an
/// overlap matrix. Holds the FFT plans for one grid.
#[derive(Debug, Clone)]
pub struct Projector {
    transform: SpectralTransform,
}

impl Projector {
    pub fn new(grid: &SpatialGrid) -> Self {
        Self {
            transform: SpectralTransform::new(grid.n_z()),
        }
    }

    /// `U_pn` for one evolved field against every mode of `positive`.
    ///
    /// `⟨W_p|ψ⟩ = (√L / n_z) (-1)^m u_p · Σ_j ψ_j e^{-2πi m j / n_z}`.
    pub fn overlap_column(
        &self,
        field: &SpinorField,
        positive: &BasisSet,
    ) -> Result<Vec<Complex64>> {
        let grid = positive.grid();
        if !field.grid().same_lattice(grid) {
            return Err(Error::GridMismatch);
        }
        let n = grid.n_z();
        let mut buf = field.as_slice().to_vec();
        let mut scratch = self.transform.scratch();
        self.transform.forward_raw(&mut buf, &mut scratch);
        let scale = grid.box_length().sqrt() / n as f64;
        let (u, l) = buf.split_at(n);
        Ok(positive
            .modes()
            .iter()
            .map(|m| {
                let [a, b] = m.spinor();
                (u[m.slot] * a + l[m.slot] * b) * (scale * m.edge_phase())
            })
            .collect())
    }

    /// Fill `buf` with `Σ_i c_i W_i(z_j)` in `[upper | lower]` layout.
    fn superpose_into(
        &self,
        grid: &SpatialGrid,
        modes: &[FreeMode],
        coeffs: impl Iterator<Item = Complex64>,
        buf: &mut Vec<Complex64>,
        scratch: &mut [Complex64],
    ) {
        let n = grid.n_z();
        buf.clear();
        buf.resize(2 * n, Complex64::new(0.0, 0.0));
        let amp = 1.0 / grid.box_length().sqrt();
        for (m, c) in modes.iter().zip(coeffs) {
            let [a, b] = m.spinor();
            let w = c * (amp * m.edge_phase());
            buf[m.slot] += w * a;
            buf[n + m.slot] += w * b;
        }
        self.transform.inverse_raw(buf, scratch);
    }

    /// The field `Σ_i c_i W_i` for plane-wave modes `W_i`.
    pub fn superpose(
        &self,
        grid: &Arc<SpatialGrid>,
        modes: &[FreeMode],
        coeffs: &[Complex64],
    ) -> SpinorField {
        let mut buf = Vec::new();
        let mut scratch = self.transform.scratch();
        self.superpose_into(grid, modes, coeffs.iter().copied(), &mut buf, &mut scratch);
        SpinorField::from_raw(grid.clone(), buf)
    }

    /// `|Σ_i c_i W_i(z)|²` on the grid.
    fn superposition_density(
        &self,
        grid: &SpatialGrid,
        modes: &[FreeMode],
        coeffs: impl Iterator<Item = Complex64>,
        buf: &mut Vec<Complex64>,
        scratch: &mut [Complex64],
    ) -> Vec<f64> {
        self.superpose_into(grid, modes, coeffs, buf, scratch);
        let (u, l) = buf.split_at(grid.n_z());
        u.iter()
            .zip(l)
            .map(|(x, y)| x.norm_sqr() + y.norm_sqr())
            .collect()
    }

    /// `N_z^el(z) = Σ_n |Σ_p U_pn W_p(z)|²`.
    pub fn electron_density(
        &self,
        u: &OverlapMatrix,
        positive: &BasisSet,
        workers: Workers,
    ) -> Result<DensityProfile> {
        check_rows(u, positive)?;
        let grid = positive.grid();
        let parts = workers.map_range(u.cols(), |n| {
            let mut buf = Vec::new();
            let mut scratch = self.transform.scratch();
            self.superposition_density(
                grid,
                positive.modes(),
                (0..u.rows()).map(|p| u.get(p, n)),
                &mut buf,
                &mut scratch,
            )
        });
        Ok(DensityProfile::from_parts(
            grid,
            Species::Electron,
            u.time,
            parts,
        ))
    }

    /// `N_z^po(z) = Σ_p |Σ_n U_pn W_n(z)|²`.
    pub fn positron_density(
        &self,
        u: &OverlapMatrix,
        negative: &BasisSet,
        workers: Workers,
    ) -> Result<DensityProfile> {
        if negative.len() != u.cols() {
            return Err(Error::LengthMismatch {
                expected: u.cols(),
                got: negative.len(),
            });
        }
        let grid = negative.grid();
        let parts = workers.map_range(u.rows(), |p| {
            let mut buf = Vec::new();
            let mut scratch = self.transform.scratch();
            self.superposition_density(
                grid,
                negative.modes(),
                u.row(p).iter().copied(),
                &mut buf,
                &mut scratch,
            )
        });
        Ok(DensityProfile::from_parts(
            grid,
            Species::Positron,
            u.time,
            parts,
        ))
    }
}

fn check_rows(u: &OverlapMatrix, positive: &BasisSet) -> Result<()> {
    if positive.len() != u.rows() {
        return Err(Error::LengthMismatch {
            expected: u.rows(),
            got: positive.len(),
        });
    }
    Ok(())
}

/// `U[p][n] = ⟨W_p | evolved_n⟩`.
pub fn overlap_matrix(
    evolved: &[SpinorField],
    positive: &BasisSet,
    time: f64,
) -> Result<OverlapMatrix> {
    let proj = Projector::new(positive.grid());
    let cols = evolved
        .iter()
        .map(|f| proj.overlap_column(f, positive))
        .collect::<Result<Vec<_>>>()?;
    OverlapMatrix::from_columns(&cols, positive.len(), time)
}

/// `N = Σ_pn |U_pn|²`, summed row-major.
pub fn pair_number(u: &OverlapMatrix) -> f64 {
    u.entries.iter().map(|x| x.norm_sqr()).sum()
}

pub fn electron_density(u: &OverlapMatrix, positive: &BasisSet) -> Result<DensityProfile> {
    Projector::new(positive.grid()).electron_density(u, positive, Workers::Sequential)
}

pub fn positron_density(u: &OverlapMatrix, negative: &BasisSet) -> Result<DensityProfile> {
    Projector::new(negative.grid()).positron_density(u, negative, Workers::Sequential)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Electron,
    Positron,
}

/// Particle density on the grid (particles per a.u. length).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub values: Vec<f64>,
    pub species: Species,
    pub time: f64,
    dz: f64,
    positions: Vec<f64>,
}

impl DensityProfile {
    pub fn new(grid: &SpatialGrid, species: Species, time: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_z() {
            return Err(Error::LengthMismatch {
                expected: grid.n_z(),
                got: values.len(),
            });
        }
        Ok(Self {
            values,
            species,
            time,
            dz: grid.dz(),
            positions: grid.positions().to_vec(),
        })
    }

    fn from_parts(grid: &SpatialGrid, species: Species, time: f64, parts: Vec<Vec<f64>>) -> Self {
        let mut values = vec![0.0; grid.n_z()];
        for part in &parts {
            for (v, x) in values.iter_mut().zip(part) {
                *v += x;
            }
        }
        Self {
            values,
            species,
            time,
            dz: grid.dz(),
            positions: grid.positions().to_vec(),
        }
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    /// `dz Σ values`.
    pub fn total(&self) -> f64 {
        self.dz * self.values.iter().sum::<f64>()
    }

    /// Mean density over the points with `|z| ≥ inner`.
    pub fn mean_beyond(&self, inner: f64) -> f64 {
        let (sum, count) = self
            .positions
            .iter()
            .zip(&self.values)
            .filter(|(z, _)| z.abs() >= inner)
            .fold((0.0, 0usize), |(s, c), (_, v)| (s + v, c + 1));
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

/// In-well count plus the grid points the window actually snapped to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InWellCount {
    pub count: f64,
    pub z_lo: f64,
    pub z_hi: f64,
}

/// `dz Σ_{|z_j| ≤ half_width} N_z(z_j)`, window snapped to grid points.
pub fn in_well_number(profile: &DensityProfile, half_width: f64) -> Result<InWellCount> {
    let box_half = 0.5 * profile.dz * profile.values.len() as f64;
    if !(half_width >= 0.0 && half_width <= box_half) {
        return Err(Error::InvalidArgument(format!(
            "in-well half-width {half_width} outside [0, {box_half}]"
        )));
    }
    let tol = 1e-9 * profile.dz;
    let mut count = 0.0;
    let mut z_lo = f64::INFINITY;
    let mut z_hi = f64::NEG_INFINITY;
    for (&z, &v) in profile.positions.iter().zip(&profile.values) {
        if z.abs() <= half_width + tol {
            count += v;
            z_lo = z_lo.min(z);
            z_hi = z_hi.max(z);
        }
    }
    Ok(InWellCount {
        count: count * profile.dz,
        z_lo,
        z_hi,
    })
}

/// Fraction of particles outside the well, `(N − N_in)/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PumpRate {
    Rate(f64),
    /// No particles yet; the ratio is undefined.
    NoPairs,
}

impl PumpRate {
    pub fn value(self) -> Option<f64> {
        match self {
            PumpRate::Rate(r) => Some(r),
            PumpRate::NoPairs => None,
        }
    }
}

/// Below this total the ratio is reported as [`PumpRate::NoPairs`].
pub const PUMP_RATE_FLOOR: f64 = 1e-12;

pub fn pump_rate(total: f64, in_well: f64) -> PumpRate {
    if total <= PUMP_RATE_FLOOR {
        PumpRate::NoPairs
    } else {
        PumpRate::Rate((total - in_well) / total)
    }
}

/// Least-squares `β` in `α(t) ≈ 1 − β/t` over the last half of the given samples.
pub fn fit_pump_beta(times: &[f64], rates: &[f64]) -> Option<f64> {
    let n = times.len().min(rates.len());
    let start = n / 2;
    let (mut num, mut den) = (0.0, 0.0);
    for i in start..n {
        if times[i] <= 0.0 {
            continue;
        }
        let x = 1.0 / times[i];
        num += (1.0 - rates[i]) * x;
        den += x * x;
    }
    (den > 0.0).then(|| num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, EnergySign};
    use crate::grid::{inner_product, SpatialGrid};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn setup(n: usize, keep: usize) -> (Arc<SpatialGrid>, BasisSet, BasisSet) {
        let g = SpatialGrid::shared(n, 2.5).unwrap();
        let pos = build_basis(&g, keep, EnergySign::Positive).unwrap();
        let neg = build_basis(&g, keep, EnergySign::Negative).unwrap();
        (g, pos, neg)
    }

    fn random_field(g: &Arc<SpatialGrid>, rng: &mut ChaCha8Rng) -> SpinorField {
        let n = g.n_z();
        let mut v = || -> Vec<Complex64> {
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let (u, l) = (v(), v());
        let mut f = SpinorField::from_components(g.clone(), u, l).unwrap();
        let norm = f.norm_sqr().sqrt();
        f.scale(Complex64::new(1.0 / norm, 0.0));
        f
    }

    /// Brute-force oracle: explicit inner products against materialized modes.
    fn brute_overlap(evolved: &[SpinorField], positive: &BasisSet) -> OverlapMatrix {
        let mut m = OverlapMatrix::zeros(positive.len(), evolved.len(), 0.0);
        for (p, w) in positive.fields().enumerate() {
            for (n, f) in evolved.iter().enumerate() {
                m.set(p, n, inner_product(&w, f).unwrap());
            }
        }
        m
    }

    /// Brute-force densities by explicit superposition of sampled modes.
    fn brute_electron(u: &OverlapMatrix, positive: &BasisSet) -> Vec<f64> {
        let n = positive.grid().n_z();
        let fields: Vec<_> = positive.fields().collect();
        let mut rho = vec![0.0; n];
        for col in 0..u.cols() {
            let mut acc = SpinorField::zeros(positive.grid().clone()).into_raw();
            for (p, w) in fields.iter().enumerate() {
                for (a, x) in acc.iter_mut().zip(w.as_slice()) {
                    *a += u.get(p, col) * x;
                }
            }
            for j in 0..n {
                rho[j] += acc[j].norm_sqr() + acc[n + j].norm_sqr();
            }
        }
        rho
    }

    #[test]
    fn vacuum_has_no_overlap() {
        let (_, pos, neg) = setup(64, 32);
        let evolved: Vec<_> = neg.fields().collect();
        let u = overlap_matrix(&evolved, &pos, 0.0).unwrap();
        assert!(u.entries.iter().all(|x| x.norm() < 1e-10));
        assert_eq!(pair_number(&OverlapMatrix::zeros(4, 4, 0.0)), 0.0);
    }

    #[test]
    fn positive_mode_projects_onto_itself() {
        let (_, pos, neg) = setup(64, 16);
        let mut evolved: Vec<_> = neg.fields().collect();
        evolved[3] = pos.field(5);
        let u = overlap_matrix(&evolved, &pos, 0.0).unwrap();
        for p in 0..pos.len() {
            let expected = if p == 5 { 1.0 } else { 0.0 };
            assert!((u.get(p, 3) - expected).norm() < 1e-10);
        }
        assert_relative_eq!(pair_number(&u), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn fft_overlap_matches_brute_force() {
        let (g, pos, _) = setup(32, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let evolved: Vec<_> = (0..5).map(|_| random_field(&g, &mut rng)).collect();
        let fast = overlap_matrix(&evolved, &pos, 0.0).unwrap();
        let slow = brute_overlap(&evolved, &pos);
        for p in 0..pos.len() {
            for n in 0..5 {
                assert!((fast.get(p, n) - slow.get(p, n)).norm() < 1e-12);
            }
        }
        for c in fast.column_norms() {
            assert!(c <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn densities_match_brute_force_and_integrate_to_pair_number() {
        let (g, pos, neg) = setup(32, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let evolved: Vec<_> = (0..neg.len()).map(|_| random_field(&g, &mut rng)).collect();
        let u = overlap_matrix(&evolved, &pos, 0.0).unwrap();
        let el = electron_density(&u, &pos).unwrap();
        let brute = brute_electron(&u, &pos);
        for (a, b) in el.values.iter().zip(&brute) {
            assert!((a - b).abs() < 1e-10);
        }
        let po = positron_density(&u, &neg).unwrap();
        let n = pair_number(&u);
        assert!(n > 0.1);
        assert_relative_eq!(el.total(), n, max_relative = 1e-8);
        assert_relative_eq!(po.total(), n, max_relative = 1e-8);
        assert!(el.values.iter().chain(&po.values).all(|&v| v >= -1e-12));
    }

    #[test]
    fn single_entry_densities_are_mode_densities() {
        let (_, pos, neg) = setup(32, 8);
        let mut u = OverlapMatrix::zeros(8, 8, 0.0);
        u.set(2, 5, Complex64::new(1.0, 0.0));
        let el = electron_density(&u, &pos).unwrap();
        let po = positron_density(&u, &neg).unwrap();
        for (a, b) in el.values.iter().zip(pos.field(2).density()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in po.values.iter().zip(neg.field(5).density()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_relative_eq!(el.total(), 1.0, epsilon = 1e-12);

        let zero = OverlapMatrix::zeros(8, 8, 0.0);
        assert!(electron_density(&zero, &pos)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
        assert!(positron_density(&zero, &neg)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn densities_are_worker_independent() {
        let (g, pos, neg) = setup(64, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let evolved: Vec<_> = (0..16).map(|_| random_field(&g, &mut rng)).collect();
        let u = overlap_matrix(&evolved, &pos, 0.0).unwrap();
        let proj = Projector::new(&g);
        let a = proj
            .electron_density(&u, &pos, Workers::Sequential)
            .unwrap();
        let b = proj.electron_density(&u, &pos, Workers::Fixed(4)).unwrap();
        assert_eq!(a.values, b.values);
        let a = proj
            .positron_density(&u, &neg, Workers::Sequential)
            .unwrap();
        let b = proj.positron_density(&u, &neg, Workers::Fixed(3)).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn in_well_window() {
        let g = SpatialGrid::new(512, 2.5).unwrap();
        let zero = DensityProfile::new(&g, Species::Electron, 0.0, vec![0.0; 512]).unwrap();
        assert_eq!(
            in_well_number(&zero, DEFAULT_IN_WELL_HALF_WIDTH)
                .unwrap()
                .count,
            0.0
        );
        let flat = DensityProfile::new(&g, Species::Electron, 0.0, vec![1.0 / 2.5; 512]).unwrap();
        let w = in_well_number(&flat, DEFAULT_IN_WELL_HALF_WIDTH).unwrap();
        assert!(w.count > 0.0 && w.count <= flat.total());
        assert!(w.z_hi <= DEFAULT_IN_WELL_HALF_WIDTH && w.z_lo >= -DEFAULT_IN_WELL_HALF_WIDTH);
        let all = in_well_number(&flat, 1.25).unwrap();
        assert_relative_eq!(all.count, 1.0, epsilon = 1e-12);
        assert!(in_well_number(&flat, 1.3).is_err());
        assert!(in_well_number(&flat, -0.1).is_err());
    }

    #[test]
    fn pump_rates() {
        assert_eq!(pump_rate(2.0, 2.0), PumpRate::Rate(0.0));
        assert_eq!(pump_rate(2.0, 0.0), PumpRate::Rate(1.0));
        assert_eq!(pump_rate(0.0, 0.0), PumpRate::NoPairs);
        let t = [1.0, 2.0, 3.0, 4.0];
        let a: Vec<f64> = t.iter().map(|t| 1.0 - 0.5 / t).collect();
        assert_relative_eq!(fit_pump_beta(&t, &a).unwrap(), 0.5, epsilon = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn single_field_phase_leaves_count_and_electron_density(seed in 0u64..1000, theta in 0.0f64..6.3) {
            let (g, pos, _) = setup(32, 10);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let evolved: Vec<_> = (0..10).map(|_| random_field(&g, &mut rng)).collect();
            let mut rotated = evolved.clone();
            rotated[seed as usize % 10].scale(Complex64::from_polar(1.0, theta));
            let a = overlap_matrix(&evolved, &pos, 0.0).unwrap();
            let b = overlap_matrix(&rotated, &pos, 0.0).unwrap();
            prop_assert!((pair_number(&a) - pair_number(&b)).abs() < 1e-12);
            let (ea, eb) = (electron_density(&a, &pos).unwrap(), electron_density(&b, &pos).unwrap());
            for (x, y) in ea.values.iter().zip(&eb.values) {
                prop_assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
            }
        }

        // The positron density mixes different evolved fields coherently, so
        // only a phase common to all of them leaves it unchanged.
        #[test]
        fn common_phase_leaves_positron_density(seed in 0u64..1000, theta in 0.0f64..6.3) {
            let (g, pos, neg) = setup(32, 10);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let evolved: Vec<_> = (0..10).map(|_| random_field(&g, &mut rng)).collect();
            let mut rotated = evolved.clone();
            for f in &mut rotated {
                f.scale(Complex64::from_polar(1.0, theta));
            }
            let a = overlap_matrix(&evolved, &pos, 0.0).unwrap();
            let b = overlap_matrix(&rotated, &pos, 0.0).unwrap();
            let (pa, pb) = (positron_density(&a, &neg).unwrap(), positron_density(&b, &neg).unwrap());
            for (x, y) in pa.values.iter().zip(&pb.values) {
                prop_assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
            }
        }

        #[test]
        fn more_positive_modes_never_decrease_pair_number(seed in 0u64..1000, extra in 1usize..16) {
            let g = SpatialGrid::shared(32, 2.5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let evolved: Vec<_> = (0..6).map(|_| random_field(&g, &mut rng)).collect();
            let small = build_basis(&g, 12, EnergySign::Positive).unwrap();
            let big = build_basis(&g, 12 + extra, EnergySign::Positive).unwrap();
            let a = pair_number(&overlap_matrix(&evolved, &small, 0.0).unwrap());
            let b = pair_number(&overlap_matrix(&evolved, &big, 0.0).unwrap());
            prop_assert!(b >= a - 1e-12);
        }
    }
}
