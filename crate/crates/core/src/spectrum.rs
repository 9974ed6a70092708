//! Static finite-box spectra, in-gap branch tracking and diving points.
//!
//! The Hamiltonian is assembled in the free plane-wave basis. For plane waves
//! the potential matrix element reduces to one DFT coefficient of the sampled
//! potential:
//!
//! `⟨W_a|V|W_b⟩ = (u_a·u_b) (-1)^{m_a - m_b} V̂[(m_a - m_b) mod n_z]`,
//! with `V̂[q] = (1/n_z) Σ_j V_j e^{-2πi q j / n_z}`.
//!
//! Diving points are located on the count of eigenvalues below `-c²`. An
//! attractive well lowers every level, so that count only grows along a scan
//! and each unit step is one bound state entering the negative continuum.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, EnergySign, FreeMode};
use crate::error::{Error, Result};
use crate::exec::Workers;
use crate::grid::SpatialGrid;
use crate::observables::Projector;
use crate::potential::{well_profile, WellShape, DEFAULT_EDGE};
use crate::spectral::SpectralTransform;
use crate::units::{C2, LAMBDA_C};

/// Default eigenvalue window written to the scan CSV, in units of `c²`.
pub const DEFAULT_WINDOW: f64 = 1.6;

/// Free-mode basis for diagonalization: `n_keep` positive then `n_keep`
/// negative modes.
#[derive(Debug, Clone)]
pub struct SpectrumBasis {
    grid: Arc<SpatialGrid>,
    modes: Vec<FreeMode>,
    n_keep: usize,
}

impl SpectrumBasis {
    pub fn new(grid: &Arc<SpatialGrid>, n_keep: usize) -> Result<Self> {
        let pos = build_basis(grid, n_keep, EnergySign::Positive)?;
        let neg = build_basis(grid, n_keep, EnergySign::Negative)?;
        let modes = pos.modes().iter().chain(neg.modes()).copied().collect();
        Ok(Self {
            grid: grid.clone(),
            modes,
            n_keep,
        })
    }

    pub fn full(grid: &Arc<SpatialGrid>) -> Result<Self> {
        Self::new(grid, grid.n_z())
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn modes(&self) -> &[FreeMode] {
        &self.modes
    }

    pub fn n_keep(&self) -> usize {
        self.n_keep
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }
}

/// Hermitian matrix of `H = c σ₁ p + c² σ₃ + V` in a [`SpectrumBasis`].
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub matrix: DMatrix<Complex64>,
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest `|Im H_ab|`.
    pub fn max_imaginary(&self) -> f64 {
        self.matrix.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    fn real_part(&self) -> DMatrix<f64> {
        self.matrix.map(|z| z.re)
    }

    /// Below this imaginary residue (relative to `c²`) the real solver is used.
    fn is_real(&self) -> bool {
        self.max_imaginary() < 1e-12 * C2
    }
}

/// Free energies on the diagonal plus grid-quadrature potential matrix
/// elements, symmetrized.
pub fn build_hamiltonian(basis: &SpectrumBasis, v: &[f64]) -> Result<Hamiltonian> {
    let grid = basis.grid();
    let n = grid.n_z();
    if v.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let mut vhat: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let fft = SpectralTransform::new(n);
    let mut scratch = fft.scratch();
    fft.forward_raw(&mut vhat, &mut scratch);
    let inv_n = 1.0 / n as f64;
    for x in &mut vhat {
        *x *= inv_n;
    }

    let modes = basis.modes();
    let spinors: Vec<[f64; 2]> = modes.iter().map(|m| m.spinor()).collect();
    let dim = modes.len();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            let (ma, mb) = (&modes[a], &modes[b]);
            let q = (ma.slot + n - mb.slot) % n;
            let overlap = spinors[a][0] * spinors[b][0] + spinors[a][1] * spinors[b][1];
            let mut x = vhat[q] * (overlap * ma.edge_phase() * mb.edge_phase());
            if a == b {
                x = Complex64::new(x.re + ma.energy, 0.0);
                h[(a, a)] = x;
            } else {
                h[(a, b)] = x;
                h[(b, a)] = x.conj();
            }
        }
    }
    Ok(Hamiltonian { matrix: h })
}

/// Eigenpairs with eigenvalues ascending and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

const EIGEN_EPS: f64 = 1e-14;
const EIGEN_MAX_ITER: usize = 0;

fn sorted_pairs(values: Vec<f64>, vectors: DMatrix<Complex64>) -> EigenDecomposition {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let values = order.iter().map(|&i| values[i]).collect();
    let vectors = DMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]);
    EigenDecomposition { values, vectors }
}

pub fn eigen_decompose(h: &Hamiltonian) -> Result<EigenDecomposition> {
    let dim = h.dim();
    if h.is_real() {
        let eig = SymmetricEigen::try_new(h.real_part(), EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or(Error::EigenNonConvergence(dim))?;
        let vectors = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        Ok(sorted_pairs(
            eig.eigenvalues.iter().copied().collect(),
            vectors,
        ))
    } else {
        let eig = SymmetricEigen::try_new(h.matrix.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or(Error::EigenNonConvergence(dim))?;
        Ok(sorted_pairs(
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors,
        ))
    }
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(h: &Hamiltonian) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = if h.is_real() {
        h.real_part()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        h.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenNonConvergence(h.dim()));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Which well parameter a scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    Width,
    Depth,
}

impl ScanParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanParameter::Width => "width",
            ScanParameter::Depth => "depth",
        }
    }

    /// Paper unit for this parameter.
    pub fn unit(self) -> crate::units::Unit {
        match self {
            ScanParameter::Width => crate::units::Unit::Compton,
            ScanParameter::Depth => crate::units::Unit::RestEnergy,
        }
    }
}

/// A one-parameter family of static wells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanFamily {
    pub parameter: ScanParameter,
    /// Depth for a width scan, width for a depth scan (a.u.).
    pub fixed: f64,
    pub edge: f64,
}

impl ScanFamily {
    pub fn width(depth: f64) -> Self {
        Self {
            parameter: ScanParameter::Width,
            fixed: depth,
            edge: DEFAULT_EDGE,
        }
    }

    pub fn depth(width: f64) -> Self {
        Self {
            parameter: ScanParameter::Depth,
            fixed: width,
            edge: DEFAULT_EDGE,
        }
    }

    pub fn shape(&self, value: f64) -> WellShape {
        match self.parameter {
            ScanParameter::Width => WellShape {
                depth: self.fixed,
                width: value,
                edge: self.edge,
            },
            ScanParameter::Depth => WellShape {
                depth: value,
                width: self.fixed,
                edge: self.edge,
            },
        }
    }

    pub fn potential(&self, grid: &SpatialGrid, value: f64) -> Vec<f64> {
        let shape = self.shape(value);
        grid.positions()
            .iter()
            .map(|&z| well_profile(&shape, z))
            .collect()
    }

    /// Half-width of the window used for in-well probabilities.
    pub fn window(&self, value: f64) -> f64 {
        0.5 * self.shape(value).width + LOCALIZATION_MARGIN
    }
}

/// Distance beyond the nominal well edge still counted as "in the well" when
/// weighting eigenvectors by localization.
pub const LOCALIZATION_MARGIN: f64 = 2.0 * LAMBDA_C;

/// One tracked in-gap state at one scan value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub branch: usize,
    /// Index into the ascending eigenvalues.
    pub level: usize,
    pub energy: f64,
    /// Overlap with the same branch at the previous value (1 when it starts).
    pub overlap: f64,
    /// Probability within the well window.
    pub in_well: f64,
}

/// A tracking step where no candidate reached overlap 0.5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ambiguity {
    pub branch: usize,
    pub value: f64,
    pub best_overlap: f64,
}

/// A tracked branch that crossed `-c²` between two scan values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchExit {
    pub branch: usize,
    pub after: f64,
    pub before: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub family: ScanFamily,
    pub values: Vec<f64>,
    pub eigenvalues: Vec<Vec<f64>>,
    /// Per value, the tracked in-gap branches and their continuations.
    pub branches: Vec<Vec<BranchPoint>>,
    pub ambiguities: Vec<Ambiguity>,
    /// Tracked branches that left the gap through `-c²`.
    pub exits: Vec<BranchExit>,
    /// Per value, eigenvalues below `-c²` in excess of the negative-mode count.
    pub dived: Vec<usize>,
    pub n_keep: usize,
    /// Largest imaginary residue over all Hamiltonians in the scan.
    pub max_imaginary: f64,
}

impl SpectrumScan {
    /// Branch ids that ever sat inside the gap at `index`.
    pub fn in_gap(&self, index: usize) -> Vec<&BranchPoint> {
        self.branches[index]
            .iter()
            .filter(|b| b.energy > -C2 && b.energy < C2)
            .collect()
    }

    /// Eigenvalues within `[-window, window]·c²` at each value.
    pub fn windowed(&self, window: f64) -> Vec<Vec<f64>> {
        let lim = window * C2;
        self.eigenvalues
            .iter()
            .map(|e| e.iter().copied().filter(|x| x.abs() <= lim).collect())
            .collect()
    }
}

/// `#{E < -c²} − n_keep`, clamped at 0. Without a potential the `k = 0`
/// negative mode sits exactly at `-c²`, which the clamp absorbs.
fn dived_count(values: &[f64], n_keep: usize) -> usize {
    values
        .iter()
        .filter(|&&e| e < -C2)
        .count()
        .saturating_sub(n_keep)
}

struct Solved {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
    in_well: Vec<f64>,
    max_imaginary: f64,
}

/// Eigenpairs at one value, with in-well probabilities of the states
/// within `track_window` of the gap.
fn solve_point(
    basis: &SpectrumBasis,
    family: &ScanFamily,
    value: f64,
    projector: &Projector,
) -> Result<Solved> {
    let grid = basis.grid();
    let h = build_hamiltonian(basis, &family.potential(grid, value))?;
    let max_imaginary = h.max_imaginary();
    let eig = eigen_decompose(&h)?;
    let half = family.window(value);
    let in_well = (0..eig.values.len())
        .map(|i| {
            if !tracked_energy(eig.values[i]) {
                return 0.0;
            }
            let coeffs: Vec<Complex64> = eig.vectors.column(i).iter().copied().collect();
            let field = projector.superpose(grid, basis.modes(), &coeffs);
            let dz = grid.dz();
            grid.positions()
                .iter()
                .zip(field.upper().iter().zip(field.lower()))
                .filter(|(z, _)| z.abs() <= half)
                .map(|(_, (a, b))| (a.norm_sqr() + b.norm_sqr()) * dz)
                .sum()
        })
        .collect();
    Ok(Solved {
        values: eig.values,
        vectors: eig.vectors,
        in_well,
        max_imaginary,
    })
}

/// States followed by the tracker: the gap plus a band below `-c²` where
/// dived branches continue.
const TRACK_BELOW: f64 = 0.6;

fn tracked_energy(e: f64) -> bool {
    e > -(1.0 + TRACK_BELOW) * C2 && e < C2
}

const MIN_OVERLAP: f64 = 0.5;

/// Diagonalize the family at each of `values` (ascending) and follow in-gap
/// branches by eigenvector overlap.
pub fn scan(
    basis: &SpectrumBasis,
    family: &ScanFamily,
    values: &[f64],
    workers: Workers,
) -> Result<SpectrumScan> {
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "scan values must be strictly ascending".into(),
        ));
    }
    let projector = Projector::new(basis.grid());
    let solved: Vec<Solved> = workers
        .map_range(values.len(), |i| {
            solve_point(basis, family, values[i], &projector)
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let dived: Vec<usize> = solved
        .iter()
        .map(|s| dived_count(&s.values, basis.n_keep()))
        .collect();
    let mut branches: Vec<Vec<BranchPoint>> = Vec::with_capacity(values.len());
    let mut ambiguities = Vec::new();
    let mut exits = Vec::new();
    let mut next_id = 0usize;
    for (i, s) in solved.iter().enumerate() {
        let mut points = Vec::new();
        let mut claimed = vec![false; s.values.len()];
        if i > 0 {
            let prev = &solved[i - 1];
            let mut fresh = dived[i].saturating_sub(dived[i - 1]);
            let mut lost = Vec::new();
            for bp in &branches[i - 1] {
                let old = prev.vectors.column(bp.level);
                let mut best = (0.0, usize::MAX);
                for j in (0..s.values.len()).filter(|&j| tracked_energy(s.values[j])) {
                    let ov = old.dotc(&s.vectors.column(j)).norm();
                    if ov > best.0 {
                        best = (ov, j);
                    }
                }
                if best.1 != usize::MAX && best.0 > MIN_OVERLAP && !claimed[best.1] {
                    claimed[best.1] = true;
                    let energy = s.values[best.1];
                    if bp.energy > -C2 && energy <= -C2 && fresh > 0 {
                        fresh -= 1;
                        exits.push(BranchExit {
                            branch: bp.branch,
                            after: values[i - 1],
                            before: values[i],
                        });
                    }
                    points.push(BranchPoint {
                        branch: bp.branch,
                        level: best.1,
                        energy,
                        overlap: best.0,
                        in_well: s.in_well[best.1],
                    });
                } else if bp.energy > -C2 {
                    lost.push((bp, best.0));
                }
            }
            // A branch that vanishes next to a new state below -c² has dived
            // into the continuum and mixed with it; the lowest lost branches
            // are matched to the new dived states, any others are reported.
            lost.sort_by(|a, b| a.0.energy.total_cmp(&b.0.energy));
            for (bp, overlap) in lost {
                if fresh > 0 {
                    fresh -= 1;
                    exits.push(BranchExit {
                        branch: bp.branch,
                        after: values[i - 1],
                        before: values[i],
                    });
                } else {
                    ambiguities.push(Ambiguity {
                        branch: bp.branch,
                        value: values[i],
                        best_overlap: overlap,
                    });
                }
            }
        }
        for (j, (&e, &taken)) in s.values.iter().zip(&claimed).enumerate() {
            if e > -C2 && e < C2 && !taken {
                points.push(BranchPoint {
                    branch: next_id,
                    level: j,
                    energy: e,
                    overlap: 1.0,
                    in_well: s.in_well[j],
                });
                next_id += 1;
            }
        }
        points.sort_by_key(|b| b.level);
        branches.push(points);
    }

    let max_imaginary = solved.iter().map(|s| s.max_imaginary).fold(0.0, f64::max);
    Ok(SpectrumScan {
        family: *family,
        values: values.to_vec(),
        dived,
        exits,
        eigenvalues: solved.into_iter().map(|s| s.values).collect(),
        branches,
        ambiguities,
        n_keep: basis.n_keep(),
        max_imaginary,
    })
}

/// Bracket refinement tolerance, relative to the paper unit of the parameter.
pub const DIVING_TOLERANCE: f64 = 1e-4;

/// A located diving point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivingPoint {
    /// Parameter value (a.u.).
    pub value: f64,
    /// Eigenvalue closest to `-c²` at `value`.
    pub energy: f64,
    /// Number of states below `-c²` (beyond the continuum) just after `value`.
    pub order: usize,
}

/// Refine every unit step of the dived count between scan samples by
/// bisection on the count.
pub fn diving_points(basis: &SpectrumBasis, scan: &SpectrumScan) -> Result<Vec<DivingPoint>> {
    let family = scan.family;
    let unit = family.parameter.unit().scale();
    let count_at = |v: f64| -> Result<(usize, f64)> {
        let h = build_hamiltonian(basis, &family.potential(basis.grid(), v))?;
        let e = eigenvalues(&h)?;
        let nearest = e
            .iter()
            .copied()
            .min_by(|a, b| (a + C2).abs().total_cmp(&(b + C2).abs()))
            .unwrap_or(f64::NAN);
        Ok((dived_count(&e, basis.n_keep()), nearest))
    };
    let mut out = Vec::new();
    for i in 1..scan.values.len() {
        let (c0, c1) = (scan.dived[i - 1], scan.dived[i]);
        for target in (c0 + 1)..=c1 {
            let (mut lo, mut hi) = (scan.values[i - 1], scan.values[i]);
            let mut energy = f64::NAN;
            while hi - lo > DIVING_TOLERANCE * unit {
                let mid = 0.5 * (lo + hi);
                let (c, e) = count_at(mid)?;
                energy = e;
                if c >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let value = 0.5 * (lo + hi);
            if energy.is_nan() {
                energy = count_at(value)?.1;
            }
            out.push(DivingPoint {
                value,
                energy,
                order: target,
            });
        }
    }
    Ok(out)
}

/// Ascending values `lo, lo + step, …` up to and including `hi` (within rounding).
pub fn linspace_step(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}
