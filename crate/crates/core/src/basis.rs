//! Field-free Dirac plane waves on the grid and the truncated mode sets built
//! from them.
//!
//! Modes are box-normalized, `⟨W|W⟩ = 1` under [`inner_product`], so
//! `Σ|U_pn|²` is directly a particle count.
//!
//! [`inner_product`]: crate::grid::inner_product

use std::cmp::Ordering;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, SpinorField};
use crate::units::C2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn factor(self) -> f64 {
        match self {
            EnergySign::Positive => 1.0,
            EnergySign::Negative => -1.0,
        }
    }
}

/// `±√(c⁴ + k²c²)`.
pub fn free_energy(k: f64, sign: EnergySign) -> f64 {
    sign.factor() * (C2 * C2 + k * k * C2).sqrt()
}

/// Unit-norm 2-spinor of the free Hamiltonian `c k σ₁ + c² σ₃` at momentum `k`.
///
/// Positive branch `(√(E+c²), s√(E−c²))/√(2E)`, negative branch
/// `(−s√(|E|−c²), √(|E|+c²))/√(2|E|)` with `s = sign(k)` and `sign(0) = +1`.
pub fn free_spinor(k: f64, sign: EnergySign) -> [f64; 2] {
    let e = (C2 * C2 + k * k * C2).sqrt();
    let s = if k >= 0.0 { 1.0 } else { -1.0 };
    let norm = (2.0 * e).sqrt();
    let big = (e + C2).sqrt() / norm;
    let small = (e - C2).max(0.0).sqrt() / norm;
    match sign {
        EnergySign::Positive => [big, s * small],
        EnergySign::Negative => [-s * small, big],
    }
}

/// Label of one free plane-wave mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeMode {
    /// Momentum on the grid lattice.
    pub k: f64,
    /// DFT slot of `k`.
    pub slot: usize,
    /// Signed lattice index of `k`.
    pub index: i64,
    pub sign: EnergySign,
    pub energy: f64,
}

impl FreeMode {
    pub fn new(grid: &SpatialGrid, slot: usize, sign: EnergySign) -> Self {
        let k = grid.momenta()[slot];
        Self {
            k,
            slot,
            index: grid.signed_index(slot),
            sign,
            energy: free_energy(k, sign),
        }
    }

    pub fn spinor(&self) -> [f64; 2] {
        free_spinor(self.k, self.sign)
    }

    /// `e^{-ikL/2} = (-1)^index`: the plane wave's value at `z_0 = -L/2`.
    pub(crate) fn edge_phase(&self) -> f64 {
        if self.index.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// The mode sampled on `grid`, `e^{ikz} u / √L`.
    pub fn field(&self, grid: &Arc<SpatialGrid>) -> SpinorField {
        let [a, b] = self.spinor();
        let amp = 1.0 / grid.box_length().sqrt();
        let n = grid.n_z();
        let mut data = Vec::with_capacity(2 * n);
        let wave: Vec<Complex64> = grid
            .positions()
            .iter()
            .enumerate()
            .map(|(j, _)| {
                // e^{ik z_j} = (-1)^index · e^{2πi m j / n}; reduce m j mod n first
                let mj = (self.slot * j) % n;
                let theta = 2.0 * std::f64::consts::PI * mj as f64 / n as f64;
                Complex64::from_polar(amp * self.edge_phase(), theta)
            })
            .collect();
        data.extend(wave.iter().map(|w| w * a));
        data.extend(wave.iter().map(|w| w * b));
        SpinorField::from_raw(grid.clone(), data)
    }
}

/// Free plane-wave eigenmode at lattice momentum `k`.
pub fn make_mode(grid: &Arc<SpatialGrid>, k: f64, sign: EnergySign) -> Result<SpinorField> {
    let slot = grid.lattice_index(k).ok_or(Error::OffLattice(k))?;
    Ok(FreeMode::new(grid, slot, sign).field(grid))
}

/// Ordered set of free modes on one energy branch.
#[derive(Debug, Clone)]
pub struct BasisSet {
    grid: Arc<SpatialGrid>,
    sign: EnergySign,
    modes: Vec<FreeMode>,
}

impl BasisSet {
    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn sign(&self) -> EnergySign {
        self.sign
    }

    pub fn modes(&self) -> &[FreeMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Sampled field of mode `i`. Fields are generated on demand; a full
    /// basis at `n_z = 2048` would otherwise hold 64 MiB per branch.
    pub fn field(&self, i: usize) -> SpinorField {
        self.modes[i].field(&self.grid)
    }

    pub fn fields(&self) -> impl Iterator<Item = SpinorField> + '_ {
        self.modes.iter().map(|m| m.field(&self.grid))
    }

    /// Largest `|E|` among the kept modes.
    pub fn max_energy(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.energy.abs())
            .fold(0.0, f64::max)
    }
}

/// Canonical mode order: ascending `|k|`, ties with `k > 0` first.
fn mode_order(grid: &SpatialGrid, a: usize, b: usize) -> Ordering {
    let (ia, ib) = (grid.signed_index(a), grid.signed_index(b));
    ia.abs()
        .cmp(&ib.abs())
        .then_with(|| ib.signum().cmp(&ia.signum()))
}

/// The `n_keep` lowest-`|k|` modes of one branch.
pub fn build_basis(grid: &Arc<SpatialGrid>, n_keep: usize, sign: EnergySign) -> Result<BasisSet> {
    let n = grid.n_z();
    if n_keep > n {
        return Err(Error::Truncation {
            requested: n_keep,
            available: n,
        });
    }
    let mut slots: Vec<usize> = (0..n).collect();
    slots.sort_by(|&a, &b| mode_order(grid, a, b));
    let modes = slots
        .into_iter()
        .take(n_keep)
        .map(|s| FreeMode::new(grid, s, sign))
        .collect();
    Ok(BasisSet {
        grid: grid.clone(),
        sign,
        modes,
    })
}
