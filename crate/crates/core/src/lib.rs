//! Pair creation in an oscillating one-dimensional potential well.
//!
//! Free negative-energy plane waves on a periodic grid are propagated with a
//! split-step spectral scheme; projections onto the free positive-energy
//! modes give the number of created pairs and their spatial densities. The
//! [`spectrum`] module diagonalizes static wells to locate diving points and
//! [`experiment`] runs full scenarios and adiabatic sweeps.

// Validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod config;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod grid;
pub mod observables;
pub mod output;
pub mod potential;
pub mod propagator;
pub mod spectral;
pub mod spectrum;
pub mod units;
