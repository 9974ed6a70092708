//! Sequential versus data-parallel evolution of a block of negative modes.
//!
//! Each iteration advances every mode by one tabulated segment, which is the
//! inner loop of a scenario run. Build with `--no-default-features` to time
//! the rayon-free fallback alone.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pairpump::basis::{build_basis, EnergySign};
use pairpump::exec::Workers;
use pairpump::grid::{SpatialGrid, SpinorField};
use pairpump::observables::Projector;
use pairpump::potential::{DriveMode, DEFAULT_EDGE};
use pairpump::propagator::{PhaseTable, SplitStepPropagator};
use pairpump::units::{C2, LAMBDA_C};

const N_Z: usize = 256;
const MODES: usize = 64;
const STEPS: usize = 50;

fn drive() -> DriveMode {
    DriveMode::WidthOsc {
        depth: 2.53 * C2,
        w_min: 0.0,
        w_max: 10.0 * LAMBDA_C,
        omega: 0.3 * C2,
        edge: DEFAULT_EDGE,
    }
}

fn workers() -> Vec<(&'static str, Workers)> {
    vec![
        ("sequential", Workers::Sequential),
        ("parallel", Workers::Auto),
    ]
}

fn bench_segment(c: &mut Criterion) {
    let grid = SpatialGrid::shared(N_Z, 2.5).unwrap();
    let basis = build_basis(&grid, MODES, EnergySign::Negative).unwrap();
    let dt = 1e-6;
    let propagator = SplitStepPropagator::new(grid.clone(), dt);
    let phases = PhaseTable::new(&drive(), &grid, 0.0, dt, STEPS);
    let initial: Vec<SpinorField> = basis.fields().collect();

    let mut group = c.benchmark_group("segment");
    group.sample_size(20);
    for (name, w) in workers() {
        group.bench_with_input(BenchmarkId::new(name, MODES), &w, |b, &w| {
            b.iter_batched_ref(
                || initial.clone(),
                |fields| {
                    w.map_mut(fields, |_, f| {
                        let mut ws = propagator.workspace();
                        propagator.advance_with_phases(f, &phases, &mut ws).unwrap();
                    });
                    black_box(fields.len())
                },
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn bench_projection(c: &mut Criterion) {
    let grid = SpatialGrid::shared(N_Z, 2.5).unwrap();
    let negative = build_basis(&grid, MODES, EnergySign::Negative).unwrap();
    let positive = build_basis(&grid, MODES, EnergySign::Positive).unwrap();
    let projector = Projector::new(&grid);
    let fields: Vec<SpinorField> = negative.fields().collect();

    let mut group = c.benchmark_group("overlap_columns");
    for (name, w) in workers() {
        group.bench_with_input(BenchmarkId::new(name, MODES), &w, |b, &w| {
            b.iter(|| {
                let cols = w.map_range(fields.len(), |n| {
                    projector.overlap_column(&fields[n], &positive).unwrap()
                });
                black_box(cols)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_segment, bench_projection);
criterion_main!(benches);
