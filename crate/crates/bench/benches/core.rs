use std::hint::black_box;

use catspin_bench::{quantum_template, simulator, turn, working_point, PULSE, RABI, TAU56};
use catspin_core::dynamics::{sweep_curve, SweepVariable};
use catspin_core::estimate::fit_sine;
use catspin_core::husimi::DEFAULT_Q_TOLERANCE;
use catspin_core::{husimi_q, QGrid, Sequence, SystemState};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn propagator(c: &mut Criterion) {
    let sim = simulator();
    let h = working_point();
    c.bench_function("rf_propagator", |b| {
        b.iter(|| sim.rf_propagator(black_box(&h), RABI, PULSE))
    });
}

fn sequences(c: &mut Criterion) {
    let sim = simulator();
    let h = working_point();
    let start = SystemState::circular(sim.params());
    let seq = Sequence::quantum_ramsey(RABI, PULSE, TAU56, 0.715, 0.3).unwrap();
    c.bench_function("run_sequence quantum", |b| {
        b.iter(|| sim.run_sequence(&start, black_box(&seq), &h))
    });

    let grid = turn(24);
    c.bench_function("sweep_curve phi_mw x24", |b| {
        b.iter(|| {
            sweep_curve(
                &sim,
                &quantum_template(0.715),
                SweepVariable::PhiMw,
                black_box(&grid),
                &h,
                None,
            )
            .unwrap()
        })
    });
}

fn husimi(c: &mut Criterion) {
    let sim = simulator();
    let h = working_point();
    let seq = Sequence::classical_ramsey(RABI, PULSE, TAU56, 0.715).unwrap();
    let tilted = sim.evolve_segment(&SystemState::circular(sim.params()), &seq.segments[0], &h);
    let state = tilted.ladder_state().unwrap();
    let mut group = c.benchmark_group("husimi_q");
    for (nt, np) in [(50, 100), (200, 400)] {
        let grid = QGrid::new(nt, np).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{nt}x{np}")), &grid, |b, &g| {
            b.iter(|| husimi_q(&state, g, DEFAULT_Q_TOLERANCE))
        });
    }
    group.finish();
}

fn fits(c: &mut Criterion) {
    let xs = turn(24);
    let ys: Vec<f64> = xs.iter().map(|x| 0.5 + 0.45 * (x - 1.1).cos()).collect();
    c.bench_function("fit_sine x24", |b| {
        b.iter(|| fit_sine(black_box(&xs), black_box(&ys), None).unwrap())
    });
}

criterion_group!(benches, propagator, sequences, husimi, fits);
criterion_main!(benches);
