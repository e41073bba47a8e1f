// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Throughput benches for the data-parallel hot paths.
//!
//! Run `cargo bench` for the rayon build, then
//! `cargo bench --no-default-features` for the sequential fallback;
//! criterion's saved baselines report the speedup between the two.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::f64::consts::TAU;

use homog_core::experiment::run_sweep;
use homog_core::grape::{robust_objective, OptimizationConfig, PulseSpec, RobustObjective};
use homog_core::homogeniser::{entropy_profile, homogenize_chain, InteractionSchedule};
use homog_core::qstate::state_from_f;
use homog_core::spin::{
    crotonic_proton_environment, environment_ensemble, EnvironmentEnsemble, SpinSystem,
};

fn swap_bc_target() -> homog_core::qstate::UnitaryMatrix {
    homog_core::homogeniser::partial_swap_unitary(std::f64::consts::FRAC_PI_2)
        .embed(&[1, 2], 4)
        .unwrap()
}

fn fine_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| 90.0 * k as f64 / points as f64).collect()
}

fn bench_sweep(c: &mut Criterion) {
    let schedule = InteractionSchedule::standard().unwrap();
    let grid = fine_grid(64);
    c.bench_function("sweep/ideal_64_points", |b| {
        b.iter(|| run_sweep(&schedule, &grid, 1, None).unwrap())
    });
}

fn bench_entropy_profile(c: &mut Criterion) {
    let schedule = InteractionSchedule::standard().unwrap();
    let grid: Vec<f64> = fine_grid(64).iter().map(|d| d.to_radians()).collect();
    c.bench_function("entropy_profile/64_points", |b| {
        b.iter(|| entropy_profile(&grid, &schedule).unwrap())
    });
}

fn bench_robust_objective(c: &mut Criterion) {
    let sys = SpinSystem::crotonic_default();
    let env = crotonic_proton_environment(ndarray::Array2::zeros((5, 4))).unwrap();
    let ensemble = environment_ensemble(&sys, &env.couplings_hz, &env.methyl).unwrap();
    let target = swap_bc_target();

    let mut group = c.benchmark_group("robust_objective");
    group.sample_size(10);
    for (label, ens, scales) in [
        ("single_member", EnvironmentEnsemble::single(sys.clone()), vec![1.0]),
        ("sixteen_members_three_scales", ensemble, vec![0.95, 1.0, 1.05]),
    ] {
        let mut config = OptimizationConfig::new(ens);
        config.rf_scales = scales;
        let pulse = PulseSpec::random(200, 1e-5, TAU * 1e4, 7).unwrap();
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| robust_objective(&pulse, &config, &target).unwrap())
        });
        let objective = RobustObjective::new(&pulse, &config, &target).unwrap();
        group.bench_function(
            BenchmarkId::new("gradient", label),
            |b| b.iter(|| objective.fidelity_and_gradient(&pulse.phases)),
        );
    }
    group.finish();
}

fn bench_chain(c: &mut Criterion) {
    let system = state_from_f(1.0).unwrap();
    let mut group = c.benchmark_group("homogenize_chain");
    group.sample_size(10);
    for n in [5usize, 7] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| homogenize_chain(&system, 0.0, n, 0.3).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_sweep,
    bench_entropy_profile,
    bench_robust_objective,
    bench_chain
);
criterion_main!(benches);
