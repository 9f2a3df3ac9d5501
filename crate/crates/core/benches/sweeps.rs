use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use toa_lab::distributions::{default_tau_grid, toa_distribution, DistributionSystem};
use toa_lab::eigenfunctions::{completeness_defect, EigenKind};
use toa_lab::potentials::SquareBarrier;
use toa_lab::testfns::TestFunction;
use toa_lab::wavepackets::GaussianPacket;
use toa_lab::{Execution, PhysicalConfig};

fn distribution_sweep(c: &mut Criterion) {
    let cfg = PhysicalConfig::default();
    let pkt = GaussianPacket::new(-9.0, 15.0, 1.2).unwrap();
    let barrier = SquareBarrier::new(1.0, 1.0, 0.5).unwrap();
    let grid = default_tau_grid(&pkt, 200, &cfg).unwrap();
    let mut g = c.benchmark_group("toa_distribution");
    g.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                toa_distribution(
                    &pkt,
                    DistributionSystem::Barrier(barrier),
                    EigenKind::NonNodal,
                    black_box(&grid),
                    &cfg,
                    exec,
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

fn completeness_sweep(c: &mut Criterion) {
    let cfg = PhysicalConfig::default();
    let barrier = SquareBarrier::new(1.0, 1.0, 0.5).unwrap();
    let f = TestFunction::Gaussian {
        center: 15.0,
        width: 1.0,
        wavenumber: 9.0,
    };
    let mut g = c.benchmark_group("completeness_defect");
    g.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| completeness_defect(&barrier, &f, &f, black_box(2.0), &cfg, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, distribution_sweep, completeness_sweep);
criterion_main!(benches);
