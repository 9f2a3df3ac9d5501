use toa_lab::distributions::{
    classical_free_toa, default_tau_grid, peak_shift, toa_distribution, DistributionSystem, TOADistribution,
};
use toa_lab::eigenfunctions::EigenKind;
use toa_lab::potentials::SquareBarrier;
use toa_lab::wavepackets::GaussianPacket;
use toa_lab::{Error, Execution, PhysicalConfig};

fn cfg() -> PhysicalConfig {
    PhysicalConfig::default()
}

fn packet() -> GaussianPacket {
    GaussianPacket::new(-9.0, 15.0, 1.2).unwrap()
}

fn run(system: DistributionSystem, exec: Execution) -> TOADistribution {
    let c = cfg();
    let grid = default_tau_grid(&packet(), 300, &c).unwrap();
    toa_distribution(&packet(), system, EigenKind::NonNodal, &grid, &c, exec).unwrap()
}

#[test]
fn free_distribution_centred_on_classical_time() {
    let d = run(DistributionSystem::Free, Execution::default());
    assert!(d.failures.is_empty());
    assert!((d.norm_captured - 1.0).abs() < 1e-3, "{}", d.norm_captured);
    let t = classical_free_toa(&packet(), &cfg()).unwrap();
    assert!((d.mean_arrival().unwrap() - t).abs() < 0.01 * t);
    assert!((d.peak().unwrap() - t).abs() < 0.02 * t);
}

#[test]
fn opaque_barrier_matches_shortened_free_travel() {
    let b = SquareBarrier::new(200.0, 1.0, 0.5).unwrap();
    let d = run(DistributionSystem::Barrier(b), Execution::default());
    let s = run(DistributionSystem::FreeShortened(b), Execution::default());
    let free = run(DistributionSystem::Free, Execution::default());
    let shift = peak_shift(&free, &d).unwrap();
    assert!((shift - peak_shift(&free, &s).unwrap()).abs() < 1e-3);
    assert!((shift + 1.0 / 30.0).abs() < 0.1 / 30.0, "{shift}");
    let l1 = d.shifted_l1(&free, -shift);
    assert!(l1 < 0.02, "{l1}");
}

#[test]
fn sequential_and_parallel_agree() {
    let b = SquareBarrier::new(1.0, 1.0, 0.5).unwrap();
    let a = run(DistributionSystem::Barrier(b), Execution::Sequential);
    let p = run(DistributionSystem::Barrier(b), Execution::Parallel);
    assert_eq!(a.values, p.values);
}

#[test]
fn bad_grid_rejected() {
    let c = cfg();
    let r = toa_distribution(
        &packet(),
        DistributionSystem::Free,
        EigenKind::NonNodal,
        &[0.0, 0.2, 0.1],
        &c,
        Execution::default(),
    );
    assert!(matches!(r, Err(Error::InvalidInput(_))));
    assert!(default_tau_grid(&packet(), 2, &c).is_err());
}

#[test]
fn receding_packet_has_no_classical_time() {
    let p = GaussianPacket::new(-9.0, -15.0, 1.2).unwrap();
    assert!(classical_free_toa(&p, &cfg()).is_err());
}
