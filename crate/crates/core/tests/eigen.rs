use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use toa_lab::eigenfunctions::{
    apply_barrier_toa_momentum, barrier_phase_factor, completeness_defect, free_eigenfunction, EigenKind, EigenSystem,
    ToaEigenfunction,
};
use toa_lab::potentials::SquareBarrier;
use toa_lab::testfns::TestFunction;
use toa_lab::{Execution, PhysicalConfig};

fn cfg() -> PhysicalConfig {
    PhysicalConfig::default()
}

fn barrier() -> SquareBarrier {
    SquareBarrier::new(1.0, 1.0, 0.5).unwrap()
}

#[test]
fn eigenvalue_residual_small_for_positive_momenta() {
    let c = cfg();
    let b = barrier();
    let pc = b.critical_momentum(&c);
    for tau in [-1.0, 0.0, 2.0] {
        let e = ToaEigenfunction::new(EigenKind::NonNodal, EigenSystem::Barrier(b), tau);
        for p in [0.2, 0.7, 1.3, 1.6, 3.0, 12.0] {
            assert!((p - pc).abs() > 0.05);
            let phi = e.evaluate(p, &c);
            let out = apply_barrier_toa_momentum(phi, e.derivative(p, &c).unwrap(), p, &b, 0.05, &c).unwrap();
            assert!((out - phi * tau).norm() < 1e-8, "tau {tau} p {p}");
        }
    }
}

#[test]
fn derivative_undefined_at_zero_and_threshold() {
    let c = cfg();
    let b = barrier();
    let e = ToaEigenfunction::new(EigenKind::NonNodal, EigenSystem::Barrier(b), 0.3);
    assert!(e.derivative(0.0, &c).is_err());
    assert!(e.derivative(b.critical_momentum(&c), &c).is_err());
}

#[test]
fn derivative_matches_differences() {
    let c = cfg();
    let e = ToaEigenfunction::new(EigenKind::Nodal, EigenSystem::Barrier(barrier()), 0.7);
    for p in [-3.0, -0.6, 0.4, 2.5] {
        let h = 1e-5;
        let fd = (e.evaluate(p + h, &c) - e.evaluate(p - h, &c)) / (2.0 * h);
        let d = e.derivative(p, &c).unwrap();
        assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0), "{p}: {fd} vs {d}");
    }
}

#[test]
fn nodal_density_vanishes_at_origin() {
    let c = cfg();
    for sys in [EigenSystem::Free, EigenSystem::Barrier(barrier())] {
        let e = ToaEigenfunction::new(EigenKind::Nodal, sys, 0.4);
        assert!(e.position_density(0.0, 0.05, &c).unwrap().value < 1e-10);
        let n = ToaEigenfunction::new(EigenKind::NonNodal, sys, 0.4);
        assert!(n.position_density(0.0, 0.05, &c).unwrap().value > 1e-3);
    }
}

#[test]
fn position_amplitude_rejects_bad_epsilon() {
    let e = ToaEigenfunction::new(EigenKind::NonNodal, EigenSystem::Free, 0.0);
    assert!(e.position_amplitude(0.0, 0.0, &cfg()).is_err());
}

#[test]
fn completeness_defect_small_for_long_windows() {
    let c = cfg();
    let g = TestFunction::Gaussian {
        center: 15.0,
        width: 1.0,
        wavenumber: 9.0,
    };
    let short = completeness_defect(&barrier(), &g, &g, 0.5, &c, Execution::default()).unwrap();
    let long = completeness_defect(&barrier(), &g, &g, 20.0, &c, Execution::default()).unwrap();
    assert!(short.value.norm() > 0.1);
    assert!(long.value.norm() < 1e-6, "{}", long.value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn free_modulus_fixed(p in -50.0f64..50.0, tau in -5.0f64..5.0) {
        let c = cfg();
        for kind in [EigenKind::NonNodal, EigenKind::Nodal] {
            let v: Complex64 = free_eigenfunction(kind, tau, p, &c);
            let want = p.abs() / (4.0 * PI * c.hbar * c.mu);
            prop_assert!((v.norm_sqr() - want).abs() <= 1e-14 * want.max(1e-300));
        }
    }

    #[test]
    fn phase_factor_unimodular(p in -30.0f64..30.0, v0 in 0.1f64..50.0, len in 0.1f64..3.0) {
        let c = cfg();
        let b = SquareBarrier::new(v0, 0.5 + len, 0.5).unwrap();
        prop_assert!((barrier_phase_factor(p, &b, &c).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn barrier_modulus_matches_free(p in -30.0f64..30.0, tau in -3.0f64..3.0) {
        let c = cfg();
        let b = ToaEigenfunction::new(EigenKind::NonNodal, EigenSystem::Barrier(barrier()), tau).evaluate(p, &c);
        let f = free_eigenfunction(EigenKind::NonNodal, tau, p, &c);
        prop_assert!((b.norm() - f.norm()).abs() <= 1e-14 * f.norm().max(1e-300));
    }
}
