use toa_lab::kernels::{
    barrier_kernel_piece, barrier_kernel_stitched, supra_correction_chain, supra_correction_n1, tke_residual,
    weyl_integral, weyl_kernel, Provenance, Region,
};
use toa_lab::ordering::{closed_form_kernel, BuiltinRule, OrderingRule};
use toa_lab::potentials::{Potential, SquareBarrier};
use toa_lab::{Error, PhysicalConfig};

fn cfg() -> PhysicalConfig {
    PhysicalConfig::default()
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -2.0 + 4.0 * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn weyl_quadrature_matches_closed_forms() {
    let c = cfg();
    for v in [Potential::Linear { lambda: 1.0 }, Potential::Harmonic { omega: 1.0 }] {
        let k = weyl_kernel(&v, &c).unwrap();
        for &eta in &grid(9) {
            for &zeta in &grid(9) {
                let exact = closed_form_kernel(BuiltinRule::Weyl, &v, eta, zeta, &c).unwrap();
                let got = k.value(eta, zeta).unwrap();
                assert!(
                    (got - exact).abs() <= 1e-9 * exact.abs().max(1e-12),
                    "{v:?} ({eta},{zeta}): {got} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn weyl_free_kernel_is_half_eta() {
    let k = weyl_kernel(&Potential::Free, &cfg()).unwrap();
    assert_eq!(k.value(-1.3, 0.8).unwrap(), -0.65);
    assert_eq!(k.provenance(), Provenance::WeylIntegral);
    assert_eq!(
        weyl_kernel(&Potential::square_barrier(1.0, 1.0, 0.5).unwrap(), &cfg()).unwrap_err(),
        Error::NotAnalytic
    );
}

#[test]
fn deformed_kernels_match_closed_forms() {
    let c = cfg();
    let mut worst: f64 = 0.0;
    for v in [Potential::Linear { lambda: 1.0 }, Potential::Harmonic { omega: 1.0 }] {
        let base = weyl_kernel(&v, &c).unwrap();
        for rule in [BuiltinRule::BornJordan, BuiltinRule::SimpleSymmetric] {
            let k = OrderingRule::builtin(rule).deform(&base).unwrap();
            for &eta in &grid(20) {
                for &zeta in &grid(20) {
                    let exact = closed_form_kernel(rule, &v, eta, zeta, &c).unwrap();
                    let got = k.value(eta, zeta).unwrap();
                    let rel = (got - exact).abs() / exact.abs().max(1e-300);
                    worst = worst.max(if exact == 0.0 { got.abs() } else { rel });
                }
            }
        }
    }
    println!("worst relative error {worst:e}");
    assert!(worst < 1e-8);
}

#[test]
fn barrier_piece_examples() {
    let c = cfg();
    let b = SquareBarrier::new(1.0, 1.0, 0.5).unwrap();
    let iii = barrier_kernel_piece(&b, Region::III, &c);
    assert_eq!(iii.value(-1.7, 0.0).unwrap(), -0.85);
    let flat = SquareBarrier::new(0.0, 1.0, 0.5).unwrap();
    assert_eq!(
        barrier_kernel_piece(&flat, Region::III, &c).value(-1.7, 0.9).unwrap(),
        -0.85
    );
    let ii = barrier_kernel_piece(&b, Region::II, &c);
    let i0 = toa_lab::numerics::bessel_i0(2f64.sqrt()).unwrap();
    let expected = -0.2 / 2.0 - 0.25 * i0;
    assert!((ii.value(-0.7, 1.0).unwrap() - expected).abs() < 1e-15);
    let quad = weyl_integral(&Potential::SquareBarrier(b), -0.7, 1.0, &c).unwrap();
    assert!((quad.value - expected).abs() < 1e-12);
}

#[test]
fn stitched_kernel_refuses_deformation() {
    let c = cfg();
    let b = SquareBarrier::new(1.0, 1.0, 0.5).unwrap();
    let k = barrier_kernel_stitched(&b, &c);
    assert!(
        (k.value(-0.7, 1.0).unwrap() - barrier_kernel_piece(&b, Region::II, &c).value(-0.7, 1.0).unwrap()).abs()
            < 1e-15
    );
    let rule = OrderingRule::builtin(BuiltinRule::BornJordan);
    assert!(matches!(rule.deform(&k), Err(Error::DerivativeUnavailable(_))));
    assert!(OrderingRule::builtin(BuiltinRule::Weyl).deform(&k).is_ok());
}

#[test]
fn supra_corrections() {
    let c = cfg();
    for v in [Potential::Linear { lambda: 2.0 }, Potential::Harmonic { omega: 1.5 }] {
        let base = weyl_kernel(&v, &c).unwrap();
        assert!(supra_correction_n1(&v, &base, &c).unwrap().is_zero());
    }
    let b = SquareBarrier::new(1.0, 1.0, 0.5).unwrap();
    for n in 1..=5 {
        let chain = supra_correction_chain(&b, n, &c).unwrap();
        assert!(chain.log.all_vanish() && chain.log.is_consistent());
        for r in Region::ALL {
            assert_eq!(chain.kernel(r).value(-1.3, 0.7).unwrap(), 0.0);
        }
    }
    let quartic = Potential::Polynomial {
        coeffs: vec![0.0, 0.0, 0.0, 0.0, 1.0],
    };
    let base = weyl_kernel(&quartic, &c).unwrap();
    let corr = supra_correction_n1(&quartic, &base, &c).unwrap();
    println!("quartic correction at (1,1): {:.15}", corr.value(1.0, 1.0).unwrap());
}

#[test]
fn tke_residuals() {
    let c = cfg();
    let free = weyl_kernel(&Potential::Free, &c).unwrap();
    let r = tke_residual(&free, &Potential::Free, 1.0, 0.3, &c).unwrap();
    assert!(r.residual.abs() < 1e-12 && r.diagonal_defect == 0.0 && r.antidiagonal_value == 0.0);
    let h = Potential::Harmonic { omega: 1.0 };
    let w = weyl_kernel(&h, &c).unwrap();
    let rw = tke_residual(&w, &h, 1.0, 0.3, &c).unwrap();
    let bj = OrderingRule::builtin(BuiltinRule::BornJordan).deform(&w).unwrap();
    let rb = tke_residual(&bj, &h, 1.0, 0.3, &c).unwrap();
    println!("weyl residual {:e}, bj residual {:e}", rw.residual, rb.residual);
    assert!(rw.residual.abs() < 1e-6);
    assert!(rb.residual.abs() > 1e-4);
}
