use proptest::prelude::*;
use toa_lab::potentials::SquareBarrier;
use toa_lab::tunneling::{delta_tau_coordinate, delta_tau_eigen, delta_tau_momentum, Route};
use toa_lab::wavepackets::{GaussianPacket, Support};
use toa_lab::PhysicalConfig;

fn cfg() -> PhysicalConfig {
    PhysicalConfig::default()
}

fn reference_packet() -> GaussianPacket {
    GaussianPacket::new(-9.0, 15.0, 1.2).unwrap()
}

#[test]
fn three_routes_agree_on_reference_packet() {
    let c = cfg();
    let b = SquareBarrier::new(1.0, 1.0, 0.5).unwrap();
    let p = reference_packet();
    let m = delta_tau_momentum(&p, &b, &c).unwrap();
    let x = delta_tau_coordinate(&p, &b, &c).unwrap();
    let e = delta_tau_eigen(&p, &b, &c).unwrap();
    assert_eq!(m.route, Route::MomentumQr);
    assert!((m.delta_tau - (-1.4984476386e-4)).abs() < 1e-12, "{}", m.delta_tau);
    assert!((m.delta_tau - x.delta_tau).abs() < 1e-12);
    assert!((m.delta_tau - e.delta_tau).abs() < 1e-10);
}

#[test]
fn below_barrier_time_equals_free_traversal() {
    let c = cfg();
    let b = SquareBarrier::new(200.0, 1.0, 0.5).unwrap();
    let p = reference_packet();
    let m = delta_tau_momentum(&p, &b, &c).unwrap();
    // Δτ̄ → (μL/ħ)X with Y, τ_trav negligible.
    assert!(m.tau_trav.unwrap() < 1e-30);
    assert!((m.delta_tau - 0.033359).abs() < 1e-6, "{}", m.delta_tau);
    assert!(m.delta_tau > b.length() / p.k0);
}

#[test]
fn report_serialises_with_capital_keys() {
    let c = cfg();
    let b = SquareBarrier::new(1.0, 1.0, 0.5).unwrap();
    let m = delta_tau_momentum(&reference_packet(), &b, &c).unwrap();
    let v = serde_json::to_value(m).unwrap();
    assert!(v.get("Q").is_some() && v.get("R").is_some());
}

#[test]
fn tau_trav_falls_as_barrier_rises_past_the_packet() {
    let c = cfg();
    let p = reference_packet();
    let mut last = f64::INFINITY;
    for v0 in [130.0, 150.0, 170.0, 200.0, 250.0] {
        let b = SquareBarrier::new(v0, 1.0, 0.5).unwrap();
        let t = delta_tau_momentum(&p, &b, &c).unwrap().tau_trav.unwrap();
        assert!(t <= last, "V0 {v0}: {t} > {last}");
        last = t;
    }
}

fn packet_strategy() -> impl Strategy<Value = GaussianPacket> {
    (0.8f64..2.0, 5.0f64..25.0).prop_map(|(s, k)| GaussianPacket::new(-30.0, k, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn delta_tau_linear_in_length(p in packet_strategy(), frac in 0.05f64..0.9, len in 0.1f64..2.0) {
        let c = cfg();
        let kappa = frac * (p.k0 - 3.0 / p.sigma).max(0.5);
        let v0 = kappa * kappa / 2.0;
        let one = delta_tau_momentum(&p, &SquareBarrier::new(v0, 1.0 + len, 1.0).unwrap(), &c).unwrap();
        let two = delta_tau_momentum(&p, &SquareBarrier::new(v0, 1.0 + 2.0 * len, 1.0).unwrap(), &c).unwrap();
        prop_assert!((two.delta_tau - 2.0 * one.delta_tau).abs() <= 1e-9 * one.delta_tau.abs());
    }

    #[test]
    fn sign_follows_support(p in packet_strategy(), above in any::<bool>(), f in 0.1f64..0.8) {
        let c = cfg();
        let w = p.k_window();
        let kappa = if above { f * (p.k0 - w) } else { (p.k0 + w) * (1.0 + f) };
        prop_assume!(kappa > 0.0);
        let b = SquareBarrier::new(kappa * kappa / 2.0, 1.0, 0.5).unwrap();
        let class = p.support_classification(kappa, 5.0).unwrap();
        prop_assume!(class != Support::Mixed);
        let m = delta_tau_momentum(&p, &b, &c).unwrap();
        if class == Support::AboveBarrier {
            prop_assert!(m.delta_tau < 0.0);
            prop_assert!(m.q.unwrap() >= 1.0 && m.r.unwrap() >= m.q.unwrap());
        } else {
            prop_assert!(m.delta_tau > 0.0);
        }
    }

    #[test]
    fn momentum_and_eigen_routes_agree(p in packet_strategy(), f in 0.1f64..2.0) {
        let c = cfg();
        let kappa = f * p.k0;
        let b = SquareBarrier::new(kappa * kappa / 2.0, 1.0, 0.5).unwrap();
        let m = delta_tau_momentum(&p, &b, &c).unwrap();
        let e = delta_tau_eigen(&p, &b, &c).unwrap();
        let allowed = (1e-6 * m.delta_tau.abs()).max(m.err_est + e.err_est);
        prop_assert!((m.delta_tau - e.delta_tau).abs() <= allowed, "{} vs {}", m.delta_tau, e.delta_tau);
    }

    #[test]
    fn traversal_instantaneous_well_below_barrier(p in packet_strategy(), f in 0.0f64..1.0, len in 0.1f64..2.0) {
        let c = cfg();
        let kappa = p.k0 + 8.0 / (2.0 * p.sigma) * (1.0 + f);
        let b = SquareBarrier::new(kappa * kappa / 2.0, 0.5 + len, 0.5).unwrap();
        let m = delta_tau_momentum(&p, &b, &c).unwrap();
        prop_assert!(m.tau_trav.unwrap() < 1e-8 * len / p.k0);
    }
}
