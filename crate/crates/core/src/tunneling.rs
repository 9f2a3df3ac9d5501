//! Tunneling-time pipelines and the time-energy commutator defect.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{PhysicalConfig, Tolerance};
use crate::eigenfunctions::{barrier_eigenfunction, barrier_phase_factor, free_eigenfunction, EigenKind};
use crate::error::{Error, Result};
use crate::kernels::{barrier_kernel_piece, weyl_kernel, Region, TimeKernel};
use crate::numerics::{
    bessel_j0, integrate, integrate_complex, integrate_fourier_window, integrate_pv, Estimate, PrincipalValueSpec,
};
use crate::ordering::OrderingRule;
use crate::potentials::{Potential, SquareBarrier};
use crate::testfns::TestFunction;
use crate::wavepackets::GaussianPacket;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    CoordinateKernel,
    MomentumQr,
    Eigenfunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelTimeReport {
    pub delta_tau: f64,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub tau_trav: Option<f64>,
    pub route: Route,
    pub err_est: f64,
}

impl TunnelTimeReport {
    fn zero(route: Route) -> Self {
        TunnelTimeReport {
            delta_tau: 0.0,
            q: None,
            r: None,
            tau_trav: None,
            route,
            err_est: 0.0,
        }
    }
}

/// Φ(ζ) below this is dropped from the coordinate integral.
const PHI_CUTOFF: f64 = 1e-18;

/// Δτ̄ = (μL/ħ) Im ∫₀^∞ e^{ik₀ζ} [1 − J₀(κ₀ζ)] Φ(ζ) dζ.
pub fn delta_tau_coordinate(
    pkt: &GaussianPacket,
    barrier: &SquareBarrier,
    cfg: &PhysicalConfig,
) -> Result<TunnelTimeReport> {
    let l = barrier.length();
    let kappa = barrier.kappa(cfg);
    if l == 0.0 || kappa == 0.0 {
        return Ok(TunnelTimeReport::zero(Route::CoordinateKernel));
    }
    let zmax = pkt.sigma * (8.0 * (1.0 / PHI_CUTOFF).ln()).sqrt();
    let f = |z: f64| (1.0 - bessel_j0(kappa * z)) * pkt.overlap_phi(z);
    let r = integrate_fourier_window(f, pkt.k0, 0.0, zmax, &cfg.tol)?;
    // |1 − J₀| ≤ 2 bounds the dropped tail
    let tail =
        2.0 * pkt.sigma * (2.0 * std::f64::consts::PI).sqrt() * 0.5 * libm::erfc(zmax / (8f64.sqrt() * pkt.sigma));
    let pref = cfg.mu * l / cfg.hbar;
    Ok(TunnelTimeReport {
        delta_tau: pref * r.value.im,
        q: None,
        r: None,
        tau_trav: None,
        route: Route::CoordinateKernel,
        err_est: pref * (r.err_est + tail),
    })
}

/// PV ∫ |ψ̃(k)|²/k dk over the packet's k-window.
fn packet_pv_moment(pkt: &GaussianPacket, tol: &Tolerance) -> Result<Estimate<f64>> {
    let w = pkt.k_window();
    let (lo, hi) = (pkt.k0 - w, pkt.k0 + w);
    let f = |k: f64| pkt.momentum_density(k) / k;
    if lo < 0.0 && hi > 0.0 {
        let d0 = 0.25 * (-lo).min(hi);
        integrate_pv(f, lo, hi, PrincipalValueSpec::new(0.0, d0), tol)
    } else if lo >= 0.0 {
        integrate(f, lo.max(1e-3 * w), hi, tol)
    } else {
        integrate(f, lo, hi.min(-1e-3 * w), tol)
    }
}

/// ∫₀ g(κ cosh u) du over the u-range where the packet has weight.
fn cosh_integral<G: Fn(f64) -> f64>(g: G, pkt: &GaussianPacket, kappa: f64, tol: &Tolerance) -> Result<Estimate<f64>> {
    let reach = pkt.k0.abs() + pkt.k_window();
    let u_max = if reach > kappa { (reach / kappa).acosh() } else { 1.0 };
    let f = |u: f64| g(kappa * u.cosh());
    let mut breaks = vec![0.0, u_max];
    if pkt.k0.abs() > kappa {
        let up = (pkt.k0.abs() / kappa).acosh();
        if up < u_max {
            breaks.push(up);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let mut v = 0.0;
    let mut e = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let r = integrate(f, w[0], w[1], tol)?;
            v += r.value;
            e += r.err_est;
        }
    }
    Ok(Estimate::new(v, e))
}

/// Q and R from the packet's momentum distribution; Δτ̄ = (L/ν₀)(Q − R) is
/// evaluated in the pre-division form (μL/ħ)(Q − R)/k₀.
pub fn delta_tau_momentum(
    pkt: &GaussianPacket,
    barrier: &SquareBarrier,
    cfg: &PhysicalConfig,
) -> Result<TunnelTimeReport> {
    let l = barrier.length();
    let kappa = barrier.kappa(cfg);
    let pref = cfg.mu * l / cfg.hbar;
    let tol = &cfg.tol;
    let x = packet_pv_moment(pkt, tol)?;
    let (y, y_plus) = if kappa == 0.0 {
        let w = pkt.k_window();
        let yp = if pkt.k0 - w > 0.0 {
            Some(integrate(|k| pkt.momentum_density(k) / k, pkt.k0 - w, pkt.k0 + w, tol)?)
        } else {
            None
        };
        (x, yp)
    } else {
        let y = cosh_integral(|k| pkt.momentum_density(k) - pkt.momentum_density(-k), pkt, kappa, tol)?;
        let yp = cosh_integral(|k| pkt.momentum_density(k), pkt, kappa, tol)?;
        (y, Some(yp))
    };
    Ok(TunnelTimeReport {
        delta_tau: pref * (x.value - y.value),
        q: Some(pkt.k0 * x.value),
        r: Some(pkt.k0 * y.value),
        tau_trav: y_plus.map(|t| pref * t.value),
        route: Route::MomentumQr,
        err_est: pref * (x.err_est + y.err_est + f64::EPSILON * (x.value.abs() + y.value.abs())),
    })
}

/// Derivative of a unimodular function's phase by a fourth-order stencil.
/// `side` selects a one-sided stencil pointing away from a kink.
fn phase_derivative<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64, side: i32) -> f64 {
    let base = f(x).conj();
    let d = |k: f64| (f(x + k * h) * base).arg();
    match side {
        0 => (8.0 * (d(1.0) - d(-1.0)) - (d(2.0) - d(-2.0))) / (12.0 * h),
        s => {
            let s = s.signum() as f64;
            s * (48.0 * d(s) - 36.0 * d(2.0 * s) + 16.0 * d(3.0 * s) - 3.0 * d(4.0 * s)) / (12.0 * h)
        }
    }
}

/// Δτ̄ = μħ P.V.∫ |ψ(p)|² Θ′(p)/|p| dp with Θ the phase of Φ_B/Φ_F, the
/// derivatives taken numerically from the eigenfunctions themselves.
pub fn delta_tau_eigen(
    pkt: &GaussianPacket,
    barrier: &SquareBarrier,
    cfg: &PhysicalConfig,
) -> Result<TunnelTimeReport> {
    let l = barrier.length();
    if l == 0.0 {
        return Ok(TunnelTimeReport::zero(Route::Eigenfunction));
    }
    let hb = cfg.hbar;
    let pc = barrier.critical_momentum(cfg);
    let tol = &cfg.tol;
    let dens = |p: f64| pkt.momentum_density(p / hb) / hb;
    let scale = hb / pkt.sigma;
    let h_p = 1e-3 * scale;

    // phase carried by e^{i|p|L/ħ}
    let ratio_l = |p: f64| {
        let b = barrier_eigenfunction(EigenKind::NonNodal, 0.0, p, barrier, cfg);
        let f = free_eigenfunction(EigenKind::NonNodal, 0.0, p, cfg);
        b / (f * barrier_phase_factor(p, barrier, cfg))
    };
    let f_phase = |p: f64| barrier_phase_factor(p, barrier, cfg);
    let theta_prime = |g: &dyn Fn(f64) -> Complex64, p: f64| {
        let side = if p.abs() < 2.0 * h_p { p.signum() as i32 } else { 0 };
        phase_derivative(g, p, h_p, side)
    };

    let w = pkt.k_window() * hb;
    let (lo, hi) = (pkt.k0 * hb - w, pkt.k0 * hb + w);
    let pv_over_window = |g: &dyn Fn(f64) -> Complex64| -> Result<Estimate<f64>> {
        let integrand = |p: f64| dens(p) * theta_prime(g, p) / p.abs();
        if lo < 0.0 && hi > 0.0 {
            let d0 = 0.25 * (-lo).min(hi);
            integrate_pv(integrand, lo, hi, PrincipalValueSpec::new(0.0, d0), tol)
        } else if lo >= 0.0 {
            integrate(integrand, lo.max(1e-3 * w), hi, tol)
        } else {
            integrate(integrand, lo, hi.min(-1e-3 * w), tol)
        }
    };
    let i_l = pv_over_window(&ratio_l)?;

    let (i_f, i_f_plus) = if pc == 0.0 {
        (pv_over_window(&f_phase)?, None)
    } else {
        let h_u = 1e-3;
        // p = ±pc cosh u
        let side_term = |sign: f64| {
            let g = move |u: f64| f_phase(sign * pc * u.cosh());
            move |u: f64| {
                let side = if u < 2.0 * h_u { 1 } else { 0 };
                let dth = phase_derivative(g, u, h_u, side);
                sign * dens(sign * pc * u.cosh()) * dth / (pc * u.cosh())
            }
        };
        let reach = pkt.k0.abs() * hb + w;
        let u_max = if reach > pc { (reach / pc).acosh() } else { 1.0 };
        let mut breaks = vec![0.0, u_max];
        if pkt.k0.abs() * hb > pc {
            let up = (pkt.k0.abs() * hb / pc).acosh();
            if up < u_max {
                breaks.push(up);
            }
        }
        breaks.sort_by(f64::total_cmp);
        let mut plus = Estimate::new(0.0, 0.0);
        let mut minus = Estimate::new(0.0, 0.0);
        for win in breaks.windows(2) {
            let a = integrate(side_term(1.0), win[0], win[1], tol)?;
            let b = integrate(side_term(-1.0), win[0], win[1], tol)?;
            plus = Estimate::new(plus.value + a.value, plus.err_est + a.err_est);
            minus = Estimate::new(minus.value + b.value, minus.err_est + b.err_est);
        }
        (
            Estimate::new(plus.value + minus.value, plus.err_est + minus.err_est),
            Some(plus),
        )
    };

    let mh = cfg.mu * hb;
    // Q = (ν₀/L)·μħ·I_L, R = −(ν₀/L)·μħ·I_f
    let nu_over_l = hb * pkt.k0 / (cfg.mu * l);
    Ok(TunnelTimeReport {
        delta_tau: mh * (i_l.value + i_f.value),
        q: Some(nu_over_l * mh * i_l.value),
        r: Some(-nu_over_l * mh * i_f.value),
        tau_trav: i_f_plus.map(|e| -mh * e.value),
        route: Route::Eigenfunction,
        err_est: mh * (i_l.err_est + i_f.err_est + 1e-12 * (i_l.value.abs() + i_f.value.abs())),
    })
}

/// Largest pointwise change that `rule` makes to the free kernel and the
/// region-III barrier kernel over a grid.
pub fn ordering_invariance_check(rule: &OrderingRule, barrier: &SquareBarrier, cfg: &PhysicalConfig) -> Result<f64> {
    let bases = [
        weyl_kernel(&Potential::Free, cfg)?,
        barrier_kernel_piece(barrier, Region::III, cfg),
    ];
    let mut worst: f64 = 0.0;
    for base in &bases {
        let deformed = rule.deform(base)?;
        for i in 0..=20 {
            let eta = -barrier.a - 4.0 + 0.2 * i as f64;
            for j in 0..=20 {
                let zeta = -3.0 + 0.3 * j as f64;
                worst = worst.max((deformed.value(eta, zeta)? - base.value(eta, zeta)?).abs());
            }
        }
    }
    Ok(worst)
}

fn hamiltonian(f: &TestFunction, q: f64, potential: &Potential, cfg: &PhysicalConfig) -> Complex64 {
    f.second_derivative(q) * (-cfg.hbar * cfg.hbar / (2.0 * cfg.mu)) + f.value(q) * potential.evaluate(q, cfg)
}

/// ⟨φ|[Ĥ, T̂]|ψ⟩ − iħ⟨φ|ψ⟩ from the kernel double integral.
pub fn teccr_defect(
    kernel: &TimeKernel,
    potential: &Potential,
    phi: &TestFunction,
    psi: &TestFunction,
    cfg: &PhysicalConfig,
) -> Result<Estimate<Complex64>> {
    let (plo, phi_hi) = phi.support();
    let (slo, shi) = psi.support();
    if let Potential::SquareBarrier(b) = potential {
        for e in [-b.a, -b.b] {
            if (plo < e && e < phi_hi) || (slo < e && e < shi) {
                return Err(Error::DerivativeUnavailable(format!(
                    "test-function support crosses the barrier edge {e}"
                )));
            }
        }
    }
    let tol = &cfg.tol;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_err = RefCell::new(0.0f64);
    let pre = Complex64::new(0.0, -cfg.mu / cfg.hbar);
    let outer = |q: f64| -> Complex64 {
        if failure.borrow().is_some() {
            return Complex64::new(0.0, 0.0);
        }
        let hphi = hamiltonian(phi, q, potential, cfg).conj();
        let phic = phi.value(q).conj();
        let inner = |qp: f64| -> Complex64 {
            let t = match kernel.value_qq(q, qp) {
                Ok(t) => t,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return Complex64::new(0.0, 0.0);
                }
            };
            let s = if q > qp { 1.0 } else { -1.0 };
            (hphi * psi.value(qp) - phic * hamiltonian(psi, qp, potential, cfg)) * (t * s)
        };
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pts = vec![slo, shi];
        if slo < q && q < shi {
            pts.push(q);
        }
        pts.sort_by(f64::total_cmp);
        for w in pts.windows(2) {
            match integrate_complex(inner, w[0], w[1], tol) {
                Ok(r) => {
                    sum += r.value;
                    let mut e = inner_err.borrow_mut();
                    *e = e.max(r.err_est);
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                }
            }
        }
        sum * pre
    };
    let mut pts = vec![plo, phi_hi];
    if plo < slo && slo < phi_hi {
        pts.push(slo);
    }
    if plo < shi && shi < phi_hi {
        pts.push(shi);
    }
    pts.sort_by(f64::total_cmp);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in pts.windows(2) {
        let r = integrate_complex(outer, w[0], w[1], tol)?;
        total += r.value;
        err += r.err_est;
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let lo = plo.max(slo);
    let hi = phi_hi.min(shi);
    let overlap = if lo < hi {
        integrate_complex(|q| phi.value(q).conj() * psi.value(q), lo, hi, tol)?
    } else {
        Estimate::new(Complex64::new(0.0, 0.0), 0.0)
    };
    let ih = Complex64::new(0.0, cfg.hbar);
    let defect = total - ih * overlap.value;
    let err = err + (cfg.mu / cfg.hbar) * inner_err.into_inner() * (phi_hi - plo) + cfg.hbar * overlap.err_est;
    Ok(Estimate::new(defect, err))
}
