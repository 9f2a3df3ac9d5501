//! Momentum-space TOA eigenfunctions, their position densities, completeness
//! and the barrier TOA operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, gk21_panel, integrate_complex, Estimate};
use crate::par::{self, Execution};
use crate::potentials::SquareBarrier;
use crate::testfns::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenKind {
    NonNodal,
    Nodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EigenSystem {
    Free,
    Barrier(SquareBarrier),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToaEigenfunction {
    pub kind: EigenKind,
    pub system: EigenSystem,
    pub tau: f64,
}

pub const DEFAULT_EPSILON: f64 = 0.05;

fn sgn(p: f64) -> f64 {
    if p > 0.0 {
        1.0
    } else if p < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn free_non_nodal(tau: f64, p: f64, cfg: &PhysicalConfig) -> Complex64 {
    let m = (p.abs() / (2.0 * cfg.mu)).sqrt() / (2.0 * PI * cfg.hbar).sqrt();
    Complex64::from_polar(m, p * p * tau / (2.0 * cfg.mu * cfg.hbar))
}

pub fn free_eigenfunction(kind: EigenKind, tau: f64, p: f64, cfg: &PhysicalConfig) -> Complex64 {
    let v = free_non_nodal(tau, p, cfg);
    match kind {
        EigenKind::NonNodal => v,
        EigenKind::Nodal => v * sgn(p),
    }
}

/// f(p): unimodular above the critical momentum, one below.
pub fn barrier_phase_factor(p: f64, barrier: &SquareBarrier, cfg: &PhysicalConfig) -> Complex64 {
    let pc = barrier.critical_momentum(cfg);
    if p.abs() >= pc {
        let r = ((p.abs() - pc) * (p.abs() + pc)).sqrt();
        Complex64::from_polar(1.0, -r * barrier.length() / cfg.hbar)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// e^{i|p|L/ħ} f(p).
fn barrier_factor(p: f64, barrier: &SquareBarrier, cfg: &PhysicalConfig) -> Complex64 {
    Complex64::from_polar(1.0, p.abs() * barrier.length() / cfg.hbar) * barrier_phase_factor(p, barrier, cfg)
}

pub fn barrier_eigenfunction(
    kind: EigenKind,
    tau: f64,
    p: f64,
    barrier: &SquareBarrier,
    cfg: &PhysicalConfig,
) -> Complex64 {
    free_eigenfunction(kind, tau, p, cfg) * barrier_factor(p, barrier, cfg)
}

impl ToaEigenfunction {
    pub fn new(kind: EigenKind, system: EigenSystem, tau: f64) -> Self {
        ToaEigenfunction { kind, system, tau }
    }

    pub fn evaluate(&self, p: f64, cfg: &PhysicalConfig) -> Complex64 {
        match &self.system {
            EigenSystem::Free => free_eigenfunction(self.kind, self.tau, p, cfg),
            EigenSystem::Barrier(b) => barrier_eigenfunction(self.kind, self.tau, p, b, cfg),
        }
    }

    /// dΦ/dp, undefined at p = 0 and at the critical momentum.
    pub fn derivative(&self, p: f64, cfg: &PhysicalConfig) -> Result<Complex64> {
        if p == 0.0 {
            return Err(Error::Domain("eigenfunction derivative at p = 0".into()));
        }
        let mut log_d = Complex64::new(0.5 / p, p * self.tau / (cfg.mu * cfg.hbar));
        if let EigenSystem::Barrier(b) = &self.system {
            let pc = b.critical_momentum(cfg);
            let l = b.length() / cfg.hbar;
            log_d += Complex64::new(0.0, sgn(p) * l);
            if p.abs() == pc && l != 0.0 && pc != 0.0 {
                return Err(Error::Domain(
                    "eigenfunction derivative at the critical momentum".into(),
                ));
            }
            if p.abs() > pc {
                let r = ((p.abs() - pc) * (p.abs() + pc)).sqrt();
                log_d -= Complex64::new(0.0, l * p / r);
            }
        }
        Ok(self.evaluate(p, cfg) * log_d)
    }

    /// |Φ̃(τ,q)|² with the converging factor e^{−εp²}.
    pub fn position_density(&self, q: f64, eps: f64, cfg: &PhysicalConfig) -> Result<Estimate<f64>> {
        let amp = self.position_amplitude(q, eps, cfg)?;
        let n = amp.value.norm();
        Ok(Estimate::new(n * n, 2.0 * n * amp.err_est + amp.err_est * amp.err_est))
    }

    pub fn position_amplitude(&self, q: f64, eps: f64, cfg: &PhysicalConfig) -> Result<Estimate<Complex64>> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {eps}")));
        }
        let hb = cfg.hbar;
        let p_max = ((18.0 * 10f64.ln() + 5.0) / eps).sqrt();
        // p and −p together so odd integrands cancel exactly
        let f = |p: f64| {
            let e = (-eps * p * p).exp();
            let w = Complex64::from_polar(1.0, p * q / hb);
            (self.evaluate(p, cfg) * w + self.evaluate(-p, cfg) * w.conj()) * e
        };
        let mut breaks = vec![0.0, p_max];
        if let EigenSystem::Barrier(b) = &self.system {
            let pc = b.critical_momentum(cfg);
            if pc > 0.0 && pc < p_max {
                breaks.push(pc);
            }
        }
        breaks.sort_by(f64::total_cmp);
        let l = match &self.system {
            EigenSystem::Barrier(b) => b.length(),
            EigenSystem::Free => 0.0,
        };
        let omega_max = (self.tau.abs() * p_max / cfg.mu + q.abs() + l) / hb + 1.0;
        let step = PI / omega_max;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for w in breaks.windows(2) {
            let n = ((w[1] - w[0]) / step).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / n as f64;
            for i in 0..n {
                let a = w[0] + i as f64 * h;
                let r = integrate_complex(f, a, a + h, &cfg.tol)?;
                sum += r.value;
                err += r.err_est;
            }
        }
        let s = 1.0 / (2.0 * PI * hb).sqrt();
        Ok(Estimate::new(sum * s, err * s))
    }
}

/// (T̂_B φ)(p) from φ(p) and φ'(p).
///
/// `guard` is the half-width of the excluded band around p = 0.
pub fn apply_barrier_toa_momentum(
    phi: Complex64,
    dphi: Complex64,
    p: f64,
    barrier: &SquareBarrier,
    guard: f64,
    cfg: &PhysicalConfig,
) -> Result<Complex64> {
    if p.abs() <= guard || p == 0.0 {
        return Err(Error::Domain(format!("p = {p} inside the guard band |p| <= {guard}")));
    }
    let pc = barrier.critical_momentum(cfg);
    let l = barrier.length();
    let ih = Complex64::new(0.0, cfg.hbar);
    let first = ih / p * dphi + ih * (dphi / p - phi / (p * p)) + phi * (2.0 * l / p);
    let mut out = first * (-0.5 * cfg.mu);
    if l != 0.0 && pc != 0.0 {
        if p.abs() == pc {
            return Err(Error::Domain("operator is singular at the critical momentum".into()));
        }
        if p.abs() > pc {
            out += phi * (cfg.mu * l / p / (1.0 - pc * pc / (p * p)).sqrt());
        }
    }
    Ok(out)
}

const OUTER_PANELS: usize = 12;
const INNER_NODES: usize = 8;

#[derive(Clone, Copy, PartialEq)]
enum Kink {
    None,
    Left,
    Right,
}

/// Splits [lo, hi] at the points in `cuts`, tagging the side of each piece
/// on which |p| exceeds `pc` next to a cut at ±pc.
fn segments(lo: f64, hi: f64, pc: f64) -> Vec<(f64, f64, Kink)> {
    let mut pts = vec![lo, hi];
    for c in [-pc, 0.0, pc] {
        if lo < c && c < hi {
            pts.push(c);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2)
        .map(|w| {
            let k = if pc > 0.0 && w[0] == pc {
                Kink::Left
            } else if pc > 0.0 && w[1] == -pc {
                Kink::Right
            } else {
                Kink::None
            };
            (w[0], w[1], k)
        })
        .collect()
}

/// Maps a piece with a square-root kink at one end onto a smooth integrand.
fn desingularized<T, F>(f: &F, a: f64, b: f64, kink: Kink) -> (f64, f64, impl Fn(f64) -> T + '_)
where
    T: std::ops::Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let len = b - a;
    let g = move |s: f64| match kink {
        Kink::None => f(s),
        Kink::Left => f(a + s * s) * (2.0 * s),
        Kink::Right => f(b - s * s) * (2.0 * s),
    };
    match kink {
        Kink::None => (a, b, g),
        _ => (0.0, len.sqrt(), g),
    }
}

/// Smeared completeness defect ∫∫ g*(p) h(p′) K_T(p,p′) dp dp′ − ⟨g|h⟩ where
/// K_T is the eigenfunction sum with the τ-integral cut to [−T, T].
pub fn completeness_defect(
    barrier: &SquareBarrier,
    g: &TestFunction,
    h: &TestFunction,
    t: f64,
    cfg: &PhysicalConfig,
    exec: Execution,
) -> Result<Estimate<Complex64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("cutoff T must be positive, got {t}")));
    }
    let (glo, ghi) = g.support();
    let (hlo, hhi) = h.support();
    let inner_product = if glo.max(hlo) < ghi.min(hhi) {
        integrate_complex(|p| g.value(p).conj() * h.value(p), glo.max(hlo), ghi.min(hhi), &cfg.tol)?
    } else {
        Estimate::new(Complex64::new(0.0, 0.0), 0.0)
    };
    let pc = if barrier.length() > 0.0 {
        barrier.critical_momentum(cfg)
    } else {
        0.0
    };

    let (x, w) = gauss_legendre(INNER_NODES);
    let c2 = 1.0 / (4.0 * PI * cfg.mu * cfg.hbar);
    let two_mu_hbar = 2.0 * cfg.mu * cfg.hbar;
    let inner_segs = segments(hlo, hhi, pc);
    let inner = |p: f64| -> Complex64 {
        if p == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let kern = |y: f64| {
            let om = (y - p) * (y + p) / two_mu_hbar;
            let d = if (om * t).abs() < 1e-4 {
                t * (1.0 - (om * t).powi(2) / 6.0)
            } else {
                (om * t).sin() / om
            };
            barrier_factor(y, barrier, cfg) * (y.abs().sqrt() * d) * h.value(y)
        };
        let mut sum = Complex64::new(0.0, 0.0);
        for &(lo, hi, kink) in &inner_segs {
            // only same-sign momenta survive
            if (lo + hi) * p <= 0.0 {
                continue;
            }
            let cap = (hi - lo) / 16.0;
            let mut a = lo;
            while a < hi {
                let near = a.abs().min((a + cap).abs());
                let step = (PI * two_mu_hbar / (t * (p.abs() + near))).min(cap);
                let b = (a + step).min(hi);
                let k = match kink {
                    Kink::Left if a == lo => Kink::Left,
                    Kink::Right if b == hi => Kink::Right,
                    _ => Kink::None,
                };
                let (s0, s1, f) = desingularized(&kern, a, b, k);
                let (c, r) = (0.5 * (s0 + s1), 0.5 * (s1 - s0));
                let mut piece = Complex64::new(0.0, 0.0);
                for j in 0..INNER_NODES {
                    piece += f(c + r * x[j]) * w[j];
                }
                sum += piece * r;
                a = b;
            }
        }
        barrier_factor(p, barrier, cfg).conj() * (c2 * 4.0 * p.abs().sqrt()) * sum
    };

    let outer = |p: f64| g.value(p).conj() * inner(p);
    let mut panels = Vec::new();
    for (lo, hi, kink) in segments(glo, ghi, pc) {
        let n = ((OUTER_PANELS as f64) * (hi - lo) / (ghi - glo)).ceil().max(2.0) as usize;
        let width = (hi - lo) / n as f64;
        for i in 0..n {
            let a = lo + i as f64 * width;
            let b = if i + 1 == n { hi } else { a + width };
            let k = match kink {
                Kink::Left if i == 0 => Kink::Left,
                Kink::Right if i + 1 == n => Kink::Right,
                _ => Kink::None,
            };
            panels.push((a, b, k));
        }
    }
    let est = par::map(exec, &panels, |&(a, b, k)| {
        let (s0, s1, f) = desingularized(&outer, a, b, k);
        gk21_panel(&f, s0, s1)
    });
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = inner_product.err_est;
    for p in est {
        total += p.value;
        err += p.err_est;
    }
    Ok(Estimate::new(total - inner_product.value, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PhysicalConfig {
        PhysicalConfig::default()
    }

    fn fig3() -> SquareBarrier {
        SquareBarrier::new(1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn moduli_and_pairing() {
        let c = cfg();
        for &(tau, p) in &[(0.3, 1.7), (-2.0, -0.4), (5.0, 3.3)] {
            let v = free_eigenfunction(EigenKind::NonNodal, tau, p, &c);
            assert!((v.norm_sqr() - p.abs() / (4.0 * PI)).abs() < 1e-15);
            let r = free_eigenfunction(EigenKind::NonNodal, -tau, p, &c);
            assert!((r - v.conj()).norm() < 1e-15);
            let b = barrier_eigenfunction(EigenKind::Nodal, tau, p, &fig3(), &c);
            assert!((b.norm_sqr() - p.abs() / (4.0 * PI)).abs() < 1e-14);
        }
        assert_eq!(free_eigenfunction(EigenKind::NonNodal, 1.0, 0.0, &c).norm(), 0.0);
    }

    #[test]
    fn phase_factor_continuity() {
        let c = cfg();
        let b = fig3();
        let pc = b.critical_momentum(&c);
        let at = barrier_eigenfunction(EigenKind::NonNodal, 0.7, pc, &b, &c);
        let below = barrier_eigenfunction(EigenKind::NonNodal, 0.7, pc * (1.0 - 1e-15), &b, &c);
        assert!((at - below).norm() < 1e-10);
        // the exponent closes like √δ
        for d in [1e-6, 1e-8, 1e-10, 1e-12] {
            let up = barrier_eigenfunction(EigenKind::NonNodal, 0.7, pc * (1.0 + d), &b, &c);
            assert!((up - at).norm() < 2.0 * d.sqrt() * b.length() * pc);
        }
        assert_eq!(barrier_phase_factor(0.5 * pc, &b, &c), Complex64::new(1.0, 0.0));
        assert!((barrier_phase_factor(3.0, &b, &c).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalue_equation_positive_momenta() {
        let c = cfg();
        let b = fig3();
        for tau in [-1.0, 0.0, 2.0] {
            let e = ToaEigenfunction::new(EigenKind::NonNodal, EigenSystem::Barrier(b), tau);
            for p in [0.3, 0.9, 1.3, 1.6, 4.0, 12.0] {
                let phi = e.evaluate(p, &c);
                let out = apply_barrier_toa_momentum(phi, e.derivative(p, &c).unwrap(), p, &b, 0.05, &c).unwrap();
                assert!((out - phi * tau).norm() < 1e-8, "tau={tau} p={p}");
            }
        }
    }

    #[test]
    fn free_limit_of_operator() {
        let c = cfg();
        let free = SquareBarrier::new(0.0, 0.0, 0.0).unwrap();
        let e = ToaEigenfunction::new(EigenKind::Nodal, EigenSystem::Free, 1.5);
        for p in [-3.0, -0.5, 0.7, 2.0] {
            let phi = e.evaluate(p, &c);
            let out = apply_barrier_toa_momentum(phi, e.derivative(p, &c).unwrap(), p, &free, 0.05, &c).unwrap();
            assert!((out - phi * 1.5).norm() < 1e-12);
        }
        assert!(apply_barrier_toa_momentum(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            0.01,
            &free,
            0.05,
            &c
        )
        .is_err());
    }

    #[test]
    fn nodal_density_vanishes_at_origin() {
        let c = cfg();
        for sys in [EigenSystem::Free, EigenSystem::Barrier(fig3())] {
            let e = ToaEigenfunction::new(EigenKind::Nodal, sys, 0.0);
            assert!(e.position_density(0.0, DEFAULT_EPSILON, &c).unwrap().value < 1e-10);
        }
    }

    #[test]
    fn non_nodal_density_peaks_at_origin() {
        let c = cfg();
        let e = ToaEigenfunction::new(EigenKind::NonNodal, EigenSystem::Free, 0.0);
        let d: Vec<f64> = (-20..=20)
            .map(|i| e.position_density(0.25 * i as f64, DEFAULT_EPSILON, &c).unwrap().value)
            .collect();
        let arg = d.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(arg, 20);
    }

    #[test]
    fn completeness_opposite_signs_is_zero() {
        let c = cfg();
        let g = TestFunction::bump(3.0, 1.0);
        let h = TestFunction::bump(-3.0, 1.0);
        let d = completeness_defect(&fig3(), &g, &h, 50.0, &c, Execution::Sequential).unwrap();
        assert_eq!(d.value, Complex64::new(0.0, 0.0));
    }
}
