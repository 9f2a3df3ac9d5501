//! Gaussian incident states.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::potentials::SquareBarrier;

/// ψ(q) = (σ√(2π))^{−1/2} e^{−(q−q₀)²/4σ²} e^{ik₀q}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPacket")]
pub struct GaussianPacket {
    pub q0: f64,
    pub k0: f64,
    pub sigma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPacket {
    q0: f64,
    k0: f64,
    sigma: f64,
}

impl TryFrom<RawPacket> for GaussianPacket {
    type Error = Error;
    fn try_from(r: RawPacket) -> Result<Self> {
        GaussianPacket::new(r.q0, r.k0, r.sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    AboveBarrier,
    BelowBarrier,
    Mixed,
}

/// Leakage above this is flagged.
pub const LEAKAGE_WARN: f64 = 1e-6;

impl GaussianPacket {
    pub fn new(q0: f64, k0: f64, sigma: f64) -> Result<Self> {
        if !(q0.is_finite() && k0.is_finite()) {
            return Err(Error::InvalidInput("packet q0 and k0 must be finite".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "packet sigma must be positive, got {sigma}"
            )));
        }
        Ok(GaussianPacket { q0, k0, sigma })
    }

    pub fn position_amp(&self, q: f64) -> Complex64 {
        let u = q - self.q0;
        let n = (self.sigma * (2.0 * PI).sqrt()).powf(-0.5);
        let env = n * (-u * u / (4.0 * self.sigma * self.sigma)).exp();
        Complex64::from_polar(env, self.k0 * q)
    }

    /// Wavenumber amplitude ψ̃(k), normalized in dk.
    pub fn momentum_amp(&self, k: f64) -> Complex64 {
        let s2 = self.sigma * self.sigma;
        let d = k - self.k0;
        let m = (2.0 * s2 / PI).powf(0.25) * (-s2 * d * d).exp();
        Complex64::from_polar(m, -d * self.q0)
    }

    /// |ψ̃(k)|².
    pub fn momentum_density(&self, k: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let d = k - self.k0;
        (2.0 * s2 / PI).sqrt() * (-2.0 * s2 * d * d).exp()
    }

    /// Momentum-space amplitude ψ(p) = ħ^{−1/2} ψ̃(p/ħ), normalized in dp.
    pub fn p_amp(&self, p: f64, cfg: &PhysicalConfig) -> Complex64 {
        self.momentum_amp(p / cfg.hbar) / cfg.hbar.sqrt()
    }

    /// Φ(ζ) = ∫ dη φ*(η−ζ/2) φ(η+ζ/2) of the real envelope.
    pub fn overlap_phi(&self, zeta: f64) -> f64 {
        (-zeta * zeta / (8.0 * self.sigma * self.sigma)).exp()
    }

    pub fn support_classification(&self, kappa: f64, n_sigmas: f64) -> Result<Support> {
        if !(n_sigmas >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "n_sigmas must be at least 1, got {n_sigmas}"
            )));
        }
        let w = n_sigmas / (2.0 * self.sigma);
        Ok(if self.k0 - w > kappa {
            Support::AboveBarrier
        } else if self.k0 + w < kappa {
            Support::BelowBarrier
        } else {
            Support::Mixed
        })
    }

    /// Probability already at or right of the barrier's right edge.
    pub fn leakage(&self, barrier: &SquareBarrier) -> f64 {
        0.5 * libm::erfc((-barrier.b - self.q0) / (2f64.sqrt() * self.sigma))
    }

    pub fn leakage_warning(&self, barrier: &SquareBarrier) -> Option<String> {
        let l = self.leakage(barrier);
        (l > LEAKAGE_WARN).then(|| format!("packet leaks {l:.3e} of its norm past q = {}", -barrier.b))
    }

    /// Half-width in k beyond which |ψ̃|² falls below 1e−40 of its peak.
    pub fn k_window(&self) -> f64 {
        (40.0 * 10f64.ln() / 2.0).sqrt() / self.sigma
    }

    pub fn translated(&self, dq: f64) -> Self {
        GaussianPacket {
            q0: self.q0 + dq,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerance;
    use crate::numerics::{integrate, integrate_complex};

    fn reference_packet() -> GaussianPacket {
        GaussianPacket::new(-9.0, 15.0, 1.2).unwrap()
    }

    #[test]
    fn peak_modulus() {
        let p = reference_packet();
        let expect = (1.2 * (2.0 * PI).sqrt()).powf(-0.5);
        assert!((p.position_amp(-9.0).norm() - expect).abs() < 1e-15);
        assert!((p.momentum_amp(15.0).norm() - (2.0 * 1.44 / PI).powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn norms() {
        let p = reference_packet();
        let tol = Tolerance::default();
        let nq = integrate(|q| p.position_amp(q).norm_sqr(), -30.0, 12.0, &tol).unwrap();
        let nk = integrate(|k| p.momentum_density(k), 5.0, 25.0, &tol).unwrap();
        assert!((nq.value - 1.0).abs() < 1e-10);
        assert!((nk.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transform_matches_quadrature() {
        let p = GaussianPacket::new(-2.0, 3.0, 0.7).unwrap();
        let tol = Tolerance::default().with_rel(1e-12);
        for k in [1.5, 3.0, 3.8] {
            let f = |q: f64| p.position_amp(q) * Complex64::from_polar(1.0, -k * q);
            let v = integrate_complex(f, -12.0, 8.0, &tol).unwrap().value / (2.0 * PI).sqrt();
            assert!((v - p.momentum_amp(k)).norm() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn overlap_matches_quadrature() {
        let p = reference_packet();
        let tol = Tolerance::default();
        let env = |q: f64| p.position_amp(q).norm();
        let z = 2.4;
        let v = integrate(|e| env(e - z / 2.0) * env(e + z / 2.0), -25.0, 7.0, &tol).unwrap();
        assert!((v.value - p.overlap_phi(z)).abs() < 1e-10);
        assert!((p.overlap_phi(2.4) - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn classification() {
        let p = reference_packet();
        assert_eq!(
            p.support_classification(2f64.sqrt(), 5.0).unwrap(),
            Support::AboveBarrier
        );
        assert_eq!(p.support_classification(20.0, 5.0).unwrap(), Support::BelowBarrier);
        assert_eq!(p.support_classification(15.0, 5.0).unwrap(), Support::Mixed);
        assert!(p.support_classification(15.0, 0.5).is_err());
    }

    #[test]
    fn leakage_flag() {
        let p = reference_packet();
        let far = SquareBarrier::new(1.0, 1.0, 0.5).unwrap();
        assert!(p.leakage(&far) < 1e-9);
        assert!(p.leakage_warning(&far).is_none());
        let near = SquareBarrier::new(1.0, 9.0, 8.5).unwrap();
        assert!((p.leakage(&near) - 0.5 * libm::erfc(0.5 / (2f64.sqrt() * 1.2))).abs() < 1e-16);
        assert!(p.leakage_warning(&near).is_some());
    }

    #[test]
    fn rejects_bad_json() {
        assert!(serde_json::from_str::<GaussianPacket>(r#"{"q0":1,"k0":2,"sigma":-1}"#).is_err());
        assert!(serde_json::from_str::<GaussianPacket>(r#"{"q0":1,"k0":2,"sigma":1,"x":0}"#).is_err());
        let p: GaussianPacket = serde_json::from_str(r#"{"q0":-9,"k0":15,"sigma":1.2}"#).unwrap();
        assert_eq!(p, reference_packet());
    }
}
