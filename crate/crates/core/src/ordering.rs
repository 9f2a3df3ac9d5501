//! Ordering functions Θ(x) = Σ αⱼ xʲ and the deformation of Weyl kernels.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::kernels::{self, TimeKernel};
use crate::numerics::hyp0f1;
use crate::potentials::Potential;

pub const DEFAULT_TRUNCATION: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinRule {
    Weyl,
    BornJordan,
    SimpleSymmetric,
}

impl BuiltinRule {
    pub const ALL: [BuiltinRule; 3] = [BuiltinRule::Weyl, BuiltinRule::BornJordan, BuiltinRule::SimpleSymmetric];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinRule::Weyl => "weyl",
            BuiltinRule::BornJordan => "born_jordan",
            BuiltinRule::SimpleSymmetric => "simple_symmetric",
        }
    }
}

impl FromStr for BuiltinRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weyl" => Ok(BuiltinRule::Weyl),
            "born_jordan" => Ok(BuiltinRule::BornJordan),
            "simple_symmetric" => Ok(BuiltinRule::SimpleSymmetric),
            other => Err(Error::UnknownRule(other.to_string())),
        }
    }
}

/// An even ordering function with Θ(0) = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRule")]
pub struct OrderingRule {
    name: String,
    alpha: Vec<f64>,
    truncation: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    name: String,
    alpha: Vec<f64>,
    #[serde(default = "default_truncation")]
    truncation: usize,
}

fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}

impl TryFrom<RawRule> for OrderingRule {
    type Error = Error;
    fn try_from(r: RawRule) -> Result<Self> {
        OrderingRule::new(r.name, r.alpha, r.truncation)
    }
}

impl OrderingRule {
    /// Rejects rules with α₀ ≠ 1 or any non-zero odd coefficient.
    pub fn new(name: impl Into<String>, alpha: Vec<f64>, truncation: usize) -> Result<Self> {
        let name = name.into();
        if alpha.is_empty() || (alpha[0] - 1.0).abs() > 1e-15 {
            return Err(Error::InvalidRule(format!("`{name}`: alpha_0 must equal 1")));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidRule(format!("`{name}`: coefficients must be finite")));
        }
        if let Some(j) = alpha.iter().enumerate().position(|(j, a)| j % 2 == 1 && *a != 0.0) {
            return Err(Error::InvalidRule(format!(
                "`{name}`: odd coefficient alpha_{j} must vanish"
            )));
        }
        Ok(OrderingRule {
            name,
            alpha,
            truncation,
        })
    }

    pub fn builtin(rule: BuiltinRule) -> Self {
        Self::builtin_truncated(rule, DEFAULT_TRUNCATION)
    }

    /// Taylor coefficients of 1, sinc(x/2) or cos(x/2) through x^{2·truncation}.
    pub fn builtin_truncated(rule: BuiltinRule, truncation: usize) -> Self {
        let mut alpha = vec![0.0; 2 * truncation + 1];
        alpha[0] = 1.0;
        if rule != BuiltinRule::Weyl {
            let mut fact = 1.0f64;
            for n in 1..=truncation {
                let j = 2 * n;
                fact *= (j - 1) as f64 * j as f64;
                let denom = match rule {
                    BuiltinRule::BornJordan => fact * (j + 1) as f64,
                    _ => fact,
                };
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                alpha[j] = sign / (4f64.powi(n as i32) * denom);
            }
        }
        OrderingRule {
            name: rule.name().to_string(),
            alpha,
            truncation,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(Self::builtin(name.parse()?))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Number of even-order terms beyond j = 0 actually summed.
    pub fn effective_terms(&self) -> usize {
        self.truncation.min((self.alpha.len() - 1) / 2)
    }

    /// Θ(x) from the stored coefficients.
    pub fn theta(&self, x: f64) -> f64 {
        self.alpha.iter().rev().fold(0.0, |acc, a| acc * x + a)
    }

    /// T̃^Q = Σⱼ αⱼ(−iζ)ʲ∂ʲ_η T̃^W.
    pub fn deform(&self, base: &TimeKernel) -> Result<TimeKernel> {
        let needed = 2 * self.effective_terms();
        if let Some(cap) = base.derivative_capability() {
            let needs_derivatives = self.alpha.iter().skip(1).take(needed).any(|a| *a != 0.0);
            if needs_derivatives && cap < needed {
                return Err(Error::DerivativeUnavailable(format!(
                    "rule `{}` needs eta-derivatives up to order {needed}, kernel provides {cap}",
                    self.name
                )));
            }
        }
        Ok(kernels::deformed(self, base))
    }
}

/// Exact kernels for linear and harmonic potentials.
pub fn closed_form_kernel(
    rule: BuiltinRule,
    potential: &Potential,
    eta: f64,
    zeta: f64,
    cfg: &PhysicalConfig,
) -> Result<f64> {
    let h2 = cfg.hbar * cfg.hbar;
    match potential {
        Potential::Free => Ok(0.5 * eta),
        Potential::Linear { lambda } => {
            let g = cfg.mu * lambda * zeta * zeta / (2.0 * h2);
            let up = eta + 0.5 * zeta;
            let dn = eta - 0.5 * zeta;
            match rule {
                BuiltinRule::Weyl => Ok(0.5 * eta * hyp0f1(2.0, g * eta, 1000)?),
                BuiltinRule::SimpleSymmetric => {
                    Ok(0.25 * up * hyp0f1(2.0, g * up, 1000)? + 0.25 * dn * hyp0f1(2.0, g * dn, 1000)?)
                }
                BuiltinRule::BornJordan => linear_born_jordan(g, up, dn),
            }
        }
        Potential::Harmonic { omega } => {
            let c = cfg.mu * omega / cfg.hbar;
            let x = cfg.mu * omega * zeta * zeta / (2.0 * cfg.hbar);
            let weyl = 0.5 * eta * kernels_sinhc(c * eta * zeta);
            Ok(match rule {
                BuiltinRule::Weyl => weyl,
                BuiltinRule::BornJordan => kernels_sinhc(x) * weyl,
                BuiltinRule::SimpleSymmetric => x.cosh() * weyl,
            })
        }
        _ => Err(Error::Unsupported(format!(
            "no closed-form {} kernel for this potential",
            rule.name()
        ))),
    }
}

fn kernels_sinhc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        1.0 + y * y / 6.0
    } else {
        y.sinh() / y
    }
}

/// [u₊²₀F₁(;3;gu₊) − u₋²₀F₁(;3;gu₋)]/(4ζ) without the 1/ζ cancellation:
/// ½ Σₘ gᵐ/(m!(m+2)!) · (u₊^{m+2} − u₋^{m+2})/(u₊ − u₋).
fn linear_born_jordan(g: f64, up: f64, dn: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut coef = 0.25;
    for m in 0..400usize {
        if m > 0 {
            coef *= g / (m as f64 * (m + 2) as f64);
        }
        // Σ_{i=0}^{m+1} u₊ⁱ u₋^{m+1−i}
        let mut geo = 0.0;
        let mut pd = 1.0;
        for _ in 0..=m + 1 {
            geo = geo * up + pd;
            pd *= dn;
        }
        let term = coef * geo;
        sum += term;
        if m > 4 && term.abs() <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
        if coef == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::nonconv("linear Born-Jordan series", sum, f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_coefficients() {
        let w = OrderingRule::builtin(BuiltinRule::Weyl);
        assert!(w
            .alpha()
            .iter()
            .enumerate()
            .all(|(j, a)| *a == if j == 0 { 1.0 } else { 0.0 }));
        let bj = OrderingRule::builtin(BuiltinRule::BornJordan);
        assert!((bj.alpha()[2] + 1.0 / 24.0).abs() < 1e-17);
        assert!((bj.alpha()[4] - 1.0 / 1920.0).abs() < 1e-18);
        let ss = OrderingRule::builtin(BuiltinRule::SimpleSymmetric);
        assert!((ss.alpha()[2] + 1.0 / 8.0).abs() < 1e-17);
        assert!((ss.alpha()[4] - 1.0 / 384.0).abs() < 1e-18);
        for x in [0.3, 1.0, 2.5] {
            assert!((bj.theta(x) - (x / 2.0).sin() / (x / 2.0)).abs() < 1e-15);
            assert!((ss.theta(x) - (x / 2.0).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_rules_are_rejected() {
        assert!(matches!(
            OrderingRule::new("x", vec![0.9, 0.0, 0.1], 20),
            Err(Error::InvalidRule(_))
        ));
        assert!(matches!(
            OrderingRule::new("x", vec![1.0, 0.1], 20),
            Err(Error::InvalidRule(_))
        ));
        assert!(matches!(OrderingRule::by_name("normal"), Err(Error::UnknownRule(_))));
        let r: OrderingRule = serde_json::from_str(r#"{"name":"c","alpha":[1,0,0.3,0,-0.01]}"#).unwrap();
        assert_eq!(r.effective_terms(), 2);
        assert!(serde_json::from_str::<OrderingRule>(r#"{"name":"c","alpha":[1,0.2]}"#).is_err());
    }

    #[test]
    fn born_jordan_linear_matches_direct_formula() {
        let cfg = PhysicalConfig::default();
        let v = Potential::Linear { lambda: 1.0 };
        let (eta, zeta) = (0.7, 1.3);
        let g = zeta * zeta / 2.0;
        let (up, dn) = (eta + zeta / 2.0, eta - zeta / 2.0);
        let direct =
            (up * up * hyp0f1(3.0, g * up, 500).unwrap() - dn * dn * hyp0f1(3.0, g * dn, 500).unwrap()) / (4.0 * zeta);
        let stable = closed_form_kernel(BuiltinRule::BornJordan, &v, eta, zeta, &cfg).unwrap();
        assert!((direct - stable).abs() < 1e-14, "{direct} vs {stable}");
        let at_zero = closed_form_kernel(BuiltinRule::BornJordan, &v, eta, 0.0, &cfg).unwrap();
        assert!((at_zero - eta / 2.0).abs() < 1e-15);
    }
}
