//! Time-kernel factors T̃(η, ζ) with η = (q+q′)/2 and ζ = q − q′.

mod barrier;
mod supra;
mod tke;
mod weyl;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::ordering::{closed_form_kernel, BuiltinRule, OrderingRule};
use crate::potentials::{Potential, SquareBarrier};

pub use barrier::{barrier_kernel_piece, barrier_kernel_stitched, region_of};
pub use supra::{supra_correction_chain, supra_correction_n1, DerivationLog, DerivationStep, Edge, SupraChain};
pub use tke::{tke_residual, TkeReport};
pub use weyl::{weyl_integral, weyl_kernel};

pub(crate) use barrier::BarrierPiece;
pub(crate) use supra::SupraN1;
pub(crate) use weyl::WeylKernel;

/// Barrier regions: I right of the barrier, II inside, III left of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    I,
    II,
    III,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::I, Region::II, Region::III];
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    WeylIntegral,
    ClosedForm,
    Deformed,
    SupraCorrected,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::WeylIntegral => "weyl_integral",
            Provenance::ClosedForm => "closed_form",
            Provenance::Deformed => "deformed",
            Provenance::SupraCorrected => "supra_corrected",
        }
    }
}

#[derive(Debug)]
pub(crate) enum Repr {
    Zero,
    Weyl(WeylKernel),
    Barrier(BarrierPiece),
    Stitched {
        barrier: SquareBarrier,
        cfg: PhysicalConfig,
    },
    ClosedForm {
        rule: BuiltinRule,
        potential: Potential,
        cfg: PhysicalConfig,
    },
    Deformed {
        rule: OrderingRule,
        base: TimeKernel,
    },
    Supra(SupraN1),
}

/// An evaluable time-kernel factor.
///
/// The operator kernel is ⟨q|T̂|q′⟩ = (μ/iħ)·T̃(η,ζ)·sgn(q−q′).
#[derive(Debug, Clone)]
pub struct TimeKernel {
    repr: Arc<Repr>,
    provenance: Provenance,
    region: Option<Region>,
}

/// Highest η-derivative order that finite differences are trusted for.
const FD_MAX_ORDER: usize = 4;

impl TimeKernel {
    pub(crate) fn from_repr(repr: Repr, provenance: Provenance, region: Option<Region>) -> Self {
        TimeKernel {
            repr: Arc::new(repr),
            provenance,
            region,
        }
    }

    /// The identically vanishing kernel.
    pub fn zero(provenance: Provenance, region: Option<Region>) -> Self {
        TimeKernel::from_repr(Repr::Zero, provenance, region)
    }

    /// Closed-form kernel for a built-in rule and a linear or harmonic potential.
    pub fn closed_form(rule: BuiltinRule, potential: &Potential, cfg: &PhysicalConfig) -> Result<Self> {
        match potential {
            Potential::Free | Potential::Linear { .. } | Potential::Harmonic { .. } => {}
            _ => {
                return Err(Error::Unsupported(format!(
                    "no closed form for {rule:?} with this potential"
                )))
            }
        }
        Ok(TimeKernel::from_repr(
            Repr::ClosedForm {
                rule,
                potential: potential.clone(),
                cfg: *cfg,
            },
            Provenance::ClosedForm,
            None,
        ))
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn region(&self) -> Option<Region> {
        self.region
    }

    pub fn is_zero(&self) -> bool {
        matches!(*self.repr, Repr::Zero)
    }

    /// T̃(η, ζ).
    pub fn value(&self, eta: f64, zeta: f64) -> Result<f64> {
        match &*self.repr {
            Repr::Zero => Ok(0.0),
            Repr::Weyl(w) => w.value(eta, zeta),
            Repr::Barrier(b) => b.value(eta, zeta),
            Repr::Stitched { barrier, cfg } => barrier::stitched_value(barrier, cfg, eta, zeta),
            Repr::ClosedForm { rule, potential, cfg } => closed_form_kernel(*rule, potential, eta, zeta, cfg),
            Repr::Deformed { rule, base } => deformed_derivative(rule, base, 0, eta, zeta),
            Repr::Supra(s) => s.value(eta, zeta),
        }
    }

    /// T(q, q′) = T̃((q+q′)/2, q−q′).
    pub fn value_qq(&self, q: f64, qp: f64) -> Result<f64> {
        self.value(0.5 * (q + qp), q - qp)
    }

    /// Largest η-derivative order available, `None` meaning unbounded.
    pub fn derivative_capability(&self) -> Option<usize> {
        match &*self.repr {
            Repr::Zero | Repr::Weyl(_) | Repr::Barrier(_) => None,
            Repr::Stitched { .. } => Some(0),
            Repr::ClosedForm { rule, potential, .. } => match (rule, potential) {
                (BuiltinRule::Weyl, _) | (_, Potential::Free) => None,
                _ => Some(FD_MAX_ORDER),
            },
            Repr::Deformed { rule, base } => base
                .derivative_capability()
                .map(|c| c.saturating_sub(2 * rule.effective_terms())),
            Repr::Supra(_) => Some(FD_MAX_ORDER),
        }
    }

    /// ∂ʲ T̃ / ∂ηʲ at (η, ζ).
    pub fn eta_derivative(&self, order: usize, eta: f64, zeta: f64) -> Result<f64> {
        if order == 0 {
            return self.value(eta, zeta);
        }
        match &*self.repr {
            Repr::Zero => Ok(0.0),
            Repr::Weyl(w) => w.eta_derivative(order, eta, zeta),
            Repr::Barrier(_) => Ok(if order == 1 { 0.5 } else { 0.0 }),
            Repr::Stitched { .. } => Err(Error::DerivativeUnavailable(
                "the stitched barrier kernel jumps across the barrier edges".into(),
            )),
            Repr::ClosedForm { rule, potential, cfg } => match (rule, potential) {
                (_, Potential::Free) => Ok(if order == 1 { 0.5 } else { 0.0 }),
                (BuiltinRule::Weyl, Potential::Linear { lambda }) => {
                    Ok(weyl::linear_weyl_derivative(*lambda, order, eta, zeta, cfg))
                }
                (BuiltinRule::Weyl, Potential::Harmonic { omega }) => {
                    Ok(weyl::harmonic_weyl_derivative(*omega, order, eta, zeta, cfg))
                }
                _ => self.fd_derivative(order, eta, zeta),
            },
            Repr::Deformed { rule, base } => deformed_derivative(rule, base, order, eta, zeta),
            Repr::Supra(_) => self.fd_derivative(order, eta, zeta),
        }
    }

    /// Fourth-order central differences with one Richardson level.
    fn fd_derivative(&self, order: usize, eta: f64, zeta: f64) -> Result<f64> {
        if order > FD_MAX_ORDER {
            return Err(Error::DerivativeUnavailable(format!(
                "finite differences limited to order {FD_MAX_ORDER}, requested {order}"
            )));
        }
        let h = 1e-4f64.max(1e-3 * eta.abs());
        let d1 = central_difference(|x| self.value(x, zeta), order, eta, h)?;
        let d2 = central_difference(|x| self.value(x, zeta), order, eta, 0.5 * h)?;
        Ok((16.0 * d2 - d1) / 15.0)
    }
}

/// Fourth-order accurate central-difference stencil for derivatives 1–4.
pub(crate) fn central_difference<F: Fn(f64) -> Result<f64>>(f: F, order: usize, x: f64, h: f64) -> Result<f64> {
    let g = |k: i32| f(x + k as f64 * h);
    Ok(match order {
        0 => g(0)?,
        1 => (-g(2)? + 8.0 * g(1)? - 8.0 * g(-1)? + g(-2)?) / (12.0 * h),
        2 => (-g(2)? + 16.0 * g(1)? - 30.0 * g(0)? + 16.0 * g(-1)? - g(-2)?) / (12.0 * h * h),
        3 => (-g(3)? + 8.0 * g(2)? - 13.0 * g(1)? + 13.0 * g(-1)? - 8.0 * g(-2)? + g(-3)?) / (8.0 * h.powi(3)),
        4 => {
            (-g(3)? + 12.0 * g(2)? - 39.0 * g(1)? + 56.0 * g(0)? - 39.0 * g(-1)? + 12.0 * g(-2)? - g(-3)?)
                / (6.0 * h.powi(4))
        }
        _ => {
            return Err(Error::DerivativeUnavailable(format!(
                "no stencil for derivative order {order}"
            )))
        }
    })
}

/// Σₙ α₂ₙ (−1)ⁿ ζ²ⁿ ∂^{2n+order} T̃_base, with a term-magnitude stop.
fn deformed_derivative(rule: &OrderingRule, base: &TimeKernel, order: usize, eta: f64, zeta: f64) -> Result<f64> {
    let mut sum = base.eta_derivative(order, eta, zeta)?;
    let mut small_run = 0;
    let z2 = zeta * zeta;
    let mut zpow = 1.0;
    for n in 1..=rule.effective_terms() {
        zpow *= z2;
        let alpha = rule.alpha()[2 * n];
        if alpha == 0.0 {
            continue;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        if zpow == 0.0 {
            break;
        }
        let d = base.eta_derivative(2 * n + order, eta, zeta)?;
        let term = alpha * sign * zpow * d;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    Ok(sum)
}

pub(crate) fn deformed(rule: &OrderingRule, base: &TimeKernel) -> TimeKernel {
    TimeKernel::from_repr(
        Repr::Deformed {
            rule: rule.clone(),
            base: base.clone(),
        },
        Provenance::Deformed,
        base.region,
    )
}
