use serde::{Deserialize, Serialize};

use super::{central_difference, TimeKernel};
use crate::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::potentials::Potential;

const STEP: f64 = 1e-3;
const STENCIL_REACH: f64 = 2.0 * STEP;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TkeReport {
    /// −(ħ²/2μ)∂²T/∂q² + (ħ²/2μ)∂²T/∂q′² + (V(q) − V(q′))T at (q, q′).
    pub residual: f64,
    /// T(q, q) − q/2.
    pub diagonal_defect: f64,
    /// T(q, −q).
    pub antidiagonal_value: f64,
}

/// Time-kernel-equation residual by fourth-order differences with one
/// Richardson level (h = 10⁻³, h/2).
pub fn tke_residual(
    kernel: &TimeKernel,
    potential: &Potential,
    q: f64,
    qp: f64,
    cfg: &PhysicalConfig,
) -> Result<TkeReport> {
    if let Potential::SquareBarrier(b) = potential {
        for x in [q, qp] {
            for e in [-b.a, -b.b] {
                if (x - e).abs() <= STENCIL_REACH {
                    return Err(Error::DerivativeUnavailable(format!(
                        "stencil around {x} crosses the barrier edge {e}"
                    )));
                }
            }
        }
    }
    let second = |along_q: bool| -> Result<f64> {
        let f = |x: f64| {
            if along_q {
                kernel.value_qq(x, qp)
            } else {
                kernel.value_qq(q, x)
            }
        };
        let at = if along_q { q } else { qp };
        let d1 = central_difference(f, 2, at, STEP)?;
        let d2 = central_difference(f, 2, at, 0.5 * STEP)?;
        Ok((16.0 * d2 - d1) / 15.0)
    };
    let c = cfg.hbar * cfg.hbar / (2.0 * cfg.mu);
    let t = kernel.value_qq(q, qp)?;
    let residual =
        -c * second(true)? + c * second(false)? + (potential.evaluate(q, cfg) - potential.evaluate(qp, cfg)) * t;
    Ok(TkeReport {
        residual,
        diagonal_defect: kernel.value_qq(q, q)? - 0.5 * q,
        antidiagonal_value: kernel.value_qq(q, -q)?,
    })
}
