use super::{Provenance, Region, Repr, TimeKernel};
use crate::config::PhysicalConfig;
use crate::error::Result;
use crate::numerics::{bessel_i0, bessel_j0};
use crate::potentials::SquareBarrier;

/// One region's closed-form Weyl kernel for the square barrier.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BarrierPiece {
    pub region: Region,
    pub b: f64,
    pub length: f64,
    pub kappa: f64,
}

impl BarrierPiece {
    pub(crate) fn value(&self, eta: f64, zeta: f64) -> Result<f64> {
        let x = self.kappa * zeta.abs();
        Ok(match self.region {
            Region::I => 0.5 * eta,
            Region::II => 0.5 * (eta + self.b) - 0.5 * self.b * bessel_i0(x)?,
            Region::III => 0.5 * (eta + self.length) - 0.5 * self.length * bessel_j0(x),
        })
    }
}

pub fn barrier_kernel_piece(barrier: &SquareBarrier, region: Region, cfg: &PhysicalConfig) -> TimeKernel {
    TimeKernel::from_repr(
        Repr::Barrier(BarrierPiece {
            region,
            b: barrier.b,
            length: barrier.length(),
            kappa: barrier.kappa(cfg),
        }),
        Provenance::ClosedForm,
        Some(region),
    )
}

/// All three pieces joined with Heaviside weights, H(0) = ½.
pub fn barrier_kernel_stitched(barrier: &SquareBarrier, cfg: &PhysicalConfig) -> TimeKernel {
    TimeKernel::from_repr(
        Repr::Stitched {
            barrier: *barrier,
            cfg: *cfg,
        },
        Provenance::ClosedForm,
        None,
    )
}

/// Region containing η; edges belong to the adjacent inner region.
pub fn region_of(barrier: &SquareBarrier, eta: f64) -> Region {
    if eta >= -barrier.b {
        Region::I
    } else if eta >= -barrier.a {
        Region::II
    } else {
        Region::III
    }
}

fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

pub(crate) fn stitched_value(barrier: &SquareBarrier, cfg: &PhysicalConfig, eta: f64, zeta: f64) -> Result<f64> {
    let piece = |region| BarrierPiece {
        region,
        b: barrier.b,
        length: barrier.length(),
        kappa: barrier.kappa(cfg),
    };
    let w1 = heaviside(eta + barrier.b);
    let w2 = heaviside(eta + barrier.a) - heaviside(eta + barrier.b);
    let w3 = heaviside(-eta - barrier.a);
    let mut total = 0.0;
    for (w, region) in [(w1, Region::I), (w2, Region::II), (w3, Region::III)] {
        if w != 0.0 {
            total += w * piece(region).value(eta, zeta)?;
        }
    }
    Ok(total)
}
