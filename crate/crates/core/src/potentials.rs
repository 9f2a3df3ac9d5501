//! Potential models.

use serde::{Deserialize, Serialize};

use crate::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::numerics::integrate;

/// Square barrier of height `v0` on −a < q < −b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBarrier")]
pub struct SquareBarrier {
    #[serde(rename = "V0")]
    pub v0: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBarrier {
    #[serde(rename = "V0")]
    v0: f64,
    a: f64,
    b: f64,
}

impl TryFrom<RawBarrier> for SquareBarrier {
    type Error = Error;
    fn try_from(r: RawBarrier) -> Result<Self> {
        SquareBarrier::new(r.v0, r.a, r.b)
    }
}

impl SquareBarrier {
    /// Zero height or zero width are accepted as degenerate barriers.
    pub fn new(v0: f64, a: f64, b: f64) -> Result<Self> {
        if !(v0.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidInput("barrier parameters must be finite".into()));
        }
        if v0 < 0.0 {
            return Err(Error::InvalidInput(format!(
                "barrier height must be non-negative, got {v0}"
            )));
        }
        if !(0.0 <= b && b <= a) {
            return Err(Error::InvalidInput(format!(
                "barrier needs 0 <= b <= a, got a={a}, b={b}"
            )));
        }
        Ok(SquareBarrier { v0, a, b })
    }

    /// Barrier given by its left edge (negative) and width.
    pub fn from_edge_width(v0: f64, left_edge: f64, width: f64) -> Result<Self> {
        SquareBarrier::new(v0, -left_edge, -left_edge - width)
    }

    pub fn length(&self) -> f64 {
        self.a - self.b
    }

    pub fn kappa(&self, cfg: &PhysicalConfig) -> f64 {
        (2.0 * cfg.mu * self.v0).sqrt() / cfg.hbar
    }

    /// Critical momentum √(2μV₀).
    pub fn critical_momentum(&self, cfg: &PhysicalConfig) -> f64 {
        (2.0 * cfg.mu * self.v0).sqrt()
    }

    pub fn evaluate(&self, q: f64) -> f64 {
        let (l, r) = (-self.a, -self.b);
        if q == l || q == r {
            if l == r {
                0.0
            } else {
                0.5 * self.v0
            }
        } else if l < q && q < r {
            self.v0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Free,
    Linear {
        lambda: f64,
    },
    Harmonic {
        omega: f64,
    },
    /// V(q) = Σ coeffs[n]·qⁿ.
    Polynomial {
        coeffs: Vec<f64>,
    },
    SquareBarrier(SquareBarrier),
}

/// Outcome of the classical arrival-time integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalTime {
    Arrives { time: f64, err_est: f64 },
    NonArrival,
}

const TURNING_BAND: f64 = 1e-12;
const INSPECTION_POINTS: usize = 2001;

impl Potential {
    pub fn square_barrier(v0: f64, a: f64, b: f64) -> Result<Self> {
        Ok(Potential::SquareBarrier(SquareBarrier::new(v0, a, b)?))
    }

    pub fn validated(self) -> Result<Self> {
        match &self {
            Potential::Linear { lambda } if !lambda.is_finite() => {
                Err(Error::InvalidInput("lambda must be finite".into()))
            }
            Potential::Harmonic { omega } if !omega.is_finite() => {
                Err(Error::InvalidInput("omega must be finite".into()))
            }
            Potential::Polynomial { coeffs } if coeffs.iter().any(|c| !c.is_finite()) => {
                Err(Error::InvalidInput("polynomial coefficients must be finite".into()))
            }
            Potential::SquareBarrier(b) => SquareBarrier::new(b.v0, b.a, b.b).map(|_| self),
            _ => Ok(self),
        }
    }

    pub fn as_barrier(&self) -> Result<&SquareBarrier> {
        match self {
            Potential::SquareBarrier(b) => Ok(b),
            _ => Err(Error::WrongVariant),
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Potential::SquareBarrier(_))
    }

    /// Maclaurin coefficients of an analytic potential, trailing zeros trimmed.
    pub fn maclaurin(&self, cfg: &PhysicalConfig) -> Result<Vec<f64>> {
        let mut c = match self {
            Potential::Free => vec![],
            Potential::Linear { lambda } => vec![0.0, *lambda],
            Potential::Harmonic { omega } => vec![0.0, 0.0, 0.5 * cfg.mu * omega * omega],
            Potential::Polynomial { coeffs } => coeffs.clone(),
            Potential::SquareBarrier(_) => return Err(Error::NotAnalytic),
        };
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Ok(c)
    }

    pub fn evaluate(&self, q: f64, cfg: &PhysicalConfig) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Linear { lambda } => lambda * q,
            Potential::Harmonic { omega } => 0.5 * cfg.mu * omega * omega * q * q,
            Potential::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * q + c),
            Potential::SquareBarrier(b) => b.evaluate(q),
        }
    }

    pub fn taylor_coeff(&self, n: usize, cfg: &PhysicalConfig) -> Result<f64> {
        Ok(self.maclaurin(cfg)?.get(n).copied().unwrap_or(0.0))
    }

    /// d^order V / dq^order at q.
    pub fn derivative(&self, order: usize, q: f64, cfg: &PhysicalConfig) -> Result<f64> {
        let c = self.maclaurin(cfg)?;
        let mut acc = 0.0;
        for n in (order..c.len()).rev() {
            let falling: f64 = ((n - order + 1)..=n).map(|k| k as f64).product();
            acc = acc * q + c[n] * falling;
        }
        Ok(acc)
    }

    pub fn kappa_o(&self, cfg: &PhysicalConfig) -> Result<f64> {
        Ok(self.as_barrier()?.kappa(cfg))
    }

    /// Classical time of arrival at the origin from phase-space point (q, p).
    pub fn classical_toa(&self, q: f64, p: f64, cfg: &PhysicalConfig) -> Result<ArrivalTime> {
        if p == 0.0 || !p.is_finite() || !q.is_finite() {
            return Err(Error::InvalidInput(format!(
                "classical_toa needs finite q and non-zero p, got q={q}, p={p}"
            )));
        }
        if q == 0.0 {
            return Ok(ArrivalTime::Arrives {
                time: 0.0,
                err_est: 0.0,
            });
        }
        let energy = p * p / (2.0 * cfg.mu) + self.evaluate(q, cfg);
        let band = TURNING_BAND * energy.abs().max(1.0);
        let (lo, hi) = if q < 0.0 { (q, 0.0) } else { (0.0, q) };

        let mut breaks = vec![lo, hi];
        if let Potential::SquareBarrier(b) = self {
            for e in [-b.a, -b.b] {
                if lo < e && e < hi {
                    breaks.push(e);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        // sign inspection: open sub-intervals between breakpoints
        for w in breaks.windows(2) {
            for i in 0..INSPECTION_POINTS {
                let x = w[0] + (w[1] - w[0]) * (i as f64 + 0.5) / INSPECTION_POINTS as f64;
                if energy - self.evaluate(x, cfg) <= band {
                    return Ok(ArrivalTime::NonArrival);
                }
            }
        }
        if energy - self.evaluate(0.0, cfg) <= band {
            return Ok(ArrivalTime::NonArrival);
        }

        let mut total = 0.0;
        let mut err = 0.0;
        for w in breaks.windows(2) {
            let r = integrate(|x| 1.0 / (energy - self.evaluate(x, cfg)).sqrt(), w[0], w[1], &cfg.tol)?;
            total += r.value;
            err += r.err_est;
        }
        // ∫₀^q = −∫_q^0 when q < 0
        let signed = if q < 0.0 { -total } else { total };
        let pref = -p.signum() * (cfg.mu / 2.0).sqrt();
        Ok(ArrivalTime::Arrives {
            time: pref * signed,
            err_est: pref.abs() * err,
        })
    }
}
