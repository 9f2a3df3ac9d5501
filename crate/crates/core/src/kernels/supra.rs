use std::cell::Cell;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Provenance, Region, Repr, TimeKernel};
use crate::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::numerics::{hyp0f1_1, integrate};
use crate::potentials::{Potential, SquareBarrier};

/// First-order correction for an analytic potential with V‴ ≢ 0.
#[derive(Debug)]
pub(crate) struct SupraN1 {
    potential: Potential,
    base: TimeKernel,
    cfg: PhysicalConfig,
}

impl SupraN1 {
    /// (μ/24ħ²) ∫₀^η ds V‴(s) ∫₀^ζ dw w³ G(s,w) T̃_base(s,w).
    pub(crate) fn value(&self, eta: f64, zeta: f64) -> Result<f64> {
        let cfg = &self.cfg;
        let scale = cfg.mu / (2.0 * cfg.hbar * cfg.hbar);
        let v_eta = self.potential.evaluate(eta, cfg);
        let failure: Cell<Option<Error>> = Cell::new(None);
        let record = |r: Result<f64>| match r {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        };
        let inner = |s: f64| -> f64 {
            let dv = v_eta - self.potential.evaluate(s, cfg);
            let integrand = |w: f64| {
                let g = record(hyp0f1_1(scale * (zeta * zeta - w * w) * dv));
                let t = record(self.base.value(s, w));
                w * w * w * g * t
            };
            let r = record(integrate(integrand, 0.0, zeta, &cfg.tol).map(|e| e.value));
            record(self.potential.derivative(3, s, cfg)) * r
        };
        let outer = integrate(inner, 0.0, eta, &cfg.tol);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(cfg.mu / (24.0 * cfg.hbar * cfg.hbar) * outer?.value)
    }
}

/// First supraquantized correction to `base`.
///
/// Polynomial potentials of degree ≤ 2 give the zero kernel; higher
/// polynomials get a nested-quadrature evaluator; the square barrier is
/// handled distributionally and vanishes in every region.
pub fn supra_correction_n1(potential: &Potential, base: &TimeKernel, cfg: &PhysicalConfig) -> Result<TimeKernel> {
    match potential {
        Potential::SquareBarrier(b) => {
            let chain = supra_correction_chain(b, 1, cfg)?;
            let region = base.region().unwrap_or(Region::I);
            Ok(chain.kernel(region).clone())
        }
        _ => {
            if potential.maclaurin(cfg)?.len() <= 3 {
                return Ok(TimeKernel::zero(Provenance::SupraCorrected, base.region()));
            }
            Ok(TimeKernel::from_repr(
                Repr::Supra(SupraN1 {
                    potential: potential.clone(),
                    base: base.clone(),
                    cfg: *cfg,
                }),
                Provenance::SupraCorrected,
                base.region(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    /// s = −a
    Left,
    /// s = −b
    Right,
}

/// One integration-by-parts step: δ^{(2r)} at `edge` paired with the
/// w-integrated bracket built from `source_region`'s order-`source_order`
/// piece on one s-segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub order: usize,
    pub region: Region,
    pub r: usize,
    pub edge: Edge,
    pub source_region: Region,
    pub source_order: usize,
    /// Degree in s of the bracket; `None` when it vanishes identically.
    pub source_degree: Option<usize>,
    pub derivative_order: usize,
    /// 1 for an interior edge, ½ for an edge at a segment end.
    pub weight: f64,
    pub prefactor: f64,
    pub vanishes: bool,
}

impl DerivationStep {
    /// Re-derives `vanishes` from the degree test.
    pub fn check(&self) -> bool {
        let expected = match self.source_degree {
            None => true,
            Some(d) => d < self.derivative_order,
        };
        expected == self.vanishes
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivationLog {
    pub steps: Vec<DerivationStep>,
}

impl DerivationLog {
    pub fn all_vanish(&self) -> bool {
        self.steps.iter().all(|s| s.vanishes)
    }

    pub fn is_consistent(&self) -> bool {
        self.steps.iter().all(DerivationStep::check)
    }
}

impl fmt::Display for DerivationLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let deg = s.source_degree.map_or("zero".to_string(), |d| format!("deg {d}"));
            writeln!(
                f,
                "n={} region {} r={} edge {:?}: d^{}/ds^{} of {} order-{} bracket ({deg}) weight {} -> {}",
                s.order,
                s.region,
                s.r,
                s.edge,
                s.derivative_order,
                s.derivative_order,
                s.source_region,
                s.source_order,
                s.weight,
                if s.vanishes { "0" } else { "NONZERO" }
            )?;
        }
        Ok(())
    }
}

/// Order-n corrections for the square barrier, per region, with the log.
#[derive(Debug, Clone)]
pub struct SupraChain {
    pub order: usize,
    kernels: [TimeKernel; 3],
    pub log: DerivationLog,
}

impl SupraChain {
    pub fn kernel(&self, region: Region) -> &TimeKernel {
        match region {
            Region::I => &self.kernels[0],
            Region::II => &self.kernels[1],
            Region::III => &self.kernels[2],
        }
    }
}

/// s-polynomial whose coefficients are combinations of 1, I₀(κ|w|), J₀(κ|w|).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct WCoef {
    one: f64,
    i0: f64,
    j0: f64,
}

impl WCoef {
    fn is_zero(&self) -> bool {
        self.one == 0.0 && self.i0 == 0.0 && self.j0 == 0.0
    }
}

/// Weyl pieces as explicit polynomials in their first argument.
fn weyl_piece_poly(barrier: &SquareBarrier, region: Region) -> Vec<WCoef> {
    let b = barrier.b;
    let l = barrier.length();
    let slope = WCoef {
        one: 0.5,
        ..Default::default()
    };
    let constant = match region {
        Region::I => WCoef::default(),
        Region::II => WCoef {
            one: 0.5 * b,
            i0: -0.5 * b,
            j0: 0.0,
        },
        Region::III => WCoef {
            one: 0.5 * l,
            i0: 0.0,
            j0: -0.5 * l,
        },
    };
    vec![constant, slope]
}

fn degree(poly: &[WCoef]) -> Option<usize> {
    poly.iter().rposition(|c| !c.is_zero())
}

fn index(region: Region) -> usize {
    match region {
        Region::I => 0,
        Region::II => 1,
        Region::III => 2,
    }
}

/// Segments of the s-path from 0 to η ∈ `region`, each with its source piece
/// and the edges lying on it (with their pairing weight).
fn segments(region: Region) -> Vec<(Region, Vec<(Edge, f64)>)> {
    match region {
        Region::I => vec![(Region::I, vec![])],
        Region::II => vec![
            (Region::I, vec![(Edge::Right, 0.5)]),
            (Region::II, vec![(Edge::Right, 0.5)]),
        ],
        Region::III => vec![
            (Region::I, vec![(Edge::Right, 0.5)]),
            (Region::II, vec![(Edge::Right, 0.5), (Edge::Left, 0.5)]),
            (Region::III, vec![(Edge::Left, 0.5)]),
        ],
    }
}

/// Evaluates the order-n recurrence for the square barrier symbolically.
///
/// V^{(2r+1)} = V₀[δ^{(2r)}(s+a) − δ^{(2r)}(s+b)]; pairing δ^{(2r)} with a
/// bracket moves 2r derivatives onto it, and a polynomial of degree < 2r is
/// annihilated. Multiplication by G and the w-integration leave the
/// s-degree unchanged, since V(s) is constant on every segment.
pub fn supra_correction_chain(barrier: &SquareBarrier, n: usize, cfg: &PhysicalConfig) -> Result<SupraChain> {
    if n == 0 {
        return Err(Error::InvalidInput("correction order must be at least 1".into()));
    }
    let mut degrees: Vec<[Option<usize>; 3]> = Vec::with_capacity(n + 1);
    degrees.push(Region::ALL.map(|r| degree(&weyl_piece_poly(barrier, r))));
    let mut log = DerivationLog::default();
    for k in 1..=n {
        let mut current = [None; 3];
        for region in Region::ALL {
            let mut nonzero = false;
            for (source, edges) in segments(region) {
                for (edge, weight) in edges {
                    for r in 1..=k {
                        let source_degree = degrees[k - r][index(source)];
                        let derivative_order = 2 * r;
                        let vanishes = source_degree.is_none_or(|d| d < derivative_order);
                        nonzero |= !vanishes;
                        let factorial: f64 = (1..=2 * r + 1).map(|i| i as f64).product();
                        log.steps.push(DerivationStep {
                            order: k,
                            region,
                            r,
                            edge,
                            source_region: source,
                            source_order: k - r,
                            source_degree,
                            derivative_order,
                            weight,
                            prefactor: (cfg.mu / (cfg.hbar * cfg.hbar)) * barrier.v0
                                / (4f64.powi(r as i32) * factorial),
                            vanishes,
                        });
                    }
                }
            }
            current[index(region)] = if nonzero { Some(0) } else { None };
        }
        degrees.push(current);
    }
    if !log.all_vanish() {
        return Err(Error::Unsupported(format!(
            "order-{n} barrier correction does not vanish distributionally:\n{log}"
        )));
    }
    let kernels = Region::ALL.map(|r| TimeKernel::zero(Provenance::SupraCorrected, Some(r)));
    Ok(SupraChain { order: n, kernels, log })
}
