use std::cell::Cell;
use std::sync::OnceLock;

use super::{Provenance, Repr, TimeKernel};
use crate::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, hyp0f1, hyp0f1_1, integrate, Estimate};
use crate::potentials::Potential;

/// Highest power of (μζ²/2ħ²) kept in the series representation.
const SERIES_ORDER: usize = 120;

/// Weyl-ordered kernel of an analytic potential.
///
/// Values come from the s-integral; η-derivatives from the double series
/// T̃ = ½ Σₘ (μζ²/2ħ²)ᵐ/(m!)² · Aₘ(η), Aₘ(η) = ∫₀^η (V(η)−V(s))ᵐ ds,
/// where each Aₘ is an explicit polynomial in η.
#[derive(Debug)]
pub(crate) struct WeylKernel {
    potential: Potential,
    cfg: PhysicalConfig,
    series: OnceLock<Result<WeylSeries>>,
}

#[derive(Debug)]
struct WeylSeries {
    /// polys[m][k] is the coefficient of ηᵏ in Aₘ(η).
    polys: Vec<Vec<f64>>,
}

pub fn weyl_kernel(potential: &Potential, cfg: &PhysicalConfig) -> Result<TimeKernel> {
    if !potential.is_analytic() {
        return Err(Error::NotAnalytic);
    }
    let potential = potential.clone().validated()?;
    Ok(TimeKernel::from_repr(
        Repr::Weyl(WeylKernel {
            potential,
            cfg: *cfg,
            series: OnceLock::new(),
        }),
        Provenance::WeylIntegral,
        None,
    ))
}

/// ½∫₀^η ₀F₁(;1;(μ/2ħ²)(V(η)−V(s))ζ²) ds for any potential, splitting at
/// barrier edges.
pub fn weyl_integral(potential: &Potential, eta: f64, zeta: f64, cfg: &PhysicalConfig) -> Result<Estimate<f64>> {
    let scale = cfg.mu / (2.0 * cfg.hbar * cfg.hbar) * zeta * zeta;
    let v_eta = potential.evaluate(eta, cfg);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |s: f64| match hyp0f1_1(scale * (v_eta - potential.evaluate(s, cfg))) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let mut breaks = vec![0.0, eta];
    if let Potential::SquareBarrier(b) = potential {
        let (lo, hi) = (eta.min(0.0), eta.max(0.0));
        for e in [-b.a, -b.b] {
            if lo < e && e < hi {
                breaks.push(e);
            }
        }
        breaks[1..].sort_by(|x, y| (x.abs()).total_cmp(&y.abs()));
    }
    let mut total = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let r = integrate(integrand, w[0], w[1], &cfg.tol);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let r = r?;
        total += r.value;
        err += r.err_est;
    }
    Ok(Estimate::new(0.5 * total, 0.5 * err))
}

impl WeylKernel {
    pub(crate) fn value(&self, eta: f64, zeta: f64) -> Result<f64> {
        if let Potential::Free = self.potential {
            return Ok(0.5 * eta);
        }
        Ok(weyl_integral(&self.potential, eta, zeta, &self.cfg)?.value)
    }

    pub(crate) fn eta_derivative(&self, order: usize, eta: f64, zeta: f64) -> Result<f64> {
        let series = self
            .series
            .get_or_init(|| WeylSeries::build(&self.potential, &self.cfg))
            .as_ref()
            .map_err(Clone::clone)?;
        series.eta_derivative(order, eta, zeta, &self.cfg)
    }
}

impl WeylSeries {
    fn build(potential: &Potential, cfg: &PhysicalConfig) -> Result<Self> {
        let c = potential.maclaurin(cfg)?;
        let degree = c.len().saturating_sub(1);
        if degree == 0 {
            return Ok(WeylSeries {
                polys: vec![vec![0.0, 1.0]],
            });
        }
        // Aₘ(η) = η ∫₀¹ Bᵐ dt with B(η;t) = Σₙ cₙ(1 − tⁿ) ηⁿ, exact by Gauss–Legendre in t
        let nodes = (degree * SERIES_ORDER).div_ceil(2) + 1;
        let (x, w) = gauss_legendre(nodes);
        let width = degree * SERIES_ORDER + 2;
        let mut polys = vec![vec![0.0; width]; SERIES_ORDER + 1];
        for (xi, wi) in x.iter().zip(&w) {
            let t = 0.5 * (xi + 1.0);
            let weight = 0.5 * wi;
            let b: Vec<f64> = (0..=degree)
                .map(|n| if n == 0 { 0.0 } else { c[n] * (1.0 - t.powi(n as i32)) })
                .collect();
            let mut power = vec![1.0];
            for (m, poly) in polys.iter_mut().enumerate() {
                if m > 0 {
                    power = multiply(&power, &b);
                }
                for (k, pk) in power.iter().enumerate() {
                    poly[k + 1] += weight * pk;
                }
            }
        }
        Ok(WeylSeries { polys })
    }

    fn eta_derivative(&self, order: usize, eta: f64, zeta: f64, cfg: &PhysicalConfig) -> Result<f64> {
        let x = cfg.mu * zeta * zeta / (2.0 * cfg.hbar * cfg.hbar);
        let mut weight = 0.5;
        let mut sum = 0.0;
        let mut started = false;
        let mut quiet = 0;
        let mut last = 0.0;
        for (m, poly) in self.polys.iter().enumerate() {
            if m > 0 {
                weight *= x / (m as f64 * m as f64);
            }
            if weight == 0.0 {
                return Ok(sum);
            }
            let term = weight * poly_derivative(poly, order, eta);
            sum += term;
            last = term;
            if term != 0.0 {
                started = true;
            }
            if started && term.abs() <= 1e-17 * sum.abs() {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(sum);
                }
            } else if started {
                quiet = 0;
            }
        }
        if self.polys.len() == 1 || !started {
            return Ok(sum);
        }
        Err(Error::nonconv("Weyl kernel derivative series", sum, last.abs()))
    }
}

fn multiply(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, pi) in p.iter().enumerate() {
        if *pi == 0.0 {
            continue;
        }
        for (j, qj) in q.iter().enumerate() {
            out[i + j] += pi * qj;
        }
    }
    while out.len() > 1 && out.last() == Some(&0.0) {
        out.pop();
    }
    out
}

/// d^order/dη^order of Σ pₖ ηᵏ.
fn poly_derivative(p: &[f64], order: usize, eta: f64) -> f64 {
    if order >= p.len() {
        return 0.0;
    }
    let mut acc = 0.0;
    for k in (order..p.len()).rev() {
        let falling: f64 = ((k - order + 1)..=k).map(|i| i as f64).product();
        acc = acc * eta + p[k] * falling;
    }
    acc
}

/// ∂ʲ/∂ηʲ of (η/2)·₀F₁(;2;gη) = g^{j−1}/(2(j−1)!)·₀F₁(;j;gη), j ≥ 1.
pub(crate) fn linear_weyl_derivative(lambda: f64, order: usize, eta: f64, zeta: f64, cfg: &PhysicalConfig) -> f64 {
    let g = cfg.mu * lambda * zeta * zeta / (2.0 * cfg.hbar * cfg.hbar);
    if order == 0 {
        return 0.5 * eta * hyp0f1(2.0, g * eta, 1000).unwrap_or(f64::NAN);
    }
    let fact: f64 = (1..order).map(|i| i as f64).product();
    let pref = g.powi(order as i32 - 1) / (2.0 * fact);
    if pref == 0.0 {
        return 0.0;
    }
    pref * hyp0f1(order as f64, g * eta, 1000).unwrap_or(f64::NAN)
}

/// ∂ʲ/∂ηʲ of sinh(cηζ)/(2cζ), c = μω/ħ.
pub(crate) fn harmonic_weyl_derivative(omega: f64, order: usize, eta: f64, zeta: f64, cfg: &PhysicalConfig) -> f64 {
    let c = cfg.mu * omega / cfg.hbar;
    let k = c * zeta;
    if order == 0 {
        return 0.5 * eta * sinhc(k * eta);
    }
    let y = k * eta;
    if order % 2 == 1 {
        0.5 * k.powi(order as i32 - 1) * y.cosh()
    } else {
        0.5 * k.powi(order as i32 - 1) * y.sinh()
    }
}

/// sinh(y)/y.
pub(crate) fn sinhc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        1.0 + y * y / 6.0
    } else {
        y.sinh() / y
    }
}
