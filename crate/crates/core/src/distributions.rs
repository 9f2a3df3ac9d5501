//! Arrival-time distributions from eigenfunction overlaps.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::PhysicalConfig;
use crate::eigenfunctions::{barrier_eigenfunction, free_eigenfunction, EigenKind};
use crate::error::{Error, Result};
use crate::numerics::{integrate_complex, Estimate};
use crate::par::{self, Execution};
use crate::potentials::SquareBarrier;
use crate::wavepackets::GaussianPacket;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DistributionSystem {
    Free,
    Barrier(SquareBarrier),
    /// Free travel with the packet moved forward by the barrier length.
    FreeShortened(SquareBarrier),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub tau: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TOADistribution {
    pub tau_grid: Vec<f64>,
    /// NaN where the overlap failed; see `failures`.
    pub values: Vec<f64>,
    pub err_est: Vec<f64>,
    pub system: DistributionSystem,
    pub kind: EigenKind,
    /// ∫Π dτ over the grid relative to the channel's full weight ½.
    pub norm_captured: f64,
    pub failures: Vec<PointFailure>,
}

pub const DEFAULT_GRID_POINTS: usize = 600;

/// Classical free arrival time −μq₀/p₀.
pub fn classical_free_toa(pkt: &GaussianPacket, cfg: &PhysicalConfig) -> Result<f64> {
    let t = -cfg.mu * pkt.q0 / cfg.momentum(pkt.k0);
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(Error::InvalidInput(format!(
            "packet at q0={} with k0={} never reaches the origin classically",
            pkt.q0, pkt.k0
        )))
    }
}

/// `n` points over [0, 2·classical free arrival time].
pub fn default_tau_grid(pkt: &GaussianPacket, n: usize, cfg: &PhysicalConfig) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "tau grid needs at least 3 points, got {n}"
        )));
    }
    let end = 2.0 * classical_free_toa(pkt, cfg)?;
    Ok((0..n).map(|i| end * i as f64 / (n - 1) as f64).collect())
}

/// ⟨Φ(τ)|ψ⟩ in the momentum representation.
pub fn arrival_amplitude(
    pkt: &GaussianPacket,
    system: &DistributionSystem,
    kind: EigenKind,
    tau: f64,
    cfg: &PhysicalConfig,
) -> Result<Estimate<Complex64>> {
    let hb = cfg.hbar;
    let (packet, barrier) = match system {
        DistributionSystem::Free => (*pkt, None),
        DistributionSystem::Barrier(b) => (*pkt, Some(b)),
        DistributionSystem::FreeShortened(b) => (pkt.translated(b.length()), None),
    };
    let w = packet.k_window() * hb;
    let (lo, hi) = (packet.k0 * hb - w, packet.k0 * hb + w);
    let f = |p: f64| {
        let phi = match barrier {
            Some(b) => barrier_eigenfunction(kind, tau, p, b, cfg),
            None => free_eigenfunction(kind, tau, p, cfg),
        };
        phi.conj() * packet.p_amp(p, cfg)
    };
    let mut breaks = vec![lo, hi];
    let mut length = 0.0;
    if let Some(b) = barrier {
        length = b.length();
        let pc = b.critical_momentum(cfg);
        for c in [-pc, 0.0, pc] {
            if lo < c && c < hi {
                breaks.push(c);
            }
        }
    } else if lo < 0.0 && hi > 0.0 {
        breaks.push(0.0);
    }
    breaks.sort_by(f64::total_cmp);
    let p_max = lo.abs().max(hi.abs());
    let omega = (packet.q0.abs() + length + tau.abs() * p_max / cfg.mu) / hb + 1.0 / w;
    let step = PI / omega;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for seg in breaks.windows(2) {
        let n = ((seg[1] - seg[0]) / step).ceil().max(1.0) as usize;
        let h = (seg[1] - seg[0]) / n as f64;
        for i in 0..n {
            let a = seg[0] + i as f64 * h;
            let r = integrate_complex(f, a, a + h, &cfg.tol)?;
            sum += r.value;
            err += r.err_est;
        }
    }
    Ok(Estimate::new(sum, err))
}

fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    (0..n)
        .map(|i| {
            let l = if i > 0 { grid[i] - grid[i - 1] } else { 0.0 };
            let r = if i + 1 < n { grid[i + 1] - grid[i] } else { 0.0 };
            0.5 * (l + r)
        })
        .collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::InvalidInput("tau grid needs at least 3 points".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "tau grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Π(τ) = |⟨Φ(τ)|ψ⟩|² on `grid`.
pub fn toa_distribution(
    pkt: &GaussianPacket,
    system: DistributionSystem,
    kind: EigenKind,
    grid: &[f64],
    cfg: &PhysicalConfig,
    exec: Execution,
) -> Result<TOADistribution> {
    check_grid(grid)?;
    let points = par::map(exec, grid, |&tau| arrival_amplitude(pkt, &system, kind, tau, cfg));
    let mut values = Vec::with_capacity(grid.len());
    let mut errs = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (i, r) in points.into_iter().enumerate() {
        match r {
            Ok(a) => {
                let m = a.value.norm();
                values.push(m * m);
                errs.push(2.0 * m * a.err_est + a.err_est * a.err_est);
            }
            Err(e) => {
                values.push(f64::NAN);
                errs.push(f64::INFINITY);
                failures.push(PointFailure {
                    index: i,
                    tau: grid[i],
                    message: e.to_string(),
                });
            }
        }
    }
    let w = trapezoid_weights(grid);
    let mass: f64 = values
        .iter()
        .zip(&w)
        .filter(|(v, _)| v.is_finite())
        .map(|(v, w)| v * w)
        .sum();
    Ok(TOADistribution {
        tau_grid: grid.to_vec(),
        values,
        err_est: errs,
        system,
        kind,
        norm_captured: mass / 0.5,
        failures,
    })
}

impl TOADistribution {
    /// Grid location of the maximum refined by a parabola through its
    /// neighbours.
    pub fn peak(&self) -> Result<f64> {
        let v = &self.values;
        let t = &self.tau_grid;
        let (imax, &vmax) = v
            .iter()
            .enumerate()
            .filter(|(_, x)| x.is_finite())
            .max_by(|a, b| a.1.total_cmp(b.1))
            .ok_or(Error::FlatDistribution)?;
        if !(vmax > 0.0) {
            return Err(Error::FlatDistribution);
        }
        let ties = v
            .iter()
            .enumerate()
            .filter(|&(i, &x)| (i as isize - imax as isize).abs() > 1 && x >= vmax * (1.0 - 1e-9))
            .count();
        if ties > 0 {
            return Err(Error::FlatDistribution);
        }
        if imax == 0 || imax + 1 == v.len() {
            return Ok(t[imax]);
        }
        let (x0, x1, x2) = (t[imax - 1], t[imax], t[imax + 1]);
        let (y0, y1, y2) = (v[imax - 1], v[imax], v[imax + 1]);
        let d01 = (y1 - y0) / (x1 - x0);
        let d12 = (y2 - y1) / (x2 - x1);
        let curv = (d12 - d01) / (x2 - x0);
        if !(curv < 0.0) {
            return Ok(x1);
        }
        // vertex of the interpolating parabola
        let vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
        Ok(vertex.clamp(x0, x2))
    }

    pub fn mean_arrival(&self) -> Result<f64> {
        if !(self.norm_captured > 0.99) {
            return Err(Error::InsufficientCapture(self.norm_captured));
        }
        let w = trapezoid_weights(&self.tau_grid);
        let mut num = 0.0;
        let mut den = 0.0;
        for ((t, v), w) in self.tau_grid.iter().zip(&self.values).zip(&w) {
            if v.is_finite() {
                num += t * v * w;
                den += v * w;
            }
        }
        Ok(num / den)
    }

    /// Linear interpolation, zero outside the grid.
    pub fn interpolate(&self, tau: f64) -> f64 {
        let t = &self.tau_grid;
        if tau < t[0] || tau > t[t.len() - 1] {
            return 0.0;
        }
        let i = t.partition_point(|&x| x <= tau).min(t.len() - 1).max(1);
        let (a, b) = (t[i - 1], t[i]);
        let s = (tau - a) / (b - a);
        self.values[i - 1] * (1.0 - s) + self.values[i] * s
    }

    /// ∫|Π_self(τ) − Π_other(τ + shift)| dτ over this grid.
    pub fn shifted_l1(&self, other: &TOADistribution, shift: f64) -> f64 {
        let w = trapezoid_weights(&self.tau_grid);
        self.tau_grid
            .iter()
            .zip(&self.values)
            .zip(&w)
            .map(|((t, v), w)| (v - other.interpolate(t + shift)).abs() * w)
            .sum()
    }
}

/// argmax(b) − argmax(a).
pub fn peak_shift(a: &TOADistribution, b: &TOADistribution) -> Result<f64> {
    if a.tau_grid != b.tau_grid {
        return Err(Error::InvalidInput(
            "peak_shift needs both distributions on one grid".into(),
        ));
    }
    Ok(b.peak()? - a.peak()?)
}

pub fn mean_arrival(dist: &TOADistribution) -> Result<f64> {
    dist.mean_arrival()
}
