use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, Estimate};
use crate::config::Tolerance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalValueSpec {
    pub singularity: f64,
    pub excision_half_width: f64,
}

impl PrincipalValueSpec {
    pub fn new(singularity: f64, excision_half_width: f64) -> Self {
        PrincipalValueSpec {
            singularity,
            excision_half_width,
        }
    }
}

const MAX_HALVINGS: usize = 40;

/// Cauchy principal value of ∫ f over [lo, hi] with a simple pole at
/// `spec.singularity`.
///
/// The symmetric part S(t) = f(c+t) + f(c−t) is integrated over [δ, h] for
/// geometrically shrinking δ; since S is even and regular, the excision error
/// is a series in odd powers of δ which Richardson extrapolation removes.
pub fn integrate_pv<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: PrincipalValueSpec,
    tol: &Tolerance,
) -> Result<Estimate<f64>> {
    let c = spec.singularity;
    let d0 = spec.excision_half_width;
    if !(d0 > 0.0) || !(lo < c - d0) || !(c + d0 < hi) {
        return Err(Error::InvalidInput(format!(
            "excision [{}, {}] must lie inside ({lo}, {hi})",
            c - d0,
            c + d0
        )));
    }
    let h = (c - lo).min(hi - c);
    let left = integrate(&f, lo, c - h, tol)?;
    let right = integrate(&f, c + h, hi, tol)?;
    let sym = |t: f64| f(c + t) + f(c - t);

    let first = integrate(sym, d0, h, tol)?;
    let mut quad_err = left.err_est + right.err_est + first.err_est;
    let mut partial = first.value;
    let mut rows: Vec<Vec<f64>> = vec![vec![partial]];
    let mut delta = d0;
    let mut prev_best = f64::NAN;
    let mut prev_diff = f64::INFINITY;
    for level in 1..=MAX_HALVINGS {
        let next = 0.5 * delta;
        let piece = integrate(sym, next, delta, tol)?;
        quad_err += piece.err_est;
        partial += piece.value;
        delta = next;

        let last = rows.last().expect("at least one row");
        let mut row = Vec::with_capacity(level + 1);
        row.push(partial);
        for m in 1..=level.min(6) {
            let factor = 2f64.powi(2 * m as i32 - 1) - 1.0;
            let r = row[m - 1] + (row[m - 1] - last[m - 1]) / factor;
            row.push(r);
            if m >= last.len() {
                break;
            }
        }
        let best = *row.last().expect("non-empty row");
        rows.push(row);
        let diff = (best - prev_best).abs();
        let total = left.value + right.value + best;
        if level >= 2 && diff <= tol.target(total) && prev_diff <= 10.0 * tol.target(total) {
            return Ok(Estimate::new(total, diff + quad_err));
        }
        prev_diff = diff;
        prev_best = best;
    }
    Err(Error::nonconv(
        "principal value excision",
        left.value + right.value + prev_best,
        prev_diff + quad_err,
    ))
}
