use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate_complex, Estimate};
use super::special::{bessel_j0, hankel_pq};
use crate::config::Tolerance;
use crate::error::{Error, Result};

const MAX_HALF_PERIODS: usize = 20_000;
const WYNN_WINDOW: usize = 50;
const MIN_PIECES: usize = 8;

/// Wynn's epsilon algorithm; returns the newest entry of the highest even
/// column together with its distance to the previous even column.
pub fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    let n = sums.len();
    if n == 0 {
        return (0.0, f64::INFINITY);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur = sums.to_vec();
    let mut best = sums[n - 1];
    let mut best_prev = if n > 1 { sums[n - 2] } else { f64::INFINITY };
    let mut last_even = best;
    for col in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            next.push(prev[j + 1] + 1.0 / d);
        }
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        if col % 2 == 0 {
            best_prev = last_even;
            best = *next.last().expect("non-empty column");
            last_even = best;
        }
        prev = cur;
        cur = next;
        if cur.len() < 2 {
            break;
        }
    }
    (best, (best - best_prev).abs())
}

struct Accelerator {
    sums: Vec<Complex64>,
    history: Vec<Complex64>,
}

impl Accelerator {
    fn new() -> Self {
        Accelerator {
            sums: Vec::new(),
            history: Vec::new(),
        }
    }

    fn push(&mut self, s: Complex64) -> Complex64 {
        self.sums.push(s);
        let start = self.sums.len().saturating_sub(WYNN_WINDOW);
        let window = &self.sums[start..];
        let re: Vec<f64> = window.iter().map(|z| z.re).collect();
        let im: Vec<f64> = window.iter().map(|z| z.im).collect();
        let e = Complex64::new(wynn_epsilon(&re).0, wynn_epsilon(&im).0);
        self.history.push(e);
        e
    }

    /// Largest of the last two successive changes of the extrapolated value.
    fn spread(&self) -> f64 {
        let h = &self.history;
        if h.len() < 3 {
            return f64::INFINITY;
        }
        let n = h.len();
        (h[n - 1] - h[n - 2]).norm().max((h[n - 2] - h[n - 3]).norm())
    }
}

/// ∫_lo^∞ f(x) e^{ikx} dx for bounded real f.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(f: F, k: f64, lo: f64, tol: &Tolerance) -> Result<Estimate<Complex64>> {
    integrate_oscillatory_complex(|x| Complex64::new(f(x), 0.0), k, lo, tol)
}

/// ∫_lo^∞ f(x) e^{ikx} dx for a bounded complex amplitude f.
///
/// The range is cut into half-periods π/|k|; the partial sums are
/// accelerated with the epsilon algorithm.
pub fn integrate_oscillatory_complex<F: Fn(f64) -> Complex64>(
    f: F,
    k: f64,
    lo: f64,
    tol: &Tolerance,
) -> Result<Estimate<Complex64>> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::InvalidInput(format!(
            "oscillation wavenumber must be non-zero and finite, got {k}"
        )));
    }
    let h = PI / k.abs();
    let g = |x: f64| f(x) * Complex64::new(0.0, k * x).exp();
    let mut acc = Accelerator::new();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut quad_err = 0.0;
    let mut last_pieces = [f64::INFINITY; 2];
    let mut best = sum;
    for n in 0..MAX_HALF_PERIODS {
        let a = lo + n as f64 * h;
        let piece = integrate_complex(g, a, a + h, tol)?;
        quad_err += piece.err_est;
        sum += piece.value;
        last_pieces = [last_pieces[1], piece.value.norm()];
        let target = tol.target(sum.norm());
        if n + 1 >= MIN_PIECES && last_pieces[0] + last_pieces[1] <= 1e-3 * target {
            return Ok(Estimate::new(sum, quad_err + last_pieces[1]));
        }
        best = acc.push(sum);
        if n + 1 >= MIN_PIECES && acc.spread() <= target {
            return Ok(Estimate::new(best, acc.spread() + quad_err));
        }
    }
    Err(Error::nonconv(
        "oscillatory half-period acceleration",
        best.norm(),
        acc.spread(),
    ))
}

/// ∫_lo^hi f(x) e^{ikx} dx over a finite window, split into half-periods.
pub fn integrate_fourier_window<F: Fn(f64) -> f64>(
    f: F,
    k: f64,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<Estimate<Complex64>> {
    if hi <= lo {
        return Err(Error::InvalidInput(format!("empty window [{lo}, {hi}]")));
    }
    let step = if k == 0.0 {
        (hi - lo) / 8.0
    } else {
        (PI / k.abs()).min(hi - lo)
    };
    let pieces = ((hi - lo) / step).ceil() as usize;
    let g = |x: f64| Complex64::new(0.0, k * x).exp() * f(x);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for n in 0..pieces {
        let a = lo + n as f64 * step;
        let b = (a + step).min(hi);
        let piece = integrate_complex(g, a, b, tol)?;
        sum += piece.value;
        err += piece.err_est;
    }
    Ok(Estimate::new(sum, err))
}

/// Gaussian converging factor e^{−εx²}, extrapolated ε → 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingSpec {
    pub eps0: f64,
    pub levels: usize,
}

impl Default for DampingSpec {
    fn default() -> Self {
        DampingSpec { eps0: 1e-2, levels: 5 }
    }
}

/// ∫_lo^∞ f(x) e^{ikx} dx via the damped integrals I(ε) = ∫ f e^{ikx−εx²},
/// evaluated at ε₀/2ʲ and Richardson-extrapolated in integer powers of ε.
pub fn integrate_oscillatory_damped<F: Fn(f64) -> f64>(
    f: F,
    k: f64,
    lo: f64,
    damping: DampingSpec,
    tol: &Tolerance,
) -> Result<Estimate<Complex64>> {
    if !(damping.eps0 > 0.0) || damping.levels < 2 {
        return Err(Error::InvalidInput(
            "damping needs eps0 > 0 and at least two levels".into(),
        ));
    }
    let cutoff = (18.0 * 10f64.ln()).sqrt();
    let mut table: Vec<Vec<Complex64>> = Vec::new();
    let mut quad_err = 0.0;
    for j in 0..damping.levels {
        let eps = damping.eps0 / 2f64.powi(j as i32);
        let hi = lo.max(0.0) + cutoff / eps.sqrt();
        let r = integrate_fourier_window(|x| f(x) * (-eps * x * x).exp(), k, lo, hi, tol)?;
        quad_err += r.err_est;
        let mut row = vec![r.value];
        if let Some(last) = table.last() {
            for m in 1..=j {
                let factor = 2f64.powi(m as i32) - 1.0;
                let v = row[m - 1] + (row[m - 1] - last[m - 1]) / factor;
                row.push(v);
            }
        }
        table.push(row);
    }
    let n = table.len();
    let best = table[n - 1][n - 1];
    let spread = (best - table[n - 2][n - 2]).norm();
    Ok(Estimate::new(best, spread + quad_err))
}

/// ∫_lo^∞ J₀(a x) e^{ikx} dx for |k| ≠ |a|.
///
/// Beyond a switch point the Hankel form splits J₀ into two single-frequency
/// waves of wavenumbers k ± a, each handled by half-period acceleration.
/// This stays accurate when |k| − |a| is small and the plain integrand beats.
pub fn bessel_j0_fourier(a: f64, k: f64, lo: f64, tol: &Tolerance) -> Result<Estimate<Complex64>> {
    let a = a.abs();
    if lo < 0.0 {
        return Err(Error::InvalidInput(format!(
            "lower limit must be non-negative, got {lo}"
        )));
    }
    if a == 0.0 {
        if k == 0.0 {
            return Err(Error::Domain("∫ e^{ikx} diverges at k = 0".into()));
        }
        // Abel value of ∫_lo^∞ e^{ikx} dx
        return Ok(Estimate::new(
            Complex64::new(0.0, 1.0 / k) * Complex64::new(0.0, k * lo).exp(),
            0.0,
        ));
    }
    if (k.abs() - a).abs() <= 1e-14 * a {
        return Err(Error::Domain("∫ J₀(ax)e^{ikx} diverges at |k| = a".into()));
    }
    const SWITCH: f64 = 25.0;
    let x0 = lo.max(SWITCH / a);
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    if x0 > lo {
        let w = k.abs().max(a);
        let step = PI / w;
        let pieces = ((x0 - lo) / step).ceil().max(1.0) as usize;
        let span = (x0 - lo) / pieces as f64;
        let g = |x: f64| Complex64::new(0.0, k * x).exp() * bessel_j0(a * x);
        for n in 0..pieces {
            let p = integrate_complex(g, lo + n as f64 * span, lo + (n + 1) as f64 * span, tol)?;
            value += p.value;
            err += p.err_est;
        }
    }
    for s in [1.0f64, -1.0] {
        let phase = Complex64::new(0.0, -s * FRAC_PI_4).exp();
        let amp = |x: f64| {
            let (p, q) = hankel_pq(a * x);
            Complex64::new(p, s * q) * phase * (0.5 * (2.0 / (PI * a * x)).sqrt())
        };
        let tail = integrate_oscillatory_complex(amp, k + s * a, x0, tol)?;
        value += tail.value;
        err += tail.err_est;
    }
    Ok(Estimate::new(value, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_integrand() {
        let tol = Tolerance::default();
        let r = integrate_oscillatory(|_| 0.0, 1.0, 0.0, &tol).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn exponential_closed_form() {
        let tol = Tolerance::default();
        let r = integrate_oscillatory(|x: f64| (-x).exp(), 1.0, 0.0, &tol).unwrap();
        assert!((r.value - Complex64::new(0.5, 0.5)).norm() < 1e-12);
        let lo = 0.7;
        let exact = Complex64::new(-1.0, 1.0).exp().powf(lo) / Complex64::new(1.0, -1.0);
        let r = integrate_oscillatory(|x: f64| (-x).exp(), 1.0, lo, &tol).unwrap();
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn slowly_decaying_amplitude() {
        // ∫_1^∞ e^{ix}/x dx = −Ci(1) + i(π/2 − Si(1))
        let tol = Tolerance::default();
        let r = integrate_oscillatory(|x| 1.0 / x, 1.0, 1.0, &tol).unwrap();
        let ci1 = 0.337_403_922_900_968_1;
        let si1 = 0.946_083_070_367_183;
        let exact = Complex64::new(-ci1, std::f64::consts::FRAC_PI_2 - si1);
        assert!((r.value - exact).norm() < 1e-11, "{:?}", r.value);
    }

    #[test]
    fn wynn_on_alternating_harmonic_series() {
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|n| {
                s += if n % 2 == 1 { 1.0 } else { -1.0 } / n as f64;
                s
            })
            .collect();
        let (v, _) = wynn_epsilon(&sums);
        assert!((v - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn bessel_fourier_identity_near_threshold() {
        let tol = Tolerance::default();
        for (a, b) in [(1.0, 2.0), (2.0, 1.0), (1.0, 1.01)] {
            let r = bessel_j0_fourier(a, b, 0.0, &tol).unwrap();
            let exact = if b > a { 1.0 / (b * b - a * a).sqrt() } else { 0.0 };
            assert!(
                (r.value.im - exact).abs() < 1e-10,
                "({a},{b}): {} vs {exact}",
                r.value.im
            );
        }
    }
}
