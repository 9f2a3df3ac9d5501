use std::f64::consts::PI;

use super::KahanSum;
use crate::error::{Error, Result};

/// Below this |z| the ₀F₁(;1;z) series is summed directly.
const SERIES_LIMIT: f64 = 400.0;
const J0_SERIES_MAX: f64 = 8.0;
const J0_MILLER_MAX: f64 = 25.0;
const I0_SERIES_MAX: f64 = 40.0;
const DEFAULT_TERMS: usize = 500;

/// ₀F₁(;b;z) by its power series Σ zᵐ/((b)ₘ m!).
///
/// Accurate for z ≥ 0 and for moderate negative z; large negative arguments
/// cancel catastrophically and should go through the Bessel routines instead.
pub fn hyp0f1(b: f64, z: f64, max_terms: usize) -> Result<f64> {
    if !z.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!("hyp0f1 argument not finite: b={b}, z={z}")));
    }
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::Domain(format!("hyp0f1 undefined for b={b}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let mut sum = KahanSum::new();
    let mut term = 1.0;
    sum.add(term);
    for m in 0..max_terms {
        let mf = m as f64;
        term *= z / ((mf + 1.0) * (b + mf));
        sum.add(term);
        if !term.is_finite() {
            return Err(Error::Overflow("hyp0f1 series"));
        }
        let decaying = (mf + 2.0) * (b + mf + 1.0) > z.abs();
        if decaying && term.abs() <= 0.25 * f64::EPSILON * sum.value().abs() {
            return Ok(sum.value());
        }
    }
    Err(Error::nonconv("hyp0f1 series", sum.value(), term.abs()))
}

/// ₀F₁(;1;z) = I₀(2√z) for z ≥ 0 and J₀(2√(−z)) for z < 0.
pub fn hyp0f1_1(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::InvalidInput(format!("hyp0f1_1 argument not finite: {z}")));
    }
    if z >= 0.0 {
        if z <= SERIES_LIMIT {
            hyp0f1(1.0, z, DEFAULT_TERMS)
        } else {
            i0_asymptotic(2.0 * z.sqrt())
        }
    } else {
        Ok(bessel_j0(2.0 * (-z).sqrt()))
    }
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= J0_SERIES_MAX {
        hyp0f1(1.0, -0.25 * x * x, DEFAULT_TERMS).expect("bounded series argument")
    } else if x <= J0_MILLER_MAX {
        j0_miller(x)
    } else {
        let (p, q) = hankel_pq(x);
        let (s, c) = x.sin_cos();
        // cos(x − π/4) and sin(x − π/4) without rounding π/4 into x
        let cchi = (c + s) * std::f64::consts::FRAC_1_SQRT_2;
        let schi = (s - c) * std::f64::consts::FRAC_1_SQRT_2;
        (2.0 / (PI * x)).sqrt() * (p * cchi - q * schi)
    }
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("bessel_i0 argument not finite: {x}")));
    }
    let x = x.abs();
    if x <= I0_SERIES_MAX {
        hyp0f1(1.0, 0.25 * x * x, DEFAULT_TERMS)
    } else {
        i0_asymptotic(x)
    }
}

fn i0_asymptotic(x: f64) -> Result<f64> {
    let mut sum = KahanSum::new();
    let mut term = 1.0;
    sum.add(term);
    for k in 1..200 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next >= term || next < 1e-17 * sum.value() {
            break;
        }
        term = next;
        sum.add(term);
    }
    let v = (x - 0.5 * (2.0 * PI * x).ln()).exp() * sum.value();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("bessel_i0"))
    }
}

/// Miller backward recurrence normalized by J₀ + 2ΣJ₂ₖ = 1.
fn j0_miller(x: f64) -> f64 {
    let start = 2 * ((x + 25.0 + (40.0 * x).sqrt()) as usize / 2);
    let mut jp1 = 0.0;
    let mut j = 1e-30;
    let mut norm = 0.0;
    let mut j0 = 0.0;
    let mut n = start;
    while n > 0 {
        let jm1 = 2.0 * n as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        n -= 1;
        if n > 0 && n.is_multiple_of(2) {
            norm += 2.0 * j;
        }
        if n == 0 {
            j0 = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
        }
    }
    j0 / (norm + j0)
}

/// Hankel asymptotic factors P₀(x), Q₀(x) with
/// J₀(x) = √(2/πx)[P cos(x−π/4) − Q sin(x−π/4)]. Intended for x ≳ 20.
pub(crate) fn hankel_pq(x: f64) -> (f64, f64) {
    let mut p = KahanSum::new();
    let mut q = KahanSum::new();
    let mut a = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..120usize {
        if k > 0 {
            let kf = k as f64;
            a *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        }
        if a > prev || a < 1e-18 {
            break;
        }
        prev = a;
        // P collects (−1)^j a_{2j}, Q collects −(−1)^j a_{2j+1}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p.add(sign * a);
        } else {
            q.add(-sign * a);
        }
    }
    (p.value(), q.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_arguments() {
        assert_eq!(hyp0f1_1(0.0).unwrap(), 1.0);
        assert_eq!(bessel_j0(0.0), 1.0);
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn branches_agree_at_switch_points() {
        let series = |x: f64| hyp0f1(1.0, -0.25 * x * x, 500).unwrap();
        let hankel = |x: f64| {
            let (p, q) = hankel_pq(x);
            let chi = x - std::f64::consts::FRAC_PI_4;
            (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
        };
        for x in [6.0, 7.0, J0_SERIES_MAX] {
            assert!((series(x) - j0_miller(x)).abs() < 1e-14, "x={x}");
        }
        for x in [J0_MILLER_MAX, 30.0] {
            assert!((hankel(x) - j0_miller(x)).abs() < 1e-14, "x={x}");
        }
        let x = I0_SERIES_MAX;
        let s = hyp0f1(1.0, 0.25 * x * x, 500).unwrap();
        assert!((s / i0_asymptotic(x).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn known_values() {
        // reference values from standard tables
        let cases = [
            (1.0, 0.765_197_686_557_966_6),
            (5.0, -0.177_596_771_314_338_3),
            (10.0, -0.245_935_764_451_348_3),
            (20.0, 0.167_024_664_340_583_2),
            (30.0, -0.086_367_983_581_040_2),
            (100.0, 0.019_985_850_304_223_12),
        ];
        for (x, v) in cases {
            assert!((bessel_j0(x) - v).abs() < 2e-15, "j0({x}) = {}", bessel_j0(x));
        }
        let i5 = 27.239_871_823_604_442;
        assert!(((bessel_i0(5.0).unwrap() - i5) / i5).abs() < 1e-14);
        let i50 = 2.932_553_783_849_336e20;
        assert!(((bessel_i0(50.0).unwrap() - i50) / i50).abs() < 1e-13);
    }

    #[test]
    fn i0_overflow() {
        assert_eq!(bessel_i0(800.0), Err(Error::Overflow("bessel_i0")));
        assert!(bessel_i0(700.0).unwrap().is_finite());
    }

    #[test]
    fn general_b_matches_elementary_forms() {
        // ₀F₁(;1/2;z²/4) = cosh z and ₀F₁(;3/2;z²/4) = sinh z / z
        for &z in &[0.3, 1.0, 2.5, 6.0] {
            let c = hyp0f1(0.5, 0.25 * z * z, 500).unwrap();
            let s = hyp0f1(1.5, 0.25 * z * z, 500).unwrap();
            assert!((c / z.cosh() - 1.0).abs() < 1e-14);
            assert!((s / (z.sinh() / z) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn series_budget_is_enforced() {
        let err = hyp0f1(1.0, 300.0, 10).unwrap_err();
        assert!(err.is_non_convergence());
    }
}
