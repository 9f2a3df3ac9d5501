use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerance;
use crate::error::{Error, Result};

/// A quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub err_est: f64,
}

impl<T> Estimate<T> {
    pub fn new(value: T, err_est: f64) -> Self {
        Estimate { value, err_est }
    }
}

/// Values the adaptive integrator can accumulate.
pub trait QuadValue:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

struct Panel<T> {
    lo: f64,
    hi: f64,
    value: T,
    err: f64,
    floor: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// 21-point Kronrod rule with the QUADPACK error heuristic.
fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, lo: f64, hi: f64) -> Panel<T> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resabs = fc.magnitude() * WGK[10];
    let mut resg = T::default();
    let mut fv1 = [T::default(); 10];
    let mut fv2 = [T::default(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let result = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    Panel {
        lo,
        hi,
        value: result,
        err,
        floor,
    }
}

/// Single non-adaptive 21-point panel.
pub(crate) fn gk21_panel<T: QuadValue, F: Fn(f64) -> T>(f: &F, lo: f64, hi: f64) -> Estimate<T> {
    let p = gk21(f, lo, hi);
    Estimate::new(p.value, p.err)
}

/// Adaptive Gauss–Kronrod quadrature of a real integrand on [lo, hi].
///
/// Reversed limits flip the sign. The result carries an error estimate no
/// larger than `tol.target(value)` unless the integrand is limited by
/// rounding, in which case the honest (larger) estimate is returned.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<Estimate<f64>> {
    integrate_generic(f, lo, hi, tol)
}

/// Complex-valued counterpart of [`integrate`].
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<Estimate<Complex64>> {
    integrate_generic(f, lo, hi, tol)
}

pub fn integrate_generic<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<Estimate<T>> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!(
            "integration limits must be finite: [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(Estimate::new(T::default(), 0.0));
    }
    if lo > hi {
        let r = adaptive(&f, hi, lo, tol)?;
        return Ok(Estimate::new(r.value * -1.0, r.err_est));
    }
    adaptive(&f, lo, hi, tol)
}

fn adaptive<T: QuadValue, F: Fn(f64) -> T>(f: &F, lo: f64, hi: f64, tol: &Tolerance) -> Result<Estimate<T>> {
    let first = gk21(f, lo, hi);
    let mut value = first.value;
    let mut err = first.err;
    let mut floor = first.floor;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut panels = 1usize;
    loop {
        if !value.magnitude().is_finite() || !err.is_finite() {
            return Err(Error::nonconv(
                "adaptive quadrature (non-finite integrand)",
                f64::NAN,
                f64::INFINITY,
            ));
        }
        if err <= tol.target(value.magnitude()) || err <= 2.0 * floor {
            break;
        }
        if panels >= tol.max_subdivisions {
            let total = resum(&heap);
            return Err(Error::nonconv(
                "adaptive quadrature",
                total.value.magnitude(),
                total.err_est,
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval can no longer be split in floating point
            heap.push(worst);
            let total = resum(&heap);
            if total.err_est <= 1e3 * tol.target(total.value.magnitude()) {
                return Ok(total);
            }
            return Err(Error::nonconv(
                "adaptive quadrature (interval underflow)",
                total.value.magnitude(),
                total.err_est,
            ));
        }
        let left = gk21(f, worst.lo, mid);
        let right = gk21(f, mid, worst.hi);
        value = value - worst.value + left.value + right.value;
        err += left.err + right.err - worst.err;
        floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
        panels += 1;
    }
    Ok(resum(&heap))
}

fn resum<T: QuadValue>(heap: &BinaryHeap<Panel<T>>) -> Estimate<T> {
    let mut panels: Vec<&Panel<T>> = heap.iter().collect();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut value = T::default();
    let mut err = 0.0;
    for p in panels {
        value = value + p.value;
        err += p.err;
    }
    Estimate::new(value, err)
}
