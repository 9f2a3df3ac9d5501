//! Smooth, effectively compactly supported probe functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussians are cut where they fall below ~1e−20.
const GAUSS_REACH: f64 = 13.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// e^{−(x−c)²/4w²} e^{ikx}
    Gaussian {
        center: f64,
        width: f64,
        #[serde(default)]
        wavenumber: f64,
    },
    /// e^{−1/(1−u²)} with u = (x−c)/h, zero for |u| ≥ 1.
    Bump { center: f64, half_width: f64 },
}

impl TestFunction {
    pub fn gaussian(center: f64, width: f64) -> Self {
        TestFunction::Gaussian {
            center,
            width,
            wavenumber: 0.0,
        }
    }

    pub fn bump(center: f64, half_width: f64) -> Self {
        TestFunction::Bump { center, half_width }
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            TestFunction::Gaussian {
                center,
                width,
                wavenumber,
            } => center.is_finite() && wavenumber.is_finite() && width > 0.0 && width.is_finite(),
            TestFunction::Bump { center, half_width } => {
                center.is_finite() && half_width > 0.0 && half_width.is_finite()
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidInput(format!("bad test function {self:?}")))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            TestFunction::Gaussian { center, width, .. } => {
                (center - GAUSS_REACH * width, center + GAUSS_REACH * width)
            }
            TestFunction::Bump { center, half_width } => (center - half_width, center + half_width),
        }
    }

    pub fn value(&self, x: f64) -> Complex64 {
        match *self {
            TestFunction::Gaussian {
                center,
                width,
                wavenumber,
            } => {
                let u = x - center;
                Complex64::from_polar((-u * u / (4.0 * width * width)).exp(), wavenumber * x)
            }
            TestFunction::Bump { center, half_width } => {
                let u = (x - center) / half_width;
                if u.abs() >= 1.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new((-1.0 / (1.0 - u * u)).exp(), 0.0)
                }
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> Complex64 {
        match *self {
            TestFunction::Gaussian {
                center,
                width,
                wavenumber,
            } => {
                let w2 = width * width;
                let a = Complex64::new(-(x - center) / (2.0 * w2), wavenumber);
                (a * a - 1.0 / (2.0 * w2)) * self.value(x)
            }
            TestFunction::Bump { center, half_width } => {
                let u = (x - center) / half_width;
                if u.abs() >= 1.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let s = 1.0 - u * u;
                let g1 = -2.0 * u / (s * s);
                let g2 = -2.0 / (s * s) - 8.0 * u * u / (s * s * s);
                self.value(x) * ((g1 * g1 + g2) / (half_width * half_width))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_derivatives_match_differences() {
        let fs = [
            TestFunction::Gaussian {
                center: 0.3,
                width: 0.2,
                wavenumber: 2.0,
            },
            TestFunction::bump(-0.1, 0.8),
        ];
        for f in fs {
            for x in [-0.5, -0.1, 0.2, 0.45] {
                let h = 1e-3;
                let fd = (-f.value(x + 2.0 * h) + f.value(x + h) * 16.0 - f.value(x) * 30.0 + f.value(x - h) * 16.0
                    - f.value(x - 2.0 * h))
                    / (12.0 * h * h);
                let d = f.second_derivative(x);
                assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0), "{f:?} at {x}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn support_edges_are_negligible() {
        let g = TestFunction::gaussian(1.0, 0.5);
        let (lo, hi) = g.support();
        assert!(g.value(lo).norm() < 1e-19 && g.value(hi).norm() < 1e-19);
        assert_eq!(TestFunction::bump(0.0, 1.0).value(1.0).norm(), 0.0);
    }
}
