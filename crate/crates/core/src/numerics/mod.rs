//! Special functions and quadrature engines.

mod gauss_legendre;
mod oscillatory;
mod principal_value;
mod quadrature;
mod special;

pub use gauss_legendre::gauss_legendre;
pub use oscillatory::{
    bessel_j0_fourier, integrate_fourier_window, integrate_oscillatory, integrate_oscillatory_complex,
    integrate_oscillatory_damped, wynn_epsilon, DampingSpec,
};
pub use principal_value::{integrate_pv, PrincipalValueSpec};
pub(crate) use quadrature::gk21_panel;
pub use quadrature::{integrate, integrate_complex, integrate_generic, Estimate, QuadValue};
pub use special::{bessel_i0, bessel_j0, hyp0f1, hyp0f1_1};

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}
