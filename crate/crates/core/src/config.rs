use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by every quadrature and series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerance {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub max_series_terms: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdivisions: 4000,
            max_series_terms: 500,
        }
    }
}

impl Tolerance {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Result<Self> {
        Tolerance {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "abs_tol must be non-negative, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidInput("max_subdivisions must be at least 1".into()));
        }
        if self.max_series_terms < 10 {
            return Err(Error::InvalidInput("max_series_terms must be at least 10".into()));
        }
        Ok(self)
    }

    /// Acceptance threshold for an estimate of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    pub fn with_rel(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Mass, reduced Planck constant and tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig {
    pub mu: f64,
    pub hbar: f64,
    #[serde(default)]
    pub tol: Tolerance,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        PhysicalConfig {
            mu: 1.0,
            hbar: 1.0,
            tol: Tolerance::default(),
        }
    }
}

impl PhysicalConfig {
    pub fn new(mu: f64, hbar: f64) -> Result<Self> {
        PhysicalConfig {
            mu,
            hbar,
            tol: Tolerance::default(),
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidInput(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidInput(format!("hbar must be positive, got {}", self.hbar)));
        }
        self.tol.validated()?;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn momentum(&self, k: f64) -> f64 {
        self.hbar * k
    }

    pub fn wavenumber(&self, p: f64) -> f64 {
        p / self.hbar
    }
}
