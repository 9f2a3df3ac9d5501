use serde::{Deserialize, Serialize};
use toa_lab::ordering::OrderingRule;
use toa_lab::potentials::Potential;
use toa_lab::wavepackets::GaussianPacket;
use toa_lab::{Error, PhysicalConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub physical: PhysicalConfig,
    pub potential: Potential,
    #[serde(default)]
    pub packet: Option<GaussianPacket>,
    #[serde(default)]
    pub ordering: OrderingSpec,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// τ values for the `eigen` density dumps.
    #[serde(default = "default_eigen_taus")]
    pub eigen_taus: Vec<f64>,
}

fn default_epsilon() -> f64 {
    toa_lab::eigenfunctions::DEFAULT_EPSILON
}

fn default_eigen_taus() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderingSpec {
    Name(String),
    Inline(OrderingRule),
}

impl Default for OrderingSpec {
    fn default() -> Self {
        OrderingSpec::Name("weyl".into())
    }
}

impl OrderingSpec {
    pub fn resolve(&self) -> toa_lab::Result<OrderingRule> {
        match self {
            OrderingSpec::Name(n) => OrderingRule::by_name(n),
            OrderingSpec::Inline(r) => Ok(r.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> toa_lab::Result<Vec<f64>> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) || self.points < 2 {
            return Err(Error::InvalidInput(format!("bad grid {self:?}")));
        }
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / n as f64)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Defaults to the packet's classical arrival window.
    #[serde(default)]
    pub tau: Option<Grid>,
    #[serde(default = "default_eta_zeta")]
    pub eta_zeta: Grid,
    #[serde(default = "default_p")]
    pub p: Grid,
}

fn default_eta_zeta() -> Grid {
    Grid {
        min: -2.0,
        max: 2.0,
        points: 21,
    }
}

fn default_p() -> Grid {
    Grid {
        min: -20.0,
        max: 20.0,
        points: 401,
    }
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            tau: None,
            eta_zeta: default_eta_zeta(),
            p: default_p(),
        }
    }
}

impl ExperimentConfig {
    pub fn validated(self) -> toa_lab::Result<Self> {
        self.physical.validated()?;
        let potential = self.potential.clone().validated()?;
        self.ordering.resolve()?;
        if let Some(t) = &self.grids.tau {
            t.values()?;
        }
        self.grids.eta_zeta.values()?;
        self.grids.p.values()?;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.eigen_taus.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("eigen_taus must be finite".into()));
        }
        Ok(ExperimentConfig { potential, ..self })
    }

    pub fn packet(&self) -> toa_lab::Result<GaussianPacket> {
        self.packet
            .ok_or_else(|| Error::InvalidInput("this subcommand needs a `packet` section".into()))
    }
}
