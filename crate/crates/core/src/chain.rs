use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::operators;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Ring: mass `n-1` is coupled back to mass `0`.
    Circular,
    /// Open chain with fixed ends.
    Linear,
}

impl Topology {
    pub fn coupling_matrix(self, n: usize) -> Result<IntMatrix> {
        match self {
            Topology::Circular => operators::circular_coupling_matrix(n),
            Topology::Linear => operators::linear_coupling_matrix(n),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Circular => "circular",
            Topology::Linear => "linear",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circular" => Ok(Topology::Circular),
            "linear" => Ok(Topology::Linear),
            other => Err(Error::InvalidConfig(format!("unknown topology {other:?}"))),
        }
    }
}

/// A chain of `n` identical masses joined by identical springs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainConfig {
    topology: Topology,
    n: usize,
    mass: f64,
    spring_k: f64,
    omega0: f64,
}

impl ChainConfig {
    pub fn new(topology: Topology, n: usize, mass: f64, spring_k: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewMasses(n));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if !(spring_k.is_finite() && spring_k > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "spring constant must be positive, got {spring_k}"
            )));
        }
        Ok(Self {
            topology,
            n,
            mass,
            spring_k,
            omega0: (spring_k / mass).sqrt(),
        })
    }

    /// Unit mass with `k = omega0²`.
    pub fn with_omega0(topology: Topology, n: usize, omega0: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "omega0 must be positive, got {omega0}"
            )));
        }
        let mut cfg = Self::new(topology, n, 1.0, omega0 * omega0)?;
        cfg.omega0 = omega0;
        Ok(cfg)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn spring_k(&self) -> f64 {
        self.spring_k
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn coupling_matrix(&self) -> IntMatrix {
        // n >= 2 is enforced at construction
        self.topology
            .coupling_matrix(self.n)
            .expect("validated chain size")
    }
}
