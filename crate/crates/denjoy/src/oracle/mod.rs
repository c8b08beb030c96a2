//! Brute-force solvers used as independent oracles: walk-on-spheres Monte
//! Carlo for harmonic measure and a finite-difference Laplace solver for
//! Green and Martin values. Neither touches the Abelian machinery.

pub mod fd;
pub mod wos;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fd::{fd_green, fd_harmonic_measure, fd_martin, GridConfig};
pub use wos::{wos_harmonic_measure, WalkConfig, WalkStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleMethod {
    WoS,
    FD,
}

/// A brute-force estimate with its own error budget.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: f64,
    /// Standard error (WoS) or discretization estimate (FD).
    pub stderr_or_disc: f64,
    /// Effective samples (WoS) or finest grid size (FD).
    pub n: u64,
    pub method: OracleMethod,
}

impl OracleEstimate {
    /// |self - other| within k sigma of the combined uncertainty.
    pub fn agrees_with(&self, value: f64, k: f64, extra_err: f64) -> bool {
        (self.value - value).abs() <= k * (self.stderr_or_disc + extra_err)
    }
}

#[derive(Debug, Clone, Error)]
pub enum OracleError {
    #[error("walk budget exceeded: killed fraction {0:e}")]
    WalkBudgetExceeded(f64),
    #[error("fd solver diverged: residual {0:e}")]
    SolverDiverged(f64),
    #[error("point {0} outside the solvable region")]
    OutOfRegion(String),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
}
