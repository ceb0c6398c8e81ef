//! Optimization kernels: an exact-pivot simplex and min-norm-point over the
//! simplex with a posteriori certificates.

mod lp;
mod min_norm;
mod weights;
mod wolfe;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lp::{lp_solve, Bound, FarkasCertificate, LinearProgram, LpOptimum, LpOutcome, UnboundedRay};
pub use min_norm::{
    min_norm_point, min_norm_point_exact, min_norm_point_until, ExactMinNorm, MinNormCertificate, MinNormResult,
};
pub use weights::{check_labels, fold_signs, SignedWeights, SimplexWeights};
pub use wolfe::{wolfe_min_norm_sq, wolfe_min_norm_sq_exact};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    #[default]
    Float,
    Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    /// Frank-Wolfe iterations are empirical; 50k covers every desk-scale
    /// instance exercised by the test suite.
    pub max_iter: usize,
    pub arithmetic: Arithmetic,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: 1e-7, max_iter: 50_000, arithmetic: Arithmetic::Float }
    }
}

impl SolverConfig {
    pub fn new(tol: f64, max_iter: usize, arithmetic: Arithmetic) -> Result<Self> {
        let cfg = SolverConfig { tol, max_iter, arithmetic };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn exact() -> Self {
        SolverConfig { arithmetic: Arithmetic::Rational, ..Default::default() }
    }

    pub fn is_exact(&self) -> bool {
        self.arithmetic == Arithmetic::Rational
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1e-2) {
            return Err(Error::input(format!("tolerance must lie in (0, 1e-2), got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::input("max_iter must be at least 1"));
        }
        Ok(())
    }

    /// Width of the undecided band around a margin threshold.
    pub fn band(&self) -> f64 {
        3.0 * self.tol
    }
}
