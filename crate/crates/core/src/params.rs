use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the nonlocal isoperimetric energy on `(0, eps)^ell x (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Strength of the nonlocal term.
    pub gamma: f64,
    /// Prescribed average of `u`.
    pub m: f64,
    /// Width of the thin direction(s).
    pub eps: f64,
    /// Number of thin directions.
    pub ell: usize,
}

impl ProblemParams {
    pub fn new(gamma: f64, m: f64, eps: f64, ell: usize) -> Result<Self> {
        let p = ProblemParams { gamma, m, eps, ell };
        p.validate()?;
        Ok(p)
    }

    /// Zero mass on the thin rectangle, the setting of the lamellar catalog.
    pub fn rect(gamma: f64, eps: f64) -> Result<Self> {
        Self::new(gamma, 0.0, eps, 1)
    }

    /// Parameters for the one-dimensional problem; `eps` is irrelevant there.
    pub fn one_d(gamma: f64, m: f64) -> Result<Self> {
        Self::new(gamma, m, 1.0, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if !(self.m > -1.0 && self.m < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "m must lie in (-1, 1), got {}",
                self.m
            )));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eps must be > 0, got {}",
                self.eps
            )));
        }
        if !(1..=2).contains(&self.ell) {
            return Err(Error::InvalidParameter(format!(
                "ell must be 1 or 2, got {}",
                self.ell
            )));
        }
        Ok(())
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        ProblemParams { gamma, ..self }
    }

    pub fn with_eps(self, eps: f64) -> Self {
        ProblemParams { eps, ..self }
    }
}
