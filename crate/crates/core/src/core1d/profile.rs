use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `+-1` valued function on `(0, 1)` given by its ordered jump points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    jumps: Vec<f64>,
    leading: i8,
}

impl Profile1D {
    /// `leading` is the value on `(0, t_1)`; it must be `+1` or `-1`.
    pub fn new(jumps: Vec<f64>, leading: i8) -> Result<Self> {
        if leading != 1 && leading != -1 {
            return Err(Error::InvalidParameter(format!(
                "leading value must be +-1, got {leading}"
            )));
        }
        if let Some(&t) = jumps.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::InvalidParameter(format!("jump {t} outside (0, 1)")));
        }
        if jumps.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "jumps must be strictly increasing".into(),
            ));
        }
        Ok(Profile1D { jumps, leading })
    }

    /// The constant profile `leading` with no interface.
    pub fn constant(leading: i8) -> Result<Self> {
        Self::new(Vec::new(), leading)
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn leading_value(&self) -> i8 {
        self.leading
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    /// Value on the `i`-th interval, `i = 0..=jump_count()`.
    pub fn interval_value(&self, i: usize) -> f64 {
        if i.is_multiple_of(2) {
            self.leading as f64
        } else {
            -(self.leading as f64)
        }
    }

    /// Jump `u(t_i+) - u(t_i-)` across the `i`-th interface, always `+-2`.
    pub fn jump_size(&self, i: usize) -> f64 {
        self.interval_value(i + 1) - self.interval_value(i)
    }

    /// Breakpoints `0, t_1, ..., t_N, 1`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.jumps.len() + 2);
        b.push(0.0);
        b.extend_from_slice(&self.jumps);
        b.push(1.0);
        b
    }

    /// `int_0^1 u dy`.
    pub fn mass(&self) -> f64 {
        self.breakpoints()
            .windows(2)
            .enumerate()
            .map(|(i, w)| self.interval_value(i) * (w[1] - w[0]))
            .sum()
    }

    /// Pointwise value; at a jump point the value to the right is returned.
    pub fn value(&self, y: f64) -> f64 {
        let idx = self.jumps.partition_point(|&t| t <= y);
        self.interval_value(idx)
    }

    /// The reflected profile `-u` (same jumps).
    pub fn negated(&self) -> Self {
        Profile1D {
            jumps: self.jumps.clone(),
            leading: -self.leading,
        }
    }

    /// Smallest distance between consecutive breakpoints (including the ends).
    pub fn min_gap(&self) -> f64 {
        self.breakpoints()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn with_jumps(&self, jumps: Vec<f64>) -> Result<Self> {
        Self::new(jumps, self.leading)
    }
}

/// Jump points `(2j - 1) / (2k)`, `j = 1..=k`, of the `k`-interface critical point.
pub fn lamellar_jumps(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let denom = (2 * k) as f64;
    Ok((1..=k).map(|j| (2 * j - 1) as f64 / denom).collect())
}

/// The zero-mass critical point `u_k`: `+1` near `y = 0`, alternating at [`lamellar_jumps`].
pub fn lamellar_profile(k: usize) -> Result<Profile1D> {
    Profile1D::new(lamellar_jumps(k)?, 1)
}
