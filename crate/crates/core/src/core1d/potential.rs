use crate::error::{Error, Result};

use super::Profile1D;

/// Largest `|mass(u) - m|` accepted as compatible Neumann data.
pub const SOLVABILITY_TOL: f64 = 1e-12;

/// Zero-mean solution of `-v'' = u - m`, `v'(0) = v'(1) = 0`.
///
/// On the `i`-th interval `[b_i, b_{i+1}]` the potential is
/// `v(y) = c0 + c1 (y - b_i) + c2 (y - b_i)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential1D {
    breakpoints: Vec<f64>,
    coeffs: Vec<[f64; 3]>,
}

/// Integrates `u - m` twice in closed form.
pub fn solve_potential_1d(u: &Profile1D, m: f64) -> Result<Potential1D> {
    let mass = u.mass();
    if !((mass - m).abs() < SOLVABILITY_TOL) {
        return Err(Error::MassMismatch { mass, m });
    }
    let breakpoints = u.breakpoints();
    let mut coeffs = Vec::with_capacity(breakpoints.len() - 1);
    let (mut value, mut slope) = (0.0, 0.0);
    for (i, w) in breakpoints.windows(2).enumerate() {
        let len = w[1] - w[0];
        let c2 = -(u.interval_value(i) - m) / 2.0;
        coeffs.push([value, slope, c2]);
        value += slope * len + c2 * len * len;
        slope += 2.0 * c2 * len;
    }
    let mut v = Potential1D {
        breakpoints,
        coeffs,
    };
    let mean = v.mean();
    for c in &mut v.coeffs {
        c[0] -= mean;
    }
    Ok(v)
}

impl Potential1D {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Per-interval coefficients `[c0, c1, c2]` in the local variable `y - b_i`.
    pub fn coefficients(&self) -> &[[f64; 3]] {
        &self.coeffs
    }

    fn locate(&self, y: f64) -> (usize, f64) {
        let n = self.coeffs.len();
        let i = self.breakpoints[1..n].partition_point(|&b| b <= y);
        (i, y - self.breakpoints[i])
    }

    pub fn value(&self, y: f64) -> f64 {
        let (i, s) = self.locate(y);
        let [c0, c1, c2] = self.coeffs[i];
        c0 + s * (c1 + s * c2)
    }

    pub fn derivative(&self, y: f64) -> f64 {
        let (i, s) = self.locate(y);
        let [_, c1, c2] = self.coeffs[i];
        c1 + 2.0 * c2 * s
    }

    /// `-v''` on the interval containing `y`.
    pub fn source(&self, y: f64) -> f64 {
        -2.0 * self.coeffs[self.locate(y).0][2]
    }

    fn lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }

    /// `int_0^1 v dy`, exact polynomial quadrature.
    pub fn mean(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.lengths())
            .map(|(&[c0, c1, c2], l)| l * (c0 + l * (c1 / 2.0 + l * c2 / 3.0)))
            .sum()
    }

    /// `int_0^1 v'^2 dy`, exact polynomial quadrature.
    pub fn dirichlet_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.lengths())
            .map(|(&[_, c1, c2], l)| l * (c1 * c1 + l * (2.0 * c1 * c2 + l * 4.0 * c2 * c2 / 3.0)))
            .sum()
    }

    /// `v'(1)`; vanishes exactly when the mass constraint holds.
    pub fn right_flux(&self) -> f64 {
        let [_, c1, c2] = *self.coeffs.last().unwrap();
        let l = self.lengths().last().unwrap();
        c1 + 2.0 * c2 * l
    }

    /// Largest jump of `v` or `v'` across an interior breakpoint.
    pub fn continuity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, l) in self.lengths().enumerate().take(self.coeffs.len() - 1) {
            let [c0, c1, c2] = self.coeffs[i];
            let next = self.coeffs[i + 1];
            worst = worst.max((c0 + c1 * l + c2 * l * l - next[0]).abs());
            worst = worst.max((c1 + 2.0 * c2 * l - next[1]).abs());
        }
        worst
    }
}
