use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform cell-centred grid on `(0, L_0) x ... x (0, L_{d-1})`.
///
/// The last axis is the long `y` direction; the leading axes are the thin ones.
/// Storage is row-major: the last index varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    counts: Vec<usize>,
    lengths: Vec<f64>,
}

impl GridSpec {
    pub fn new(counts: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        if counts.len() != lengths.len() || !(2..=3).contains(&counts.len()) {
            return Err(Error::InvalidParameter(
                "grids must have 2 or 3 axes".into(),
            ));
        }
        if counts.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 cells per axis, got {counts:?}"
            )));
        }
        if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lengths must be positive, got {lengths:?}"
            )));
        }
        Ok(GridSpec { counts, lengths })
    }

    /// `nx x ny` cells on the thin rectangle `(0, eps) x (0, 1)`.
    pub fn rect(nx: usize, ny: usize, eps: f64) -> Result<Self> {
        Self::new(vec![nx, ny], vec![eps, 1.0])
    }

    /// `n x n x ny` cells on the box `(0, eps)^2 x (0, 1)`.
    pub fn thin_box(n: usize, ny: usize, eps: f64) -> Result<Self> {
        Self::new(vec![n, n, ny], vec![eps, eps, 1.0])
    }

    pub fn ndim(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn cell_count(&self) -> usize {
        self.counts.iter().product()
    }

    /// Cell size along `axis`.
    pub fn h(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.counts[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.ndim()).map(|a| self.h(a)).product()
    }

    /// Width of the first thin direction.
    pub fn eps(&self) -> f64 {
        self.lengths[0]
    }

    /// Measure of the thin cross-section, `eps^ell`.
    pub fn thin_measure(&self) -> f64 {
        self.lengths[..self.ndim() - 1].iter().product()
    }

    /// Index distance between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.counts[axis + 1..].iter().product()
    }

    pub fn ny(&self) -> usize {
        *self.counts.last().unwrap()
    }

    /// Index of the `y` row holding flat cell `idx`.
    pub fn y_index(&self, idx: usize) -> usize {
        idx % self.ny()
    }

    /// Centre of cell `i` along the long axis.
    pub fn y_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h(self.ndim() - 1)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.ndim()];
        for a in (0..self.ndim()).rev() {
            c[a] = idx % self.counts[a];
            idx /= self.counts[a];
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.counts)
            .fold(0, |acc, (&c, &n)| acc * n + c)
    }

    /// Same grid with `axis` stretched by an integer factor.
    pub fn replicated(&self, axis: usize, copies: usize) -> Self {
        let mut g = self.clone();
        g.counts[axis] *= copies;
        g.lengths[axis] *= copies as f64;
        g
    }
}
