use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ProblemParams;

use super::{CosineTransform, GridSpec, ScalarField, SpinField};

/// Compatibility tolerance for right-hand sides, relative to `max(1, |rhs|_inf)`.
pub const MEAN_TOL: f64 = 1e-10;

/// Cached cosine transforms and inverse Laplacian eigenvalues for one grid.
#[derive(Debug, Clone)]
pub struct PoissonSolver {
    grid: GridSpec,
    transforms: Vec<CosineTransform>,
    inv_eigen: Vec<f64>,
}

fn axis_eigenvalues(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|p| (2.0 - 2.0 * (std::f64::consts::PI * p as f64 / n as f64).cos()) / (h * h))
        .collect()
}

impl PoissonSolver {
    pub fn new(grid: &GridSpec) -> Self {
        let transforms: Vec<CosineTransform> = grid
            .counts()
            .iter()
            .map(|&n| CosineTransform::new(n))
            .collect();
        let axes: Vec<Vec<f64>> = (0..grid.ndim())
            .map(|a| axis_eigenvalues(grid.counts()[a], grid.h(a)))
            .collect();
        let inv_eigen = (0..grid.cell_count())
            .map(|idx| {
                let lambda: f64 = grid
                    .coords(idx)
                    .iter()
                    .zip(&axes)
                    .map(|(&p, ev)| ev[p])
                    .sum();
                if idx == 0 {
                    0.0
                } else {
                    1.0 / lambda
                }
            })
            .collect();
        PoissonSolver {
            grid: grid.clone(),
            transforms,
            inv_eigen,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn transform(&self, data: &mut [f64], forward: bool) {
        let mut line = Vec::new();
        let mut scratch = Vec::<Complex64>::new();
        let counts = self.grid.counts();
        for (axis, t) in self.transforms.iter().enumerate() {
            let n = counts[axis];
            let stride = self.grid.stride(axis);
            let outer = data.len() / (n * stride);
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    line.clear();
                    line.extend((0..n).map(|i| data[base + i * stride]));
                    if forward {
                        t.forward(&mut line, &mut scratch);
                    } else {
                        t.inverse(&mut line, &mut scratch);
                    }
                    for (i, &v) in line.iter().enumerate() {
                        data[base + i * stride] = v;
                    }
                }
            }
        }
    }

    /// Zero-mean solution of `-Δ_h v = rhs` with homogeneous Neumann conditions.
    pub fn solve_values(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(rhs.len(), self.grid.cell_count(), "rhs does not match grid");
        let mean = rhs.iter().sum::<f64>() / rhs.len() as f64;
        let scale = rhs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if !(mean.abs() <= MEAN_TOL * scale) {
            return Err(Error::NonZeroMean { mean });
        }
        let mut data = rhs.to_vec();
        self.transform(&mut data, true);
        for (d, w) in data.iter_mut().zip(&self.inv_eigen) {
            *d *= w;
        }
        self.transform(&mut data, false);
        Ok(data)
    }

    pub fn solve(&self, rhs: &ScalarField) -> Result<ScalarField> {
        check_grid(&self.grid, rhs.grid())?;
        ScalarField::new(self.grid.clone(), self.solve_values(rhs.values())?)
    }

    /// `Σ f (-Δ_h)^{-1} g · cellvolume` for compatible `f`, `g`.
    pub fn bilinear(&self, f: &ScalarField, g: &ScalarField) -> Result<f64> {
        check_grid(&self.grid, f.grid())?;
        let v = self.solve(g)?;
        let dot: f64 = f.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
        Ok(dot * self.grid.cell_volume())
    }

    /// Potential of a spin field: solves with `u - mean(u)` after checking the mass
    /// against `params.m` to within one cell's worth.
    pub fn potential(&self, u: &SpinField, params: &ProblemParams) -> Result<ScalarField> {
        check_grid(&self.grid, u.grid())?;
        let mean = u.mean();
        let slack = 2.0 / u.spins().len() as f64 + 1e-12;
        if (mean - params.m).abs() > slack {
            return Err(Error::NonZeroMean {
                mean: mean - params.m,
            });
        }
        self.solve(&u.centered())
    }

    /// `γ ∫ |∇v|²` evaluated as `γ Σ v (u - m) · cellvolume`.
    pub fn nonlocal_energy(&self, u: &SpinField, params: &ProblemParams) -> Result<f64> {
        if params.gamma == 0.0 {
            return Ok(0.0);
        }
        let v = self.potential(u, params)?;
        let rhs = u.centered();
        let dot: f64 = v
            .values()
            .iter()
            .zip(rhs.values())
            .map(|(a, b)| a * b)
            .sum();
        Ok(params.gamma * dot * self.grid.cell_volume())
    }
}

fn check_grid(expected: &GridSpec, got: &GridSpec) -> Result<()> {
    if expected != got {
        return Err(Error::InvalidParameter(
            "field grid does not match solver grid".into(),
        ));
    }
    Ok(())
}

/// Zero-mean Neumann solution; builds a throwaway [`PoissonSolver`].
pub fn solve_poisson(rhs: &ScalarField) -> Result<ScalarField> {
    PoissonSolver::new(rhs.grid()).solve(rhs)
}

pub fn nonlocal_energy(u: &SpinField, params: &ProblemParams) -> Result<f64> {
    PoissonSolver::new(u.grid()).nonlocal_energy(u, params)
}

/// `-Δ_h v` with reflecting (homogeneous Neumann) boundary cells.
pub fn neumann_laplacian(v: &ScalarField) -> ScalarField {
    let grid = v.grid();
    let vals = v.values();
    let mut out = vec![0.0; vals.len()];
    for axis in 0..grid.ndim() {
        let n = grid.counts()[axis];
        let stride = grid.stride(axis);
        let h2 = grid.h(axis).powi(2);
        for (idx, o) in out.iter_mut().enumerate() {
            let i = (idx / stride) % n;
            let c = vals[idx];
            let mut acc = 0.0;
            if i > 0 {
                acc += c - vals[idx - stride];
            }
            if i + 1 < n {
                acc += c - vals[idx + stride];
            }
            *o += acc / h2;
        }
    }
    ScalarField::new(grid.clone(), out).expect("same grid")
}
