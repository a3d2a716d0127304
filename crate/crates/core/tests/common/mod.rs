//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use lamella::core1d::lamellar_jumps;
use lamella::poisson::{GridSpec, PoissonSolver, ScalarField};
use lamella::stability::TransverseMode;

/// Interface perturbation `f_j(x) = a_j + Σ_q c_{qj} cos(qπx/ε)`.
pub struct Perturbation {
    pub translations: Vec<f64>,
    pub modes: Vec<TransverseMode>,
}

impl Perturbation {
    fn value(&self, j: usize, x: f64, eps: f64) -> f64 {
        self.translations[j]
            + self
                .modes
                .iter()
                .map(|m| m.coeffs[j] * (m.q as f64 * std::f64::consts::PI * x / eps).cos())
                .sum::<f64>()
    }

    fn slope(&self, j: usize, x: f64, eps: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let w = m.q as f64 * std::f64::consts::PI / eps;
                -m.coeffs[j] * w * (w * x).sin()
            })
            .sum()
    }
}

/// Energy of `u_k` with interface `j` moved to `y_j + t (-1)^j f_j(x)` (0-based `j`),
/// using exact arc length for the interfaces and a volume-fraction rasterization
/// of the phase for the nonlocal term.
pub struct PerturbedEnergy {
    pub k: usize,
    pub gamma: f64,
    pub grid: GridSpec,
    solver: PoissonSolver,
    samples: usize,
}

impl PerturbedEnergy {
    pub fn new(k: usize, gamma: f64, nx: usize, ny: usize, eps: f64) -> Self {
        let grid = GridSpec::rect(nx, ny, eps).unwrap();
        let solver = PoissonSolver::new(&grid);
        PerturbedEnergy {
            k,
            gamma,
            grid,
            solver,
            samples: 8,
        }
    }

    fn interfaces(&self, f: &Perturbation, t: f64, x: f64) -> Vec<f64> {
        let eps = self.grid.eps();
        lamellar_jumps(self.k)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(j, y)| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                y + t * sign * f.value(j, x, eps)
            })
            .collect()
    }

    pub fn perimeter(&self, f: &Perturbation, t: f64) -> f64 {
        let eps = self.grid.eps();
        // composite Simpson on a smooth integrand
        let n = 4096;
        let h = eps / n as f64;
        let mut total = 0.0;
        for j in 0..self.k {
            let g = |x: f64| (1.0 + (t * f.slope(j, x, eps)).powi(2)).sqrt();
            let mut s = g(0.0) + g(eps);
            for i in 1..n {
                s += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            total += s * h / 3.0;
        }
        total
    }

    /// Cell averages of `u` (leading phase `+1`).
    pub fn phase(&self, f: &Perturbation, t: f64) -> ScalarField {
        let (nx, ny) = (self.grid.counts()[0], self.grid.ny());
        let (hx, hy) = (self.grid.h(0), self.grid.h(1));
        let mut vals = vec![0.0; nx * ny];
        for i in 0..nx {
            for s in 0..self.samples {
                let x = (i as f64 + (s as f64 + 0.5) / self.samples as f64) * hx;
                let mut bounds = vec![0.0];
                bounds.extend(self.interfaces(f, t, x));
                bounds.push(1.0);
                for (r, v) in vals[i * ny..(i + 1) * ny].iter_mut().enumerate() {
                    let (lo, hi) = (r as f64 * hy, (r + 1) as f64 * hy);
                    let mut acc = 0.0;
                    for (seg, w) in bounds.windows(2).enumerate() {
                        let overlap = (w[1].min(hi) - w[0].max(lo)).max(0.0);
                        acc += overlap * if seg % 2 == 0 { 1.0 } else { -1.0 };
                    }
                    *v += acc / hy / self.samples as f64;
                }
            }
        }
        ScalarField::new(self.grid.clone(), vals).unwrap()
    }

    pub fn nonlocal(&self, f: &Perturbation, t: f64) -> f64 {
        let mut u = self.phase(f, t);
        let mean = u.mean();
        u.values_mut().iter_mut().for_each(|v| *v -= mean);
        self.gamma * self.solver.bilinear(&u, &u).unwrap()
    }

    pub fn energy(&self, f: &Perturbation, t: f64) -> f64 {
        self.perimeter(f, t) + self.nonlocal(f, t)
    }

    /// Second difference quotient `(E(t) + E(-t) - 2E(0)) / t²`, Richardson-extrapolated
    /// from steps `t` and `t/2`.
    pub fn second_derivative(&self, f: &Perturbation, t: f64) -> f64 {
        let e0 = self.energy(f, 0.0);
        let d = |s: f64| (self.energy(f, s) + self.energy(f, -s) - 2.0 * e0) / (s * s);
        let (d1, d2) = (d(t), d(0.5 * t));
        (4.0 * d2 - d1) / 3.0
    }
}
