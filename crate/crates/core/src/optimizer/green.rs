use std::f64::consts::PI;

use crate::poisson::GridSpec;

/// Entry budget for [`ModalGreen`] (`nx · ny²` doubles).
pub const MODAL_GREEN_MAX_ENTRIES: usize = 1 << 24;

/// Pseudo-inverse of the 2D Neumann Laplacian, stored as `nx` dense `ny x ny`
/// blocks in the cosine basis along `x`:
/// `G[(i,a),(j,b)] = Σ_p X_p(i) X_p(j) K_p(a,b)`.
pub(crate) struct ModalGreen {
    nx: usize,
    ny: usize,
    /// `X_p(i)` at `p * nx + i`.
    xmodes: Vec<f64>,
    /// `K_p(a,b)` at `(p * ny + a) * ny + b`.
    blocks: Vec<f64>,
}

fn basis(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        let c = if p == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        out.extend((0..n).map(|i| c * (PI * p as f64 * (i as f64 + 0.5) / n as f64).cos()));
    }
    out
}

fn eigenvalues(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|p| (2.0 - 2.0 * (PI * p as f64 / n as f64).cos()) / (h * h))
        .collect()
}

impl ModalGreen {
    /// `None` for 3D grids or when the blocks would exceed the entry budget.
    pub fn new(grid: &GridSpec) -> Option<Self> {
        if grid.ndim() != 2 {
            return None;
        }
        let (nx, ny) = (grid.counts()[0], grid.counts()[1]);
        if nx * ny * ny > MODAL_GREEN_MAX_ENTRIES {
            return None;
        }
        let xmodes = basis(nx);
        let ymodes = basis(ny);
        let (lx, ly) = (eigenvalues(nx, grid.h(0)), eigenvalues(ny, grid.h(1)));
        let mut blocks = vec![0.0; nx * ny * ny];
        for p in 0..nx {
            let block = &mut blocks[p * ny * ny..(p + 1) * ny * ny];
            for q in 0..ny {
                if p == 0 && q == 0 {
                    continue;
                }
                let w = 1.0 / (lx[p] + ly[q]);
                let y = &ymodes[q * ny..(q + 1) * ny];
                for a in 0..ny {
                    let ya = w * y[a];
                    for (entry, yb) in block[a * ny..(a + 1) * ny].iter_mut().zip(y) {
                        *entry += ya * yb;
                    }
                }
            }
        }
        Some(ModalGreen {
            nx,
            ny,
            xmodes,
            blocks,
        })
    }

    fn x(&self, p: usize, i: usize) -> f64 {
        self.xmodes[p * self.nx + i]
    }

    fn k(&self, p: usize, a: usize, b: usize) -> f64 {
        self.blocks[(p * self.ny + a) * self.ny + b]
    }

    /// Cosine coefficients along `x` of a vector supported on one row.
    pub fn row_coefficients(&self, d: &[f64]) -> Vec<f64> {
        (0..self.nx)
            .map(|p| (0..self.nx).map(|i| self.x(p, i) * d[i]).sum())
            .collect()
    }

    /// `G` entry between flat cells `s` and `t` (row-major, `y` fastest).
    pub fn entry(&self, s: usize, t: usize) -> f64 {
        let (si, sa) = (s / self.ny, s % self.ny);
        let (ti, tb) = (t / self.ny, t % self.ny);
        (0..self.nx)
            .map(|p| self.x(p, si) * self.x(p, ti) * self.k(p, sa, tb))
            .sum()
    }

    /// `v += G δ` for `δ = w_s e_s + w_t e_t`.
    pub fn add_pair(&self, v: &mut [f64], s: usize, ws: f64, t: usize, wt: f64) {
        let (si, sa) = (s / self.ny, s % self.ny);
        let (ti, tb) = (t / self.ny, t % self.ny);
        let cs: Vec<f64> = (0..self.nx).map(|p| ws * self.x(p, si)).collect();
        let ct: Vec<f64> = (0..self.nx).map(|p| wt * self.x(p, ti)).collect();
        self.add_rows(v, &cs, sa, &ct, tb);
    }

    /// `δᵀ G δ` for `δ` given row by row as `(row, x-coefficients)`.
    pub fn rows_form(&self, rows: &[(usize, Vec<f64>)]) -> f64 {
        let mut total = 0.0;
        for p in 0..self.nx {
            for (i, (ra, ca)) in rows.iter().enumerate() {
                if ca[p] == 0.0 {
                    continue;
                }
                let mut acc = 0.5 * ca[p] * self.k(p, *ra, *ra);
                for (rb, cb) in &rows[i + 1..] {
                    acc += cb[p] * self.k(p, *ra, *rb);
                }
                total += 2.0 * ca[p] * acc;
            }
        }
        total
    }

    /// `v += G δ` for `δ` given row by row as `(row, x-coefficients)`.
    pub fn add_many(&self, v: &mut [f64], rows: &[(usize, Vec<f64>)]) {
        let ny = self.ny;
        let mut profile = vec![0.0; ny];
        for p in 0..self.nx {
            profile.iter_mut().for_each(|x| *x = 0.0);
            let mut any = false;
            for (r, c) in rows {
                if c[p] == 0.0 {
                    continue;
                }
                any = true;
                let k = &self.blocks[(p * ny + r) * ny..(p * ny + r + 1) * ny];
                for (out, x) in profile.iter_mut().zip(k) {
                    *out += c[p] * x;
                }
            }
            if !any {
                continue;
            }
            for i in 0..self.nx {
                let xi = self.x(p, i);
                for (vv, pr) in v[i * ny..(i + 1) * ny].iter_mut().zip(&profile) {
                    *vv += xi * pr;
                }
            }
        }
    }

    /// `v += G δ` for `δ` with `x`-coefficients `c1` on row `r1` and `c2` on row `r2`.
    pub fn add_rows(&self, v: &mut [f64], c1: &[f64], r1: usize, c2: &[f64], r2: usize) {
        let ny = self.ny;
        let mut profile = vec![0.0; ny];
        for p in 0..self.nx {
            let (a, b) = (c1[p], c2[p]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let k1 = &self.blocks[(p * ny + r1) * ny..(p * ny + r1 + 1) * ny];
            let k2 = &self.blocks[(p * ny + r2) * ny..(p * ny + r2 + 1) * ny];
            for ((out, x), y) in profile.iter_mut().zip(k1).zip(k2) {
                *out = a * x + b * y;
            }
            for i in 0..self.nx {
                let xi = self.x(p, i);
                for (vv, pr) in v[i * ny..(i + 1) * ny].iter_mut().zip(&profile) {
                    *vv += xi * pr;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::PoissonSolver;

    #[test]
    fn columns_match_poisson_solves() {
        let grid = GridSpec::rect(6, 40, 0.15).unwrap();
        let g = ModalGreen::new(&grid).unwrap();
        let solver = PoissonSolver::new(&grid);
        let n = grid.cell_count();
        for j in [0, 17, 41, 239] {
            let mut rhs = vec![-1.0 / n as f64; n];
            rhs[j] += 1.0;
            let col = solver.solve_values(&rhs).unwrap();
            for i in (0..n).step_by(7) {
                assert!((g.entry(i, j) - col[i]).abs() < 1e-15, "{i} {j}");
                assert!((g.entry(j, i) - col[i]).abs() < 1e-15);
            }
        }
        let mut v = vec![0.0; n];
        g.add_pair(&mut v, 17, 2.0, 100, -2.0);
        for (i, vi) in v.iter().enumerate() {
            assert!((vi - 2.0 * (g.entry(i, 17) - g.entry(i, 100))).abs() < 1e-15);
        }
    }

    #[test]
    fn row_forms_match_entries() {
        let grid = GridSpec::rect(5, 12, 0.3).unwrap();
        let g = ModalGreen::new(&grid).unwrap();
        let d = [2.0, 0.0, -2.0, 2.0, 0.0];
        let (r1, r2) = (3, 8);
        let delta = |c: usize| {
            let (i, r) = (c / 12, c % 12);
            if r == r1 {
                d[i]
            } else if r == r2 {
                -d[i]
            } else {
                0.0
            }
        };
        let n = grid.cell_count();
        let direct: f64 = (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .map(|(s, t)| delta(s) * g.entry(s, t) * delta(t))
            .sum();
        let c = g.row_coefficients(&d);
        let minus: Vec<f64> = c.iter().map(|x| -x).collect();
        let rows = vec![(r1, c.clone()), (r2, minus.clone())];
        assert!((g.rows_form(&rows) - direct).abs() < 1e-14 * direct.abs());
        let mut v1 = vec![0.0; n];
        let mut v2 = vec![0.0; n];
        g.add_many(&mut v1, &rows);
        g.add_rows(&mut v2, &c, r1, &minus, r2);
        for (a, b) in v1.iter().zip(&v2) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
