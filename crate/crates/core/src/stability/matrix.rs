use crate::error::{Error, Result};

/// Dense square matrix, row-major; symmetric by construction in this crate's uses.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(SymMatrix { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..n * n).map(|i| f(i / n, i % n)).collect();
        SymMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Constant-diagonal symmetric tridiagonal matrix.
    pub fn tridiagonal(n: usize, diag: f64, off: f64) -> Self {
        Self::from_fn(n, |i, j| match i.abs_diff(j) {
            0 => diag,
            1 => off,
            _ => 0.0,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// `a A + b B`.
    pub fn combine(&self, a: f64, other: &SymMatrix, b: f64) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| a * x + b * y)
            .collect();
        SymMatrix { n: self.n, data }
    }

    pub fn scaled(&self, a: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|x| a * x).collect(),
        }
    }

    pub fn add_diagonal(&mut self, d: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += d;
        }
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| x[i] * (0..self.n).map(|j| self.get(i, j) * x[j]).sum::<f64>())
            .sum()
    }

    /// Largest `|A_ij - A_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// Lower Cholesky factor, or `None` when the matrix is not numerically positive
    /// definite.
    pub fn cholesky(&self) -> Option<Vec<f64>> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let d = self.get(j, j) - (0..j).map(|p| l[j * n + p] * l[j * n + p]).sum::<f64>();
            if !(d > 0.0) {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let s = self.get(i, j) - (0..j).map(|p| l[i * n + p] * l[j * n + p]).sum::<f64>();
                l[i * n + j] = s / d;
            }
        }
        Some(l)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_some()
    }

    /// All eigenvalues in ascending order by cyclic Jacobi rotation.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let asym = self.asymmetry();
        if asym > 1e-12 {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let n = self.n;
        let mut a = self.data.clone();
        // symmetrize so rotations act on an exactly symmetric matrix
        for i in 0..n {
            for j in i + 1..n {
                let m = 0.5 * (a[i * n + j] + a[j * n + i]);
                a[i * n + j] = m;
                a[j * n + i] = m;
            }
        }
        let frob: f64 = a.iter().map(|x| x * x).sum();
        for _ in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum();
            if off <= 1e-32 * frob {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for r in 0..n {
                        let arp = a[r * n + p];
                        let arq = a[r * n + q];
                        a[r * n + p] = c * arp - s * arq;
                        a[r * n + q] = s * arp + c * arq;
                    }
                    for r in 0..n {
                        let apr = a[p * n + r];
                        let aqr = a[q * n + r];
                        a[p * n + r] = c * apr - s * aqr;
                        a[q * n + r] = s * apr + c * aqr;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(form: &SymMatrix) -> Result<f64> {
    Ok(form
        .eigenvalues()?
        .first()
        .copied()
        .unwrap_or(f64::INFINITY))
}
