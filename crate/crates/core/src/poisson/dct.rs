use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Lengths up to this use the dense cosine table.
const DENSE_MAX: usize = 32;

/// Orthonormal DCT-II (`forward`) and its inverse DCT-III (`inverse`) of one length.
///
/// `X_p = c_p sum_i x_i cos(pi p (i + 1/2) / n)` with `c_0 = sqrt(1/n)`,
/// `c_p = sqrt(2/n)`. Short lengths use a dense table, longer ones an FFT of the
/// even extension of length `2n`.
#[derive(Clone)]
pub struct CosineTransform {
    n: usize,
    kind: Kind,
}

#[derive(Clone)]
enum Kind {
    Dense(Vec<f64>),
    Fft {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
        twiddle: Vec<Complex64>,
    },
}

impl fmt::Debug for CosineTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            Kind::Dense(_) => "dense",
            Kind::Fft { .. } => "fft",
        };
        f.debug_struct("CosineTransform")
            .field("n", &self.n)
            .field("kind", &kind)
            .finish()
    }
}

fn norm(n: usize, p: usize) -> f64 {
    if p == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

/// Dense basis matrix, row `p` holds mode `p` sampled at the cell centres.
pub(crate) fn cosine_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for p in 0..n {
        for i in 0..n {
            t[p * n + i] = norm(n, p) * (PI * p as f64 * (i as f64 + 0.5) / n as f64).cos();
        }
    }
    t
}

impl CosineTransform {
    pub fn new(n: usize) -> Self {
        if n <= DENSE_MAX {
            return Self::dense(n);
        }
        let mut planner = FftPlanner::new();
        let twiddle = (0..n)
            .map(|p| Complex64::from_polar(norm(n, p), -PI * p as f64 / (2 * n) as f64))
            .collect();
        CosineTransform {
            n,
            kind: Kind::Fft {
                forward: planner.plan_fft_forward(2 * n),
                inverse: planner.plan_fft_inverse(2 * n),
                twiddle,
            },
        }
    }

    /// Always use the dense `O(n^2)` table.
    pub fn dense(n: usize) -> Self {
        CosineTransform {
            n,
            kind: Kind::Dense(cosine_table(n)),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place DCT-II. `scratch` is resized as needed.
    pub fn forward(&self, data: &mut [f64], scratch: &mut Vec<Complex64>) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        match &self.kind {
            Kind::Dense(table) => {
                let x: Vec<f64> = data.to_vec();
                for (p, out) in data.iter_mut().enumerate() {
                    let row = &table[p * n..(p + 1) * n];
                    *out = row.iter().zip(&x).map(|(a, b)| a * b).sum();
                }
            }
            Kind::Fft {
                forward, twiddle, ..
            } => {
                scratch.clear();
                scratch.extend(data.iter().map(|&x| Complex64::new(x, 0.0)));
                scratch.extend(data.iter().rev().map(|&x| Complex64::new(x, 0.0)));
                forward.process(scratch);
                for p in 0..n {
                    data[p] = 0.5 * (scratch[p] * twiddle[p]).re;
                }
            }
        }
    }

    /// In-place inverse of [`forward`](Self::forward).
    pub fn inverse(&self, data: &mut [f64], scratch: &mut Vec<Complex64>) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        match &self.kind {
            Kind::Dense(table) => {
                let c: Vec<f64> = data.to_vec();
                for (i, out) in data.iter_mut().enumerate() {
                    *out = (0..n).map(|p| table[p * n + i] * c[p]).sum();
                }
            }
            Kind::Fft {
                inverse, twiddle, ..
            } => {
                scratch.clear();
                scratch.extend(data.iter().zip(twiddle).map(|(&c, w)| c * w.conj()));
                scratch.resize(2 * n, Complex64::new(0.0, 0.0));
                inverse.process(scratch);
                for i in 0..n {
                    data[i] = scratch[i].re;
                }
            }
        }
    }
}
