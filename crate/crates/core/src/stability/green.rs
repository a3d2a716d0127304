use crate::core1d::lamellar_jumps;

use super::SymMatrix;

/// Below this `μ` the kernel is taken from its small-`μ` expansion.
pub const SERIES_CUTOFF: f64 = 1e-6;

/// Neumann Green's function of `-w'' + μ² w` on `(0, 1)`:
/// `cosh(μ min(s,t)) cosh(μ (1 - max(s,t))) / (μ sinh μ)`.
///
/// Written with decaying exponentials only, so it neither overflows for large `μ`
/// nor cancels for moderate `μ`.
pub fn green(mu: f64, s: f64, t: f64) -> f64 {
    let (a, b) = if s <= t { (s, t) } else { (t, s) };
    if mu < SERIES_CUTOFF {
        return 1.0 / (mu * mu) + 1.0 / 3.0 - b + 0.5 * (a * a + b * b);
    }
    let num = (-mu * (b - a)).exp()
        * (1.0 + (-2.0 * mu * a).exp())
        * (1.0 + (-2.0 * mu * (1.0 - b)).exp());
    num / (2.0 * mu * -(-2.0 * mu).exp_m1())
}

/// `G_μ` sampled at the lamellar interface positions `(2j - 1) / (2k)`.
pub fn green_matrix(k: usize, mu: f64) -> SymMatrix {
    let y = lamellar_jumps(k).expect("k >= 1");
    SymMatrix::from_fn(k, |i, j| green(mu, y[i], y[j]))
}
