//! Second variation of the energy at lamellar states on the thin rectangle.
//!
//! Interface perturbations `f_j(x) = a_j + Σ_q c_{qj} cos(qπx/ε)` decouple: the
//! constants `a_j` (with `Σ a_j = 0`) give the zero-mode form, and each transverse
//! mode `q` gives a `k x k` block `S_q`. The displacement `f_j` is measured along the
//! outer normal of `{u = 1}`, so interface `j` moves by `(-1)^{j+1} f_j` in `y`.

mod green;
mod matrix;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProblemParams;

pub use green::{green, green_matrix, SERIES_CUTOFF};
pub use matrix::{min_eigenvalue, SymMatrix};

/// `epsilon_star` searches up to this multiple of the sufficient bound.
pub const EPS_STAR_CEILING_FACTOR: f64 = 10.0;

/// Sufficient stability bound `π √(k / (2γ))`.
pub fn paper_bound(k: usize, gamma: f64) -> f64 {
    PI * (k as f64 / (2.0 * gamma)).sqrt()
}

/// Quadratic form on interface translations with `Σ a_j = 0`, written in partial
/// sums `α_i = a_1 + ... + a_i` as `(2γε/k) αᵀ M α`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroModeForm {
    pub k: usize,
    pub prefactor: f64,
    pub matrix: SymMatrix,
}

pub fn zero_mode_form(k: usize, params: &ProblemParams) -> Result<ZeroModeForm> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "the zero-mode form needs k >= 2".into(),
        ));
    }
    Ok(ZeroModeForm {
        k,
        prefactor: 2.0 * params.gamma * params.eps / k as f64,
        matrix: SymMatrix::tridiagonal(k - 1, 2.0, 1.0),
    })
}

fn check_zero_sum(a: &[f64]) -> Result<()> {
    let sum: f64 = a.iter().sum();
    if sum.abs() > 1e-10 {
        return Err(Error::ConstraintViolation { sum });
    }
    Ok(())
}

impl ZeroModeForm {
    /// Form value at translations `a`.
    pub fn evaluate(&self, a: &[f64]) -> Result<f64> {
        if a.len() != self.k {
            return Err(Error::InvalidParameter(format!(
                "expected {} translations, got {}",
                self.k,
                a.len()
            )));
        }
        check_zero_sum(a)?;
        let alpha: Vec<f64> = a[..self.k - 1]
            .iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        Ok(self.prefactor * self.matrix.quadratic_form(&alpha))
    }

    /// Smallest eigenvalue in partial-sum coordinates.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.prefactor * min_eigenvalue(&self.matrix)?)
    }
}

/// Block of the second variation for transverse mode `q`:
/// `S_q = (ε/2) [(μ² - 2γ/k) I + 8γ G_μ]` with `μ = qπ/ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeForm {
    pub q: usize,
    pub mu: f64,
    pub matrix: SymMatrix,
}

/// `(μ² - 2γ/k) I + 8γ G_μ`; `S_q` is this at `μ = qπ/ε` times `ε/2`.
pub fn reduced_matrix(k: usize, mu: f64, gamma: f64) -> SymMatrix {
    let mut r = green_matrix(k, mu).scaled(8.0 * gamma);
    r.add_diagonal(mu * mu - 2.0 * gamma / k as f64);
    r
}

pub fn mode_matrix(k: usize, q: usize, params: &ProblemParams) -> Result<ModeForm> {
    if k < 1 || q < 1 {
        return Err(Error::InvalidParameter(format!(
            "need k >= 1 and q >= 1, got k={k}, q={q}"
        )));
    }
    let mu = q as f64 * PI / params.eps;
    Ok(ModeForm {
        q,
        mu,
        matrix: reduced_matrix(k, mu, params.gamma).scaled(params.eps / 2.0),
    })
}

/// Which block of the second variation attains the smallest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    ZeroMode,
    Transverse(usize),
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::ZeroMode => write!(f, "zero"),
            Block::Transverse(q) => write!(f, "q{q}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub worst_block: Block,
    pub min_eigenvalue: f64,
    /// Largest transverse mode that can be indefinite.
    pub q_max: usize,
}

/// Exact linear stability of `u_k` on the rectangle of width `params.eps`.
///
/// Modes with `qπ/ε > √(2γ/k)` are positive definite, so only finitely many blocks
/// are inspected.
pub fn is_stable(k: usize, params: &ProblemParams) -> Result<StabilityReport> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(params.gamma > 0.0) {
        return Err(Error::InvalidParameter("stability needs gamma > 0".into()));
    }
    let q_max = ((params.eps / PI) * (2.0 * params.gamma / k as f64).sqrt())
        .ceil()
        .max(1.0) as usize;
    let mut worst = (Block::Transverse(1), f64::INFINITY);
    if k >= 2 {
        worst = (
            Block::ZeroMode,
            zero_mode_form(k, params)?.min_eigenvalue()?,
        );
    }
    for q in 1..=q_max {
        let lambda = min_eigenvalue(&mode_matrix(k, q, params)?.matrix)?;
        if lambda < worst.1 {
            worst = (Block::Transverse(q), lambda);
        }
    }
    Ok(StabilityReport {
        stable: worst.1 > 0.0,
        worst_block: worst.0,
        min_eigenvalue: worst.1,
        q_max,
    })
}

/// Width at which `u_k` first loses linear stability.
///
/// The sign of `S_q` depends on `ε` only through `μ = qπ/ε`, and `q = 1` reaches any
/// given `μ` at the smallest width, so `ε* = π / μ₊` where `μ₊` is the largest `μ`
/// at which `(μ² - 2γ/k) I + 8γ G_μ` is singular. That matrix is positive definite
/// for `μ ≥ √(2γ/k)`; the search scans downward from there.
pub fn epsilon_star(k: usize, gamma: f64) -> Result<f64> {
    if k < 1 || !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need k >= 1 and gamma > 0, got k={k}, gamma={gamma}"
        )));
    }
    let top = (2.0 * gamma / k as f64).sqrt();
    let bottom = top / EPS_STAR_CEILING_FACTOR;
    let steps = 4000;
    let ratio = (bottom / top).powf(1.0 / steps as f64);
    let definite = |mu: f64| reduced_matrix(k, mu, gamma).is_positive_definite();
    let mut hi = top;
    for _ in 0..steps {
        let lo = (hi * ratio).max(bottom);
        if !definite(lo) {
            let (mut lo, mut hi) = (lo, hi);
            while hi - lo > 1e-15 * hi {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if definite(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(PI / (0.5 * (lo + hi)));
        }
        hi = lo;
    }
    Err(Error::BracketFailure {
        ceiling: EPS_STAR_CEILING_FACTOR * paper_bound(k, gamma),
    })
}

/// One transverse component of an interface perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransverseMode {
    pub q: usize,
    /// Coefficient of `cos(qπx/ε)` on each interface.
    pub coeffs: Vec<f64>,
}

/// Second variation at `u_k` along `f_j = a_j + Σ c_{qj} cos(qπx/ε)`.
pub fn second_variation_value(
    k: usize,
    params: &ProblemParams,
    translations: &[f64],
    modes: &[TransverseMode],
) -> Result<f64> {
    if translations.len() != k {
        return Err(Error::InvalidParameter(format!(
            "expected {k} translations, got {}",
            translations.len()
        )));
    }
    check_zero_sum(translations)?;
    let mut value = if k >= 2 {
        zero_mode_form(k, params)?.evaluate(translations)?
    } else {
        0.0
    };
    // repeated q entries add up before the block is applied
    let mut combined: Vec<(usize, Vec<f64>)> = Vec::new();
    for m in modes {
        if m.coeffs.len() != k {
            return Err(Error::InvalidParameter(format!(
                "mode q={} has {} coefficients",
                m.q,
                m.coeffs.len()
            )));
        }
        match combined.iter_mut().find(|(q, _)| *q == m.q) {
            Some((_, c)) => c.iter_mut().zip(&m.coeffs).for_each(|(a, b)| *a += b),
            None => combined.push((m.q, m.coeffs.clone())),
        }
    }
    for (q, c) in combined {
        value += mode_matrix(k, q, params)?.matrix.quadratic_form(&c);
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(gamma: f64, eps: f64) -> ProblemParams {
        ProblemParams::rect(gamma, eps).unwrap()
    }

    #[test]
    fn zero_mode_examples() {
        let p = params(1.0, 1.0);
        assert!(zero_mode_form(1, &p).is_err());
        let f2 = zero_mode_form(2, &p).unwrap();
        assert_eq!(f2.matrix, SymMatrix::new(1, vec![2.0]).unwrap());
        assert_eq!(f2.evaluate(&[1.0, -1.0]).unwrap(), 2.0);
        let ev = zero_mode_form(3, &p).unwrap().matrix.eigenvalues().unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        assert!(matches!(
            f2.evaluate(&[1.0, -0.5]),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn k1_gamma8_examples() {
        let bound = paper_bound(1, 8.0);
        assert!((bound - PI / 4.0).abs() < 1e-15);
        assert!(is_stable(1, &params(8.0, 0.7)).unwrap().stable);
        assert!(is_stable(1, &params(8.0, bound * 1.01)).unwrap().stable);
        // with a single interface the Green term outweighs the flux term at every μ
        assert_eq!(
            epsilon_star(1, 8.0),
            Err(Error::BracketFailure {
                ceiling: 10.0 * bound
            })
        );
        for eps in [1.0, 2.0, 5.0, 7.8] {
            assert!(is_stable(1, &params(8.0, eps)).unwrap().stable);
        }
    }

    #[test]
    fn transverse_blocks_beyond_cutoff_are_definite() {
        for &(k, gamma, eps) in &[
            (1, 100.0, 2.0),
            (2, 500.0, 0.5),
            (3, 1000.0, 1.0),
            (5, 50.0, 3.0),
        ] {
            let p = params(gamma, eps);
            let q_max = is_stable(k, &p).unwrap().q_max;
            for q in [q_max + 1, q_max + 5] {
                assert!(min_eigenvalue(&mode_matrix(k, q, &p).unwrap().matrix).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn threshold_brackets_the_stability_switch() {
        for &(k, gamma) in &[
            (1, 100.0),
            (1, 5000.0),
            (2, 1000.0),
            (3, 1000.0),
            (4, 5000.0),
        ] {
            let e = epsilon_star(k, gamma).unwrap();
            assert!(e >= paper_bound(k, gamma));
            assert!(
                is_stable(k, &params(gamma, e * (1.0 - 1e-8)))
                    .unwrap()
                    .stable
            );
            assert!(
                !is_stable(k, &params(gamma, e * (1.0 + 1e-8)))
                    .unwrap()
                    .stable
            );
        }
    }

    #[test]
    fn zero_gamma_is_rejected() {
        assert!(epsilon_star(2, 0.0).is_err());
        assert!(is_stable(2, &params(0.0, 0.1)).is_err());
    }

    #[test]
    fn second_variation_decouples() {
        let p = params(5.0, 0.2);
        assert_eq!(
            second_variation_value(2, &p, &[0.0, 0.0], &[]).unwrap(),
            0.0
        );
        let a = [0.3, -0.5, 0.2];
        let direct = zero_mode_form(3, &p).unwrap().evaluate(&a).unwrap();
        assert_eq!(second_variation_value(3, &p, &a, &[]).unwrap(), direct);
        let c = vec![0.4, -0.1, 0.7];
        let m = TransverseMode {
            q: 2,
            coeffs: c.clone(),
        };
        let s2 = mode_matrix(3, 2, &p).unwrap().matrix.quadratic_form(&c);
        let both = second_variation_value(3, &p, &a, std::slice::from_ref(&m)).unwrap();
        assert!((both - direct - s2).abs() < 1e-12 * both.abs().max(1.0));
        let half = TransverseMode {
            q: 2,
            coeffs: vec![0.2, -0.05, 0.35],
        };
        let split = [half.clone(), half];
        let again = second_variation_value(3, &p, &a, &split).unwrap();
        assert!((again - both).abs() < 1e-12 * both.abs().max(1.0));
        assert!(matches!(
            second_variation_value(3, &p, &[0.3, -0.5, 0.3], &[m]),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    proptest! {
        #[test]
        fn zero_mode_matches_partial_sum_formula(k in 2usize..12, seed in prop::collection::vec(-1.0f64..1.0, 12), gamma in 0.1f64..100.0, eps in 0.01f64..2.0) {
            let mut a = seed[..k].to_vec();
            let mean = a.iter().sum::<f64>() / k as f64;
            a.iter_mut().for_each(|x| *x -= mean);
            let p = params(gamma, eps);
            let mut alpha = 0.0;
            let mut partial = 0.0;
            for x in &a[..k - 1] {
                alpha += x;
                partial += alpha * alpha;
            }
            let squares: f64 = a.iter().map(|x| x * x).sum();
            let direct = (2.0 * gamma * eps / k as f64) * (4.0 * partial - squares);
            let value = zero_mode_form(k, &p).unwrap().evaluate(&a).unwrap();
            prop_assert!((value - direct).abs() <= 1e-12 * direct.abs().max(1e-300) + 1e-15);
        }

        #[test]
        fn threshold_dominates_sufficient_bound(k in 1usize..=8, log_gamma in 0.0f64..4.0) {
            let gamma = 10f64.powf(log_gamma);
            match epsilon_star(k, gamma) {
                Ok(e) => prop_assert!(e >= paper_bound(k, gamma)),
                Err(Error::BracketFailure { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn below_sufficient_bound_is_stable(k in 1usize..=8, log_gamma in 0.0f64..4.0, frac in 0.05f64..0.999) {
            let gamma = 10f64.powf(log_gamma);
            let r = is_stable(k, &params(gamma, frac * paper_bound(k, gamma))).unwrap();
            prop_assert!(r.stable);
        }
    }
}
