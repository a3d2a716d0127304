use crate::error::{Error, Result};
use crate::params::ProblemParams;

use super::{criticality_residual, energy_1d, energy_gradient_jumps, Profile1D, SOLVABILITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    /// Smallest allowed distance between jumps (and between a jump and the ends).
    pub min_gap: f64,
    /// Target for [`criticality_residual`].
    pub tolerance: f64,
    pub max_iterations: usize,
    /// First trial step of the backtracking line search.
    pub initial_step: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            min_gap: 1e-6,
            tolerance: 1e-9,
            max_iterations: 200_000,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentOutcome {
    pub profile: Profile1D,
    pub iterations: usize,
    pub residual: f64,
}

/// Largest step `alpha` along `-dir` keeping every breakpoint gap at or above `min_gap`.
fn max_step(breaks: &[f64], dir: &[f64], min_gap: f64) -> (f64, usize) {
    // breakpoints 0 and 1 are fixed: pad the direction with zeros
    let n = dir.len();
    let mut best = (f64::INFINITY, 0);
    for i in 0..=n {
        let gap = breaks[i + 1] - breaks[i];
        let d_left = if i == 0 { 0.0 } else { dir[i - 1] };
        let d_right = if i == n { 0.0 } else { dir[i] };
        // gap(alpha) = gap - alpha * (d_right - d_left)
        let closing = d_right - d_left;
        if closing > 0.0 {
            let alpha = (gap - min_gap) / closing;
            if alpha < best.0 {
                best = (alpha, i);
            }
        }
    }
    best
}

/// Projected gradient descent on the jump locations with the mass held fixed.
///
/// The number of interfaces never changes. Returns [`Error::JumpCollision`] when the
/// descent would carry two breakpoints (jumps or domain ends) within `min_gap` of
/// each other, and [`Error::NonConvergence`] when the iteration budget runs out or
/// the projected gradient vanishes away from a critical point.
pub fn minimize_jumps_local(
    u0: &Profile1D,
    params: &ProblemParams,
    opts: &DescentOptions,
) -> Result<DescentOutcome> {
    let m = params.m;
    let mass = u0.mass();
    if !((mass - m).abs() < SOLVABILITY_TOL) {
        return Err(Error::MassMismatch { mass, m });
    }
    let n = u0.jump_count();
    let collision = |interval: usize, gap: f64| Error::JumpCollision { interval, gap };
    let start_gap = u0.min_gap();
    if start_gap < opts.min_gap {
        let breaks = u0.breakpoints();
        let i = breaks
            .windows(2)
            .position(|w| w[1] - w[0] < opts.min_gap)
            .unwrap();
        return Err(collision(i, start_gap));
    }

    // Orientation of each interface; mass moves as -2 * sum_i sigma_i t_i.
    let sigma: Vec<f64> = (0..n).map(|i| u0.jump_size(i) / 2.0).collect();
    let mut u = u0.clone();
    let mut energy = energy_1d(&u, params)?;

    for iteration in 0..=opts.max_iterations {
        let residual = criticality_residual(&u, m)?;
        if residual < opts.tolerance {
            return Ok(DescentOutcome {
                profile: u,
                iterations: iteration,
                residual,
            });
        }
        if iteration == opts.max_iterations {
            return Err(Error::NonConvergence {
                iterations: iteration,
                residual,
            });
        }

        let grad = energy_gradient_jumps(&u, params)?;
        let along = grad.iter().zip(&sigma).map(|(g, s)| g * s).sum::<f64>() / n as f64;
        let dir: Vec<f64> = grad
            .iter()
            .zip(&sigma)
            .map(|(g, s)| g - along * s)
            .collect();
        let slope: f64 = dir.iter().map(|d| d * d).sum();
        if slope == 0.0 {
            return Err(Error::NonConvergence {
                iterations: iteration,
                residual,
            });
        }

        let breaks = u.breakpoints();
        let (alpha_wall, wall) = max_step(&breaks, &dir, opts.min_gap);
        let trial = |alpha: f64| -> Result<(Profile1D, f64)> {
            let mut t: Vec<f64> = u
                .jumps()
                .iter()
                .zip(&dir)
                .map(|(t, d)| t - alpha * d)
                .collect();
            // restore the mass exactly against rounding drift
            let drift = Profile1D::new(t.clone(), u.leading_value())?.mass() - m;
            for (ti, s) in t.iter_mut().zip(&sigma) {
                *ti += drift * s / (2.0 * n as f64);
            }
            let cand = u.with_jumps(t)?;
            let e = energy_1d(&cand, params)?;
            Ok((cand, e))
        };
        let armijo = |alpha: f64, e: f64| e <= energy - 1e-4 * alpha * slope;

        let mut alpha = opts.initial_step;
        if alpha >= alpha_wall {
            // The search would leave the k-jump stratum: if the energy still drops at
            // the wall the flow is heading into a collision.
            let at_wall = alpha_wall * (1.0 - 1e-9);
            if at_wall > 0.0 {
                let (_, e) = trial(at_wall)?;
                if armijo(at_wall, e) && e < energy {
                    return Err(collision(wall, opts.min_gap));
                }
            }
            alpha = alpha_wall * 0.5;
        }
        let mut accepted = None;
        while alpha > 1e-18 {
            let (cand, e) = trial(alpha)?;
            // Close to the critical point the energy decrease drops below rounding;
            // fall back to requiring a smaller residual there.
            let in_noise = (e - energy).abs() <= 8.0 * f64::EPSILON * energy.abs();
            if armijo(alpha, e) || (in_noise && criticality_residual(&cand, m)? < residual) {
                accepted = Some((cand, e));
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((cand, e)) => {
                u = cand;
                energy = e;
            }
            // no decrease possible at machine precision
            None => {
                return Err(Error::NonConvergence {
                    iterations: iteration,
                    residual,
                })
            }
        }
    }
    unreachable!()
}
