//! The one-dimensional limit problem on `(0, 1)`.
//!
//! Profiles are piecewise constant `+-1` functions described by their jump
//! points, and potentials are stored as exact piecewise quadratics, so every
//! quantity here is closed form up to floating point rounding.

mod descent;
mod potential;
mod profile;
mod staircase;

pub use descent::{minimize_jumps_local, DescentOptions, DescentOutcome};
pub use potential::{solve_potential_1d, Potential1D, SOLVABILITY_TOL};
pub use profile::{lamellar_jumps, lamellar_profile, Profile1D};
pub use staircase::{gamma_boundary, gamma_interval, lamellar_energy, optimal_k};

use crate::error::Result;
use crate::params::ProblemParams;

/// One-dimensional energy: number of jumps plus `gamma * int v'^2`.
pub fn energy_1d(u: &Profile1D, params: &ProblemParams) -> Result<f64> {
    let v = solve_potential_1d(u, params.m)?;
    Ok(u.jump_count() as f64 + params.gamma * v.dirichlet_energy())
}

/// Spread of the potential over the jump set, `max_j |v(t_j) - mean_j v(t_j)|`.
///
/// Zero exactly at critical points of the one-dimensional energy.
pub fn criticality_residual(u: &Profile1D, m: f64) -> Result<f64> {
    let v = solve_potential_1d(u, m)?;
    let at_jumps: Vec<f64> = u.jumps().iter().map(|&t| v.value(t)).collect();
    if at_jumps.is_empty() {
        return Ok(0.0);
    }
    let mean = at_jumps.iter().sum::<f64>() / at_jumps.len() as f64;
    Ok(at_jumps
        .iter()
        .map(|x| (x - mean).abs())
        .fold(0.0, f64::max))
}

/// Partial derivatives of the energy with respect to each jump location.
///
/// `dE/dt_i = -2 gamma v(t_i) [u](t_i)` where `[u]` is the jump `u(t+) - u(t-)`.
/// The perimeter term is locally constant and contributes nothing. When the mass
/// constraint is allowed to follow the jumps, this is the exact gradient because
/// `v` has zero mean.
pub fn energy_gradient_jumps(u: &Profile1D, params: &ProblemParams) -> Result<Vec<f64>> {
    let v = solve_potential_1d(u, params.m)?;
    Ok(u.jumps()
        .iter()
        .enumerate()
        .map(|(i, &t)| -2.0 * params.gamma * v.value(t) * u.jump_size(i))
        .collect())
}
