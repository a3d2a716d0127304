//! Sharp-interface energy on grids: face-count perimeter, nonlocal term, rescaling,
//! even reflection and lamellar classification.

use serde::{Deserialize, Serialize};

use crate::core1d::Profile1D;
use crate::error::Result;
use crate::params::ProblemParams;
use crate::poisson::{PoissonSolver, SpinField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub perimeter: f64,
    pub nonlocal: f64,
    pub total: f64,
    /// `total / eps^ell`, the energy of the field stretched to unit thickness.
    pub rescaled_total: f64,
    pub gamma: f64,
    pub m: f64,
    pub eps: f64,
}

/// Whether a field is made of flat layers normal to `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StripeCount {
    Lamellar(usize),
    NotLamellar,
}

/// Total area of interior faces separating opposite spins.
pub fn perimeter(u: &SpinField) -> f64 {
    let grid = u.grid();
    let s = u.spins();
    let mut total = 0.0;
    for axis in 0..grid.ndim() {
        let n = grid.counts()[axis];
        let stride = grid.stride(axis);
        let face = grid.cell_volume() / grid.h(axis);
        let mut count = 0usize;
        for idx in 0..s.len() {
            if (idx / stride) % n + 1 < n && s[idx] != s[idx + stride] {
                count += 1;
            }
        }
        total += count as f64 * face;
    }
    total
}

/// Perimeter plus nonlocal energy, building a solver for the field's grid.
pub fn total_energy(u: &SpinField, params: &ProblemParams) -> Result<EnergyBreakdown> {
    total_energy_with(&PoissonSolver::new(u.grid()), u, params)
}

/// As [`total_energy`] with a prebuilt solver; the solver grid must match the field.
pub fn total_energy_with(
    solver: &PoissonSolver,
    u: &SpinField,
    params: &ProblemParams,
) -> Result<EnergyBreakdown> {
    let perimeter = perimeter(u);
    let nonlocal = solver.nonlocal_energy(u, params)?;
    let total = perimeter + nonlocal;
    Ok(EnergyBreakdown {
        perimeter,
        nonlocal,
        total,
        rescaled_total: total / u.grid().thin_measure(),
        gamma: params.gamma,
        m: params.m,
        eps: params.eps,
    })
}

/// Mirrors `u` across the far `x` face `copies - 1` times.
pub fn reflect_even(u: &SpinField, copies: usize) -> SpinField {
    reflect_even_axis(u, 0, copies)
}

/// Even reflection along any axis; copy `c` is mirrored when `c` is odd.
pub fn reflect_even_axis(u: &SpinField, axis: usize, copies: usize) -> SpinField {
    assert!(copies >= 1, "copies must be positive");
    let grid = u.grid();
    let big = grid.replicated(axis, copies);
    let n = grid.counts()[axis];
    let spins = (0..big.cell_count())
        .map(|idx| {
            let mut c = big.coords(idx);
            let (copy, i) = (c[axis] / n, c[axis] % n);
            c[axis] = if copy % 2 == 0 { i } else { n - 1 - i };
            u.spins()[grid.index(&c)]
        })
        .collect();
    SpinField::new(big, spins, u.target_mass()).expect("reflection preserves the mass")
}

/// Number of sign changes along `y` when every `y` row is constant across the thin axes.
pub fn stripe_count(u: &SpinField) -> StripeCount {
    let ny = u.grid().ny();
    let s = u.spins();
    let column = &s[..ny];
    if s.chunks(ny).any(|c| c != column) {
        return StripeCount::NotLamellar;
    }
    StripeCount::Lamellar(column.windows(2).filter(|w| w[0] != w[1]).count())
}

/// `∫ |u - ref|` with `ref` extended constantly across the thin axes and sampled at
/// cell centres.
pub fn l1_distance(u: &SpinField, reference: &Profile1D) -> f64 {
    let grid = u.grid();
    let ny = grid.ny();
    let r: Vec<f64> = (0..ny).map(|i| reference.value(grid.y_center(i))).collect();
    let sum: f64 = u
        .spins()
        .iter()
        .enumerate()
        .map(|(idx, &s)| (s as f64 - r[idx % ny]).abs())
        .sum();
    sum * grid.cell_volume()
}
