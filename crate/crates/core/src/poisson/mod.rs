//! Cell-centred Neumann Poisson solver on rectangles and boxes.
//!
//! The discrete Laplacian with mirrored ghost cells is diagonalised by the
//! orthonormal DCT-II along each axis, so Neumann conditions hold exactly for the
//! discrete operator and even reflection is an exact discrete symmetry.

mod dct;
mod field;
mod grid;
mod solver;

pub use dct::CosineTransform;
pub use field::{ScalarField, SpinField};
pub use grid::GridSpec;
pub use solver::{neumann_laplacian, nonlocal_energy, solve_poisson, PoissonSolver, MEAN_TOL};
