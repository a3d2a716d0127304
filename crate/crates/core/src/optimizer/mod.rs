//! Mass-conserving simulated annealing of the grid energy and the experiments built
//! on it.

mod anneal;
mod experiments;
mod green;
mod schedule;

pub use anneal::{
    anneal, exact_delta_energy, frozen_delta_energy, l1_to_lamellar, swapped, RunReport,
};
pub use experiments::{
    cascade_experiment, default_grid, gamma_limit_experiment, majority, CascadeRow, GammaLimitRow,
    Init,
};
pub use green::MODAL_GREEN_MAX_ENTRIES;
pub use schedule::{AnnealSchedule, DeltaMode};
