use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the nonlocal part of a swap's energy change is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Linearized change against a cached potential refreshed every
    /// `refresh_period` sweeps.
    Frozen,
    /// Exact change from the discrete Green function; the potential is updated
    /// after every accepted move. 2D grids with `nx · ny²` below
    /// [`MODAL_GREEN_MAX_ENTRIES`](super::MODAL_GREEN_MAX_ENTRIES) only.
    ExactGreen,
}

/// Geometric cooling schedule for [`anneal`](super::anneal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub t_initial: f64,
    pub t_final: f64,
    /// Temperature factor between stages.
    pub cooling: f64,
    pub sweeps_per_stage: usize,
    /// Sweeps between full potential recomputations in frozen mode.
    pub refresh_period: usize,
    /// Nearest-neighbour exchange proposals per cell and sweep, on top of one
    /// long-range exchange proposal per cell.
    pub local_rate: f64,
    /// Exchanges between two interface cells of opposite spin, per cell and sweep.
    pub interface_rate: f64,
    /// Proposals per sweep that cyclically rotate a random block of layers.
    pub block_moves: usize,
    pub seed: u64,
    pub delta: DeltaMode,
}

impl AnnealSchedule {
    /// `T₀ = 2ε`, `T_f = 1e-4`, cooling 0.95, 200 sweeps per stage, refresh every sweep.
    /// Each sweep also proposes `N/4` neighbour exchanges, `N/10` interface exchanges
    /// and five block rotations on an `N`-cell grid.
    pub fn default_for(eps: f64, seed: u64) -> Self {
        AnnealSchedule {
            t_initial: 2.0 * eps,
            t_final: 1e-4,
            cooling: 0.95,
            sweeps_per_stage: 200,
            refresh_period: 1,
            local_rate: 0.25,
            interface_rate: 0.1,
            block_moves: 5,
            seed,
            delta: DeltaMode::Frozen,
        }
    }

    /// Zero temperature: only strictly downhill swaps are accepted.
    pub fn quench(sweeps: usize, seed: u64) -> Self {
        AnnealSchedule {
            t_initial: 0.0,
            t_final: 0.0,
            cooling: 0.5,
            sweeps_per_stage: sweeps,
            refresh_period: 1,
            local_rate: 0.25,
            interface_rate: 0.1,
            block_moves: 5,
            seed,
            delta: DeltaMode::Frozen,
        }
    }

    pub fn with_delta(self, delta: DeltaMode) -> Self {
        AnnealSchedule { delta, ..self }
    }

    pub fn with_sweeps(self, sweeps_per_stage: usize) -> Self {
        AnnealSchedule {
            sweeps_per_stage,
            ..self
        }
    }

    pub fn with_cooling(self, cooling: f64) -> Self {
        AnnealSchedule { cooling, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.t_initial >= 0.0 && self.t_initial.is_finite()) || !(self.t_final >= 0.0) {
            return bad(format!(
                "temperatures must be >= 0, got {} and {}",
                self.t_initial, self.t_final
            ));
        }
        if self.t_final > self.t_initial {
            return bad(format!(
                "final temperature {} above initial {}",
                self.t_final, self.t_initial
            ));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.cooling
            ));
        }
        if !(self.local_rate >= 0.0 && self.local_rate.is_finite())
            || !(self.interface_rate >= 0.0 && self.interface_rate.is_finite())
        {
            return bad(format!(
                "move rates must be finite and >= 0, got {} and {}",
                self.local_rate, self.interface_rate
            ));
        }
        if self.sweeps_per_stage == 0 || self.refresh_period == 0 {
            return bad("sweeps per stage and refresh period must be positive".into());
        }
        Ok(())
    }

    /// Temperatures of the successive stages; the last one is `t_final`.
    pub fn temperatures(&self) -> Vec<f64> {
        let mut out = vec![self.t_initial];
        let mut t = self.t_initial;
        while t > self.t_final {
            t = (t * self.cooling).max(self.t_final);
            out.push(t);
        }
        out
    }

    pub fn total_sweeps(&self) -> usize {
        self.temperatures().len() * self.sweeps_per_stage
    }
}
