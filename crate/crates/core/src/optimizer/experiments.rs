use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core1d::{lamellar_profile, optimal_k};
use crate::energy2d::EnergyBreakdown;
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::poisson::{GridSpec, SpinField};
use crate::stability::paper_bound;

use super::{anneal, AnnealSchedule};

/// `max(8, round(ε·ny)) x ny` cells on `(0, ε) x (0, 1)`: roughly square cells.
pub fn default_grid(eps: f64, ny: usize) -> Result<GridSpec> {
    let nx = ((eps * ny as f64).round() as usize).max(8);
    GridSpec::rect(nx, ny, eps)
}

/// Starting field of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Shuffled spins with the prescribed mass, drawn from the chain's seed.
    Random,
    /// The lamellar field `u_k`.
    Lamellar(usize),
}

impl Init {
    pub fn build(self, grid: GridSpec, m: f64, seed: u64) -> Result<SpinField> {
        match self {
            // offset so the initial shuffle and the chain use different streams
            Init::Random => {
                SpinField::random(grid, m, &mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_1417))
            }
            Init::Lamellar(k) => SpinField::from_profile(grid, &lamellar_profile(k)?),
        }
    }
}

/// Most common value when it occurs in more than half of the entries.
pub fn majority<T: PartialEq + Copy>(values: &[T]) -> Option<T> {
    values
        .iter()
        .find(|v| 2 * values.iter().filter(|w| w == v).count() > values.len())
        .copied()
}

#[derive(Debug, Clone, Serialize)]
pub struct CascadeRow {
    pub gamma: f64,
    pub seed: u64,
    pub predicted_k: Vec<usize>,
    pub stripes: Option<usize>,
    pub energy: EnergyBreakdown,
    pub l1_to_uk: f64,
}

/// One annealing run from a random start per `(γ, seed)`.
///
/// `template` supplies `m`, `ε` and `ℓ`; `sched` everything but the seed.
pub fn cascade_experiment(
    gammas: &[f64],
    template: &ProblemParams,
    grid: &GridSpec,
    sched: &AnnealSchedule,
    seeds: &[u64],
) -> Result<Vec<CascadeRow>> {
    let mut rows = Vec::new();
    for &gamma in gammas {
        let params = template.with_gamma(gamma);
        params.validate()?;
        let predicted_k = optimal_k(gamma)?;
        for &seed in seeds {
            let init = Init::Random.build(grid.clone(), params.m, seed)?;
            let report = anneal(&init, &params, &AnnealSchedule { seed, ..*sched })?;
            rows.push(CascadeRow {
                gamma,
                seed,
                predicted_k: predicted_k.clone(),
                stripes: report.stripes,
                energy: report.energy,
                l1_to_uk: report.l1_to_uk,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaLimitRow {
    pub j: usize,
    pub eps: f64,
    pub grid: Vec<usize>,
    pub stripes: Option<usize>,
    /// `L¹` distance to the nearer of `±u_k` divided by `ε`, i.e. measured on the
    /// stretched unit square.
    pub l1_rescaled: f64,
    pub rescaled_energy: f64,
    pub energy: EnergyBreakdown,
}

/// Anneals on `(0, a/j) x (0, 1)` for each `j` and compares with `u_k`.
///
/// Requires `a < π √(k / (2γ))` with `k` the 1D-optimal stripe count.
pub fn gamma_limit_experiment(
    gamma: f64,
    a: f64,
    js: &[usize],
    ny: usize,
    init: Init,
    schedule_for: impl Fn(f64) -> AnnealSchedule,
) -> Result<Vec<GammaLimitRow>> {
    let k = optimal_k(gamma)?[0];
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(
            "the limit experiment needs gamma > 0".into(),
        ));
    }
    let bound = paper_bound(k, gamma);
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "a must be positive, got {a}"
        )));
    }
    if a >= bound {
        return Err(Error::HypothesisViolation { a, bound, k });
    }
    let mut rows = Vec::new();
    for &j in js {
        if j == 0 {
            return Err(Error::InvalidParameter("j must be positive".into()));
        }
        let eps = a / j as f64;
        let params = ProblemParams::rect(gamma, eps)?;
        let grid = default_grid(eps, ny)?;
        let sched = schedule_for(eps);
        let u0 = init.build(grid.clone(), 0.0, sched.seed)?;
        let report = anneal(&u0, &params, &sched)?;
        rows.push(GammaLimitRow {
            j,
            eps,
            grid: grid.counts().to_vec(),
            stripes: report.stripes,
            l1_rescaled: report.l1_to_uk / grid.thin_measure(),
            rescaled_energy: report.energy.rescaled_total,
            energy: report.energy,
        });
    }
    Ok(rows)
}
