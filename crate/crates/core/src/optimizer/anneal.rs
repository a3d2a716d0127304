use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::core1d::{lamellar_profile, optimal_k};
use crate::energy2d::{
    l1_distance, perimeter, stripe_count, total_energy_with, EnergyBreakdown, StripeCount,
};
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::poisson::{GridSpec, PoissonSolver, SpinField};

use super::green::{ModalGreen, MODAL_GREEN_MAX_ENTRIES};
use super::{AnnealSchedule, DeltaMode};

/// Outcome of one annealing chain.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub eps: f64,
    pub gamma: f64,
    pub m: f64,
    pub grid: Vec<usize>,
    /// Exact energy of `best`.
    pub energy: EnergyBreakdown,
    /// Stripe count of `best`, `None` when it is not lamellar.
    pub stripes: Option<usize>,
    /// Smallest of the 1D-optimal stripe counts for this `γ`.
    pub predicted_k: usize,
    /// `L¹` distance from `best` to the nearer of `±u_k`, `k = predicted_k`.
    pub l1_to_uk: f64,
    pub sweeps: usize,
    pub walltime_s: f64,
    /// Fraction of accepted swaps per stage.
    pub acceptance_trace: Vec<f64>,
    /// Best exact energy after each stage.
    pub best_energy_trace: Vec<f64>,
    /// Exact energy of the chain's state after each stage.
    pub energy_trace: Vec<f64>,
    #[serde(skip)]
    pub best: SpinField,
    /// State of the chain when the schedule ended.
    #[serde(skip)]
    pub last: SpinField,
}

impl RunReport {
    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &RunReport) -> bool {
        let strip = |r: &RunReport| RunReport {
            walltime_s: 0.0,
            ..r.clone()
        };
        let (a, b) = (strip(self), strip(other));
        a.best == b.best
            && a.energy == b.energy
            && a.acceptance_trace == b.acceptance_trace
            && a.best_energy_trace == b.best_energy_trace
            && a.stripes == b.stripes
            && a.l1_to_uk == b.l1_to_uk
            && a.sweeps == b.sweeps
    }
}

/// Distance from `u` to the nearer of `±u_k`.
pub fn l1_to_lamellar(u: &SpinField, k: usize) -> Result<f64> {
    let uk = lamellar_profile(k)?;
    Ok(l1_distance(u, &uk).min(l1_distance(u, &uk.negated())))
}

fn as_option(s: StripeCount) -> Option<usize> {
    match s {
        StripeCount::Lamellar(k) => Some(k),
        StripeCount::NotLamellar => None,
    }
}

/// Neighbour table with face areas.
struct Faces {
    offsets: Vec<usize>,
    entries: Vec<(usize, f64)>,
}

impl Faces {
    fn new(grid: &GridSpec) -> Self {
        let mut offsets = vec![0];
        let mut entries = Vec::new();
        for idx in 0..grid.cell_count() {
            for axis in 0..grid.ndim() {
                let n = grid.counts()[axis];
                let stride = grid.stride(axis);
                let area = grid.cell_volume() / grid.h(axis);
                let i = (idx / stride) % n;
                if i > 0 {
                    entries.push((idx - stride, area));
                }
                if i + 1 < n {
                    entries.push((idx + stride, area));
                }
            }
            offsets.push(entries.len());
        }
        Faces { offsets, entries }
    }

    fn on_interface(&self, spins: &[i8], c: usize) -> bool {
        self.neighbours(c)
            .iter()
            .any(|&(nb, _)| spins[nb] != spins[c])
    }

    fn neighbours(&self, c: usize) -> &[(usize, f64)] {
        &self.entries[self.offsets[c]..self.offsets[c + 1]]
    }

    /// Perimeter change when cell `c` alone is flipped.
    fn flip_delta(&self, spins: &[i8], c: usize) -> f64 {
        let s = spins[c];
        self.entries[self.offsets[c]..self.offsets[c + 1]]
            .iter()
            .map(|&(nb, area)| if spins[nb] == s { area } else { -area })
            .sum()
    }

    fn swap_delta(&self, spins: &mut [i8], n: usize, p: usize) -> f64 {
        let d1 = self.flip_delta(spins, n);
        spins[n] = -spins[n];
        let d2 = self.flip_delta(spins, p);
        spins[n] = -spins[n];
        d1 + d2
    }
}

struct Chain<'a> {
    spins: Vec<i8>,
    /// Cells of each spin, `lists[0]` for `-1` and `lists[1]` for `+1`.
    lists: [Vec<usize>; 2],
    pos: Vec<usize>,
    interface: Interface,
    v: Vec<f64>,
    /// Used for self-interaction terms whenever the grid allows it.
    green: Option<ModalGreen>,
    /// Keep `v` exact after every move instead of refreshing it periodically.
    exact: bool,
    faces: Faces,
    /// `γ · cellvolume`.
    gv: f64,
    /// Area of a face normal to `y`.
    y_face: f64,
    ny: usize,
    solver: &'a PoissonSolver,
    grid: GridSpec,
    m: f64,
    params: ProblemParams,
}

fn slot(s: i8) -> usize {
    usize::from(s > 0)
}

const ABSENT: usize = usize::MAX;

/// Cells with at least one neighbour of the opposite spin, kept in one list for
/// uniform sampling and split by spin for sampling a partner.
struct Interface {
    all: Vec<usize>,
    lists: [Vec<usize>; 2],
    /// Position of each cell in `all` and in its spin's list.
    pos: Vec<(usize, usize)>,
}

fn list_insert(list: &mut Vec<usize>, c: usize) -> usize {
    list.push(c);
    list.len() - 1
}

/// Removes the entry at `i` by moving the last one there; returns the moved cell.
fn list_remove(list: &mut Vec<usize>, i: usize) -> Option<usize> {
    list.swap_remove(i);
    list.get(i).copied()
}

impl Interface {
    fn new(spins: &[i8], faces: &Faces) -> Self {
        let mut set = Interface {
            all: Vec::new(),
            lists: [Vec::new(), Vec::new()],
            pos: vec![(ABSENT, ABSENT); spins.len()],
        };
        for c in 0..spins.len() {
            if faces.on_interface(spins, c) {
                set.insert(c, spins[c]);
            }
        }
        set
    }

    fn insert(&mut self, c: usize, s: i8) {
        self.pos[c] = (
            list_insert(&mut self.all, c),
            list_insert(&mut self.lists[slot(s)], c),
        );
    }

    fn remove(&mut self, c: usize, s: i8) {
        let (ia, is) = self.pos[c];
        if let Some(moved) = list_remove(&mut self.all, ia) {
            self.pos[moved].0 = ia;
        }
        if let Some(moved) = list_remove(&mut self.lists[slot(s)], is) {
            self.pos[moved].1 = is;
        }
        self.pos[c] = (ABSENT, ABSENT);
    }

    fn contains(&self, c: usize) -> bool {
        self.pos[c].0 != ABSENT
    }

    /// Cells whose membership can change when `n` and `p` flip.
    fn affected(faces: &Faces, n: usize, p: usize) -> Vec<usize> {
        let mut cells = vec![n, p];
        cells.extend(faces.neighbours(n).iter().map(|&(c, _)| c));
        cells.extend(faces.neighbours(p).iter().map(|&(c, _)| c));
        cells.sort_unstable();
        cells.dedup();
        cells
    }

    /// Resynchronise membership of `cells`; `old` gives each cell's spin before the change.
    fn update(&mut self, spins: &[i8], faces: &Faces, cells: &[usize], old: impl Fn(usize) -> i8) {
        for &c in cells {
            if self.contains(c) {
                self.remove(c, old(c));
            }
            if faces.on_interface(spins, c) {
                self.insert(c, spins[c]);
            }
        }
    }
}

impl<'a> Chain<'a> {
    fn new(
        init: &SpinField,
        params: &ProblemParams,
        solver: &'a PoissonSolver,
        mode: DeltaMode,
    ) -> Result<Self> {
        let grid = init.grid().clone();
        let spins = init.spins().to_vec();
        let mut lists = [Vec::new(), Vec::new()];
        let mut pos = vec![0; spins.len()];
        for (c, &s) in spins.iter().enumerate() {
            pos[c] = lists[slot(s)].len();
            lists[slot(s)].push(c);
        }
        let green = ModalGreen::new(&grid);
        let exact = mode == DeltaMode::ExactGreen;
        if exact && green.is_none() {
            return Err(Error::InvalidParameter(format!(
                "exact deltas need a 2D grid with nx * ny^2 <= {MODAL_GREEN_MAX_ENTRIES}"
            )));
        }
        let ny = grid.ny();
        let faces = Faces::new(&grid);
        let mut chain = Chain {
            spins,
            lists,
            pos,
            interface: Interface::new(init.spins(), &faces),
            v: Vec::new(),
            green,
            exact,
            faces,
            gv: params.gamma * grid.cell_volume(),
            y_face: grid.cell_volume() / grid.h(grid.ndim() - 1),
            ny,
            solver,
            grid,
            m: init.target_mass(),
            params: *params,
        };
        chain.refresh()?;
        Ok(chain)
    }

    fn field(&self) -> SpinField {
        SpinField::from_parts_unchecked(self.grid.clone(), self.spins.clone(), self.m)
    }

    fn refresh(&mut self) -> Result<()> {
        self.v = self
            .solver
            .potential(&self.field(), &self.params)?
            .into_values();
        Ok(())
    }

    /// Energy change of turning `n` from `-1` to `+1` and `p` from `+1` to `-1`.
    fn swap_delta(&mut self, n: usize, p: usize) -> f64 {
        let dp = self.faces.swap_delta(&mut self.spins, n, p);
        let mut dn = 4.0 * self.gv * (self.v[n] - self.v[p]);
        if let Some(g) = &self.green {
            dn += 4.0 * self.gv * (g.entry(n, n) + g.entry(p, p) - 2.0 * g.entry(n, p));
        }
        dp + dn
    }

    fn relist(&mut self, n: usize, p: usize) {
        self.spins[n] = 1;
        self.spins[p] = -1;
        let (pn, pp) = (self.pos[n], self.pos[p]);
        self.lists[0][pn] = p;
        self.lists[1][pp] = n;
        self.pos[n] = pp;
        self.pos[p] = pn;
        let cells = Interface::affected(&self.faces, n, p);
        self.interface
            .update(&self.spins, &self.faces, &cells, |c| {
                if c == n {
                    -1
                } else if c == p {
                    1
                } else {
                    self.spins[c]
                }
            });
    }

    /// Interface sizes `(minus, plus)` after swapping `n` (now `-1`) and `p` (now `+1`),
    /// or `None` if either of them would leave the interface.
    fn interface_after(&mut self, n: usize, p: usize) -> Option<(usize, usize)> {
        let mut sizes = [self.interface.lists[0].len(), self.interface.lists[1].len()];
        self.spins[n] = 1;
        self.spins[p] = -1;
        let mut keeps = true;
        for c in Interface::affected(&self.faces, n, p) {
            let old = if c == n {
                -1
            } else if c == p {
                1
            } else {
                self.spins[c]
            };
            if self.interface.contains(c) {
                sizes[slot(old)] -= 1;
            }
            if self.faces.on_interface(&self.spins, c) {
                sizes[slot(self.spins[c])] += 1;
            } else if c == n || c == p {
                keeps = false;
            }
        }
        self.spins[n] = -1;
        self.spins[p] = 1;
        keeps.then_some((sizes[0], sizes[1]))
    }

    fn apply_swap(&mut self, n: usize, p: usize) {
        self.relist(n, p);
        if let (true, Some(g)) = (self.exact, &self.green) {
            g.add_pair(&mut self.v, n, 2.0, p, -2.0);
        }
    }

    /// Mismatched `y` faces between the contents of layers `r` and `q`.
    fn mismatch(&self, r: usize, q: usize) -> i64 {
        let ny = self.ny;
        (0..self.spins.len() / ny)
            .filter(|c| self.spins[c * ny + r] != self.spins[c * ny + q])
            .count() as i64
    }

    /// Per-layer change `(row, new - old)` when layers `a..b` are rotated by `shift`,
    /// so that layer `a + i` receives the old layer `a + (i + shift) % (b - a)`.
    fn rotation_difference(&self, a: usize, b: usize, shift: usize) -> Vec<(usize, Vec<f64>)> {
        let ny = self.ny;
        let len = b - a;
        (0..len)
            .filter_map(|i| {
                let (dst, src) = (a + i, a + (i + shift) % len);
                let d: Vec<f64> = (0..self.spins.len() / ny)
                    .map(|c| (self.spins[c * ny + src] - self.spins[c * ny + dst]) as f64)
                    .collect();
                d.iter().any(|&x| x != 0.0).then_some((dst, d))
            })
            .collect()
    }

    /// Perimeter change of rotating layers `a..b` by `shift`: only the faces at the
    /// block ends and at the seam change.
    fn rotation_perimeter(&self, a: usize, b: usize, shift: usize) -> f64 {
        let cut = a + shift;
        let mut changed = self.mismatch(b - 1, a) - self.mismatch(cut - 1, cut);
        if a > 0 {
            changed += self.mismatch(a - 1, cut) - self.mismatch(a - 1, a);
        }
        if b < self.ny {
            changed += self.mismatch(cut - 1, b) - self.mismatch(b - 1, b);
        }
        changed as f64 * self.y_face
    }

    fn rows_linear(&self, rows: &[(usize, Vec<f64>)]) -> f64 {
        let ny = self.ny;
        rows.iter()
            .map(|(r, d)| {
                d.iter()
                    .enumerate()
                    .map(|(c, dc)| dc * self.v[c * ny + r])
                    .sum::<f64>()
            })
            .sum()
    }

    fn apply_rows(&mut self, rows: &[(usize, Vec<f64>)]) {
        let ny = self.ny;
        let mut gained = Vec::new();
        let mut lost = Vec::new();
        for (r, d) in rows {
            for (c, &dc) in d.iter().enumerate() {
                if dc > 0.0 {
                    gained.push(c * ny + r);
                } else if dc < 0.0 {
                    lost.push(c * ny + r);
                }
            }
        }
        debug_assert_eq!(gained.len(), lost.len());
        for (&n, &p) in gained.iter().zip(&lost) {
            self.relist(n, p);
        }
        if let (true, Some(g)) = (self.exact, &self.green) {
            let coeffs: Vec<(usize, Vec<f64>)> = rows
                .iter()
                .map(|(r, d)| (*r, g.row_coefficients(d)))
                .collect();
            g.add_many(&mut self.v, &coeffs);
        }
    }
}

/// Metropolis annealing with mass-conserving spin exchanges.
///
/// A sweep makes one long-range proposal per cell (a uniformly random cell, then a
/// uniformly random cell of the opposite spin), followed by the neighbour, interface
/// and block-rotation proposals configured in `sched`. Every proposal kind is
/// symmetric or Hastings-corrected and commutes with flipping all spins. Perimeter
/// changes are exact. The nonlocal change is linearized against the cached potential
/// plus, when the grid is small enough for a modal Green table, the exact self-interaction of
/// the move; `sched.delta` decides whether the potential is kept exact or refreshed
/// periodically. The best field is tracked at stage boundaries using exact energies.
pub fn anneal(
    init: &SpinField,
    params: &ProblemParams,
    sched: &AnnealSchedule,
) -> Result<RunReport> {
    sched.validate()?;
    params.validate()?;
    let start = Instant::now();
    let solver = PoissonSolver::new(init.grid());
    let mut chain = Chain::new(init, params, &solver, sched.delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sched.seed);
    let n_cells = chain.spins.len();
    let local_moves = (sched.local_rate * n_cells as f64).round() as usize;
    let interface_moves = (sched.interface_rate * n_cells as f64).round() as usize;
    let mut best = init.clone();
    let mut best_energy = total_energy_with(&solver, init, params)?;
    let mut acceptance_trace = Vec::new();
    let mut best_energy_trace = Vec::new();
    let mut energy_trace = Vec::new();
    let mut sweeps = 0;
    let movable = !chain.lists[0].is_empty() && !chain.lists[1].is_empty();
    for t in sched.temperatures() {
        let mut accepted = 0usize;
        for _ in 0..sched.sweeps_per_stage {
            if movable {
                for _ in 0..n_cells {
                    let c1 = rng.gen_range(0..n_cells);
                    let other = &chain.lists[1 - slot(chain.spins[c1])];
                    let c2 = other[rng.gen_range(0..other.len())];
                    let (n, p) = if chain.spins[c1] > 0 {
                        (c2, c1)
                    } else {
                        (c1, c2)
                    };
                    let de = chain.swap_delta(n, p);
                    let r: f64 = rng.gen();
                    if de < 0.0 || (t > 0.0 && r < (-de / t).exp()) {
                        chain.apply_swap(n, p);
                        accepted += 1;
                    }
                }
                for _ in 0..local_moves {
                    let c1 = rng.gen_range(0..n_cells);
                    let nbs = chain.faces.neighbours(c1);
                    let c2 = nbs[rng.gen_range(0..nbs.len())].0;
                    let r: f64 = rng.gen();
                    if chain.spins[c1] == chain.spins[c2] {
                        continue;
                    }
                    let (n, p) = if chain.spins[c1] > 0 {
                        (c2, c1)
                    } else {
                        (c1, c2)
                    };
                    let de = chain.swap_delta(n, p);
                    if de < 0.0 || (t > 0.0 && r < (-de / t).exp()) {
                        chain.apply_swap(n, p);
                        accepted += 1;
                    }
                }
                for _ in 0..interface_moves {
                    let iface = &chain.interface;
                    let (minus, plus) = (iface.lists[0].len(), iface.lists[1].len());
                    if minus == 0 || plus == 0 {
                        continue;
                    }
                    let c1 = iface.all[rng.gen_range(0..iface.all.len())];
                    let others = &iface.lists[1 - slot(chain.spins[c1])];
                    let c2 = others[rng.gen_range(0..others.len())];
                    let r: f64 = rng.gen();
                    let (n, p) = if chain.spins[c1] > 0 {
                        (c2, c1)
                    } else {
                        (c1, c2)
                    };
                    // the pair is proposed with probability 1 / (minus * plus) in either
                    // direction, so the Hastings factor is the ratio of interface products
                    let Some((minus2, plus2)) = chain.interface_after(n, p) else {
                        continue;
                    };
                    let de = chain.swap_delta(n, p);
                    let accept = if t > 0.0 {
                        r < (-de / t).exp() * (minus * plus) as f64 / (minus2 * plus2) as f64
                    } else {
                        de < 0.0
                    };
                    if accept {
                        chain.apply_swap(n, p);
                        accepted += 1;
                    }
                }
                for _ in 0..sched.block_moves {
                    let x = rng.gen_range(0..=chain.ny);
                    let y = rng.gen_range(0..=chain.ny);
                    let (a, b) = (x.min(y), x.max(y));
                    let r: f64 = rng.gen();
                    if b - a < 2 {
                        continue;
                    }
                    let shift = rng.gen_range(1..b - a);
                    let rows = chain.rotation_difference(a, b, shift);
                    if rows.is_empty() {
                        continue;
                    }
                    // the self-interaction term is nonnegative, so this bound decides
                    // most rejections without it
                    let lower = chain.rotation_perimeter(a, b, shift)
                        + 2.0 * chain.gv * chain.rows_linear(&rows);
                    if lower >= 0.0 && !(t > 0.0 && r < (-lower / t).exp()) {
                        continue;
                    }
                    let de = match &chain.green {
                        Some(g) => {
                            let coeffs: Vec<(usize, Vec<f64>)> = rows
                                .iter()
                                .map(|(row, d)| (*row, g.row_coefficients(d)))
                                .collect();
                            lower + chain.gv * g.rows_form(&coeffs)
                        }
                        None => lower,
                    };
                    if de < 0.0 || (t > 0.0 && r < (-de / t).exp()) {
                        chain.apply_rows(&rows);
                        accepted += 1;
                    }
                }
            }
            sweeps += 1;
            if !chain.exact && sweeps % sched.refresh_period == 0 {
                chain.refresh()?;
            }
        }
        chain.refresh()?;
        let field = chain.field();
        let e = total_energy_with(&solver, &field, params)?;
        energy_trace.push(e.total);
        if e.total < best_energy.total {
            best = field;
            best_energy = e;
        }
        acceptance_trace.push(
            accepted as f64
                / ((n_cells + local_moves + interface_moves + sched.block_moves)
                    * sched.sweeps_per_stage) as f64,
        );
        best_energy_trace.push(best_energy.total);
    }
    let predicted_k = optimal_k(params.gamma)?[0];
    Ok(RunReport {
        seed: sched.seed,
        eps: params.eps,
        gamma: params.gamma,
        m: params.m,
        grid: best.grid().counts().to_vec(),
        energy: best_energy,
        stripes: as_option(stripe_count(&best)),
        predicted_k,
        l1_to_uk: l1_to_lamellar(&best, predicted_k)?,
        sweeps,
        walltime_s: start.elapsed().as_secs_f64(),
        acceptance_trace,
        best_energy_trace,
        energy_trace,
        best,
        last: chain.field(),
    })
}

fn check_swap(u: &SpinField, a: usize, b: usize) -> Result<(usize, usize)> {
    let s = u.spins();
    if a >= s.len() || b >= s.len() {
        return Err(Error::InvalidParameter(format!(
            "cell index out of range: ({a}, {b})"
        )));
    }
    match (s[a], s[b]) {
        (x, y) if x == y => Err(Error::SameSpin(a, b)),
        (-1, _) => Ok((a, b)),
        _ => Ok((b, a)),
    }
}

/// The field after exchanging the spins of cells `a` and `b`.
pub fn swapped(u: &SpinField, a: usize, b: usize) -> Result<SpinField> {
    let (n, p) = check_swap(u, a, b)?;
    let mut spins = u.spins().to_vec();
    spins[n] = 1;
    spins[p] = -1;
    Ok(SpinField::from_parts_unchecked(
        u.grid().clone(),
        spins,
        u.target_mass(),
    ))
}

/// `E(after) - E(before)` from two full energy evaluations.
pub fn exact_delta_energy(
    u: &SpinField,
    swap: (usize, usize),
    params: &ProblemParams,
) -> Result<f64> {
    let solver = PoissonSolver::new(u.grid());
    let after = swapped(u, swap.0, swap.1)?;
    Ok(total_energy_with(&solver, &after, params)?.total
        - total_energy_with(&solver, u, params)?.total)
}

/// Energy change predicted from the potential `v` of `u` without re-solving:
/// exact perimeter change plus `4γ·cellvolume·(v(cell₋) - v(cell₊))`.
pub fn frozen_delta_energy(
    u: &SpinField,
    v: &[f64],
    swap: (usize, usize),
    params: &ProblemParams,
) -> Result<f64> {
    let (n, p) = check_swap(u, swap.0, swap.1)?;
    let after = swapped(u, n, p)?;
    let dp = perimeter(&after) - perimeter(u);
    Ok(dp + 4.0 * params.gamma * u.grid().cell_volume() * (v[n] - v[p]))
}
