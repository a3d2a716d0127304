use std::fs;
use std::thread;

use lamella::core1d::{
    gamma_interval, lamellar_energy, lamellar_profile, optimal_k, solve_potential_1d,
};
use lamella::energy2d::total_energy;
use lamella::optimizer::{
    anneal, cascade_experiment, default_grid, gamma_limit_experiment, majority, AnnealSchedule,
    DeltaMode, Init, RunReport,
};
use lamella::poisson::{GridSpec, ScalarField, SpinField};
use lamella::stability::{epsilon_star, is_stable, paper_bound};
use lamella::{Error, ProblemParams};
use serde::Serialize;

use crate::args::{
    CascadeArgs, EnergyArgs, GammaLimitArgs, GridArg, InitArg, MinimizeArgs, Phase1dArgs,
    PotentialArgs, ScheduleArgs, StabilityArgs,
};
use crate::error::CliError;
use crate::output::{join, write_report, write_rows};

const DEFAULT_NY: usize = 240;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Serialize)]
pub struct PhaseRow {
    pub gamma: f64,
    pub k_opt: usize,
    pub energy: f64,
    pub gamma1_k: f64,
    pub gamma2_k: f64,
    /// Every optimal count when there is a tie, empty otherwise.
    pub tie: String,
}

pub fn phase_row(gamma: f64) -> Result<PhaseRow, CliError> {
    let ks = optimal_k(gamma)?;
    let k = ks[0];
    let (gamma1_k, gamma2_k) = gamma_interval(k)?;
    Ok(PhaseRow {
        gamma,
        k_opt: k,
        energy: lamellar_energy(k, gamma),
        gamma1_k,
        gamma2_k,
        tie: if ks.len() > 1 {
            join(&ks)
        } else {
            String::new()
        },
    })
}

pub fn phase1d(args: &Phase1dArgs) -> Result<(), CliError> {
    let gammas = match args.gamma {
        Some(g) => vec![g],
        None => {
            let (lo, hi, n) = (args.gamma_min, args.gamma_max, args.steps);
            if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
                return Err(usage(format!(
                    "need 0 <= gamma-min < gamma-max, got [{lo}, {hi}]"
                )));
            }
            if n < 2 {
                return Err(usage(format!("need at least 2 steps, got {n}")));
            }
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        }
    };
    let rows = gammas
        .into_iter()
        .map(phase_row)
        .collect::<Result<Vec<_>, _>>()?;
    write_rows(args.output.out.as_deref(), args.output.format, &rows)
}

#[derive(Debug, Serialize)]
pub struct PotentialRow {
    pub y: f64,
    pub u: f64,
    pub v: f64,
    pub dv: f64,
}

pub fn potential(args: &PotentialArgs) -> Result<(), CliError> {
    if args.k == 0 {
        return Err(usage("k must be at least 1"));
    }
    if args.samples < 2 {
        return Err(usage("need at least 2 samples"));
    }
    let u = lamellar_profile(args.k)?;
    let v = solve_potential_1d(&u, 0.0)?;
    let n = args.samples - 1;
    let rows: Vec<PotentialRow> = (0..=n)
        .map(|i| {
            let y = i as f64 / n as f64;
            PotentialRow {
                y,
                u: u.value(y),
                v: v.value(y),
                dv: v.derivative(y),
            }
        })
        .collect();
    write_rows(args.output.out.as_deref(), args.output.format, &rows)
}

#[derive(Debug, Serialize)]
pub struct StabilityRow {
    pub k: usize,
    pub gamma: f64,
    pub eps: Option<f64>,
    pub stable: Option<bool>,
    pub min_eigenvalue: Option<f64>,
    pub worst_block: Option<String>,
    pub eps_star: Option<f64>,
    pub paper_bound: Option<f64>,
    pub status: String,
}

pub fn stability_row(k: usize, gamma: f64, eps: Option<f64>) -> Result<StabilityRow, CliError> {
    if k == 0 {
        return Err(usage("k must be at least 1"));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(usage(format!("gamma must be >= 0, got {gamma}")));
    }
    let mut row = StabilityRow {
        k,
        gamma,
        eps,
        stable: None,
        min_eigenvalue: None,
        worst_block: None,
        eps_star: None,
        paper_bound: None,
        status: String::new(),
    };
    if gamma == 0.0 {
        if let Some(eps) = eps {
            ProblemParams::rect(gamma, eps)?;
        }
        row.stable = eps.map(|_| true);
        row.status = "unconditionally stable".into();
        return Ok(row);
    }
    row.paper_bound = Some(paper_bound(k, gamma));
    let threshold = match epsilon_star(k, gamma) {
        Ok(e) => {
            row.eps_star = Some(e);
            String::new()
        }
        Err(Error::BracketFailure { ceiling }) => format!("no instability below eps = {ceiling}"),
        Err(e) => return Err(e.into()),
    };
    row.status = match eps {
        Some(eps) => {
            let report = is_stable(k, &ProblemParams::rect(gamma, eps)?)?;
            row.stable = Some(report.stable);
            row.min_eigenvalue = Some(report.min_eigenvalue);
            row.worst_block = Some(report.worst_block.to_string());
            if report.stable { "stable" } else { "unstable" }.to_string()
        }
        None if threshold.is_empty() => "threshold".into(),
        None => threshold,
    };
    Ok(row)
}

pub fn stability(args: &StabilityArgs) -> Result<(), CliError> {
    let rows = if args.scan {
        let (lo, hi, n) = (args.gamma_min, args.gamma_max, args.gamma_steps);
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) || n == 0 || args.k_max == 0 {
            return Err(usage(
                "scan needs 0 < gamma-min <= gamma-max, gamma-steps >= 1 and k-max >= 1",
            ));
        }
        let gammas: Vec<f64> = if n == 1 {
            vec![lo]
        } else {
            (0..n)
                .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
                .collect()
        };
        let mut rows = Vec::new();
        for k in 1..=args.k_max {
            for &g in &gammas {
                rows.push(stability_row(k, g, None)?);
            }
        }
        rows
    } else {
        let (k, gamma) = (
            args.k.expect("required by clap"),
            args.gamma.expect("required by clap"),
        );
        vec![stability_row(k, gamma, args.eps)?]
    };
    write_rows(args.output.out.as_deref(), args.output.format, &rows)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn schedule(args: &ScheduleArgs, eps: f64, seed: u64) -> AnnealSchedule {
    let mut s = AnnealSchedule::default_for(eps, seed)
        .with_sweeps(args.sweeps)
        .with_cooling(args.cooling);
    if let Some(t0) = args.t0 {
        s.t_initial = t0;
    }
    s.t_final = args.tf;
    if args.exact {
        s = s.with_delta(DeltaMode::ExactGreen);
    }
    s
}

fn init(arg: InitArg) -> Init {
    match arg {
        InitArg::Random => Init::Random,
        InitArg::Lamellar(k) => Init::Lamellar(k),
    }
}

fn grid_for(arg: Option<&GridArg>, eps: f64) -> Result<GridSpec, CliError> {
    Ok(match arg {
        None => default_grid(eps, DEFAULT_NY)?,
        Some(GridArg(c)) if c.len() == 2 => GridSpec::rect(c[0], c[1], eps)?,
        Some(GridArg(c)) if c[0] == c[1] => GridSpec::thin_box(c[0], c[2], eps)?,
        Some(_) => return Err(usage("3D grids must have equal thin counts, NxNxNY")),
    })
}

fn warn_alignment(grid: &GridSpec, gamma: f64) -> Result<(), CliError> {
    let k = optimal_k(gamma)?[0];
    if !grid.ny().is_multiple_of(2 * k) {
        eprintln!(
            "warning: {} cells along y is not divisible by 2k = {}; u_{k} is not grid-aligned",
            grid.ny(),
            2 * k
        );
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub stripes: Option<usize>,
    pub predicted_k: usize,
    pub energy: f64,
    pub rescaled_energy: f64,
    pub l1_to_uk: f64,
    pub sweeps: usize,
    pub walltime_s: f64,
}

impl From<&RunReport> for RunSummary {
    fn from(r: &RunReport) -> Self {
        RunSummary {
            seed: r.seed,
            stripes: r.stripes,
            predicted_k: r.predicted_k,
            energy: r.energy.total,
            rescaled_energy: r.energy.rescaled_total,
            l1_to_uk: r.l1_to_uk,
            sweeps: r.sweeps,
            walltime_s: r.walltime_s,
        }
    }
}

pub fn minimize2d(args: &MinimizeArgs) -> Result<(), CliError> {
    if args.chains == 0 {
        return Err(usage("need at least one chain"));
    }
    let grid = grid_for(args.grid.as_ref(), args.eps)?;
    let params = ProblemParams::new(args.gamma, args.m, args.eps, grid.ndim() - 1)?;
    warn_alignment(&grid, args.gamma)?;
    let base = resolve_seed(args.schedule.seed);
    let seeds: Vec<u64> = (0..args.chains as u64)
        .map(|i| base.wrapping_add(i))
        .collect();
    for &seed in &seeds {
        schedule(&args.schedule, args.eps, seed).validate()?;
    }
    // chains share nothing, so each gets its own thread
    let reports = thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let (grid, params) = (grid.clone(), params);
                scope.spawn(move || {
                    let u0 = init(args.init).build(grid, params.m, seed)?;
                    anneal(&u0, &params, &schedule(&args.schedule, args.eps, seed))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("annealing thread panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    if args.chains > 1 {
        let counts: Vec<Option<usize>> = reports.iter().map(|r| r.stripes).collect();
        match majority(&counts) {
            Some(Some(k)) => eprintln!("majority stripe count: {k}"),
            _ => eprintln!("no majority stripe count"),
        }
    }
    if let Some(path) = &args.field {
        let best = reports
            .iter()
            .min_by(|a, b| a.energy.total.total_cmp(&b.energy.total))
            .expect("at least one chain");
        fs::write(path, best.best.to_text())
            .map_err(|e| CliError::Write(path.display().to_string(), e))?;
    }
    let summary: Vec<RunSummary> = reports.iter().map(RunSummary::from).collect();
    write_report(
        args.output.out.as_deref(),
        args.output.format,
        &reports,
        &summary,
    )
}

#[derive(Debug, Serialize)]
pub struct CascadeSummary {
    pub gamma: f64,
    pub seed: u64,
    pub predicted_k: String,
    pub stripes: Option<usize>,
    pub energy: f64,
    pub rescaled_energy: f64,
    pub l1_to_uk: f64,
}

pub fn cascade(args: &CascadeArgs) -> Result<(), CliError> {
    if args.chains == 0 || args.gammas.is_empty() {
        return Err(usage("need at least one chain and one gamma"));
    }
    let grid = grid_for(Some(&args.grid), args.eps)?;
    let template = ProblemParams::new(1.0, 0.0, args.eps, grid.ndim() - 1)?;
    for &g in &args.gammas {
        warn_alignment(&grid, g)?;
    }
    let base = resolve_seed(args.schedule.seed);
    let seeds: Vec<u64> = (0..args.chains as u64)
        .map(|i| base.wrapping_add(i))
        .collect();
    let rows = cascade_experiment(
        &args.gammas,
        &template,
        &grid,
        &schedule(&args.schedule, args.eps, base),
        &seeds,
    )?;
    for &g in &args.gammas {
        let counts: Vec<Option<usize>> = rows
            .iter()
            .filter(|r| r.gamma == g)
            .map(|r| r.stripes)
            .collect();
        let predicted = join(&optimal_k(g)?);
        match majority(&counts) {
            Some(Some(k)) => eprintln!("gamma {g}: predicted {predicted}, majority {k}"),
            _ => eprintln!("gamma {g}: predicted {predicted}, no majority"),
        }
    }
    let summary: Vec<CascadeSummary> = rows
        .iter()
        .map(|r| CascadeSummary {
            gamma: r.gamma,
            seed: r.seed,
            predicted_k: join(&r.predicted_k),
            stripes: r.stripes,
            energy: r.energy.total,
            rescaled_energy: r.energy.rescaled_total,
            l1_to_uk: r.l1_to_uk,
        })
        .collect();
    write_report(
        args.output.out.as_deref(),
        args.output.format,
        &rows,
        &summary,
    )
}

#[derive(Debug, Serialize)]
pub struct GammaLimitSummary {
    pub j: usize,
    pub eps: f64,
    pub nx: usize,
    pub ny: usize,
    pub stripes: Option<usize>,
    pub l1_rescaled: f64,
    pub rescaled_energy: f64,
    pub energy: f64,
}

pub fn gamma_limit(args: &GammaLimitArgs) -> Result<(), CliError> {
    if args.js.is_empty() {
        return Err(usage("need at least one j"));
    }
    let seed = resolve_seed(args.schedule.seed);
    let rows = gamma_limit_experiment(
        args.gamma,
        args.a,
        &args.js,
        args.ny,
        init(args.init),
        |eps| schedule(&args.schedule, eps, seed),
    )?;
    let summary: Vec<GammaLimitSummary> = rows
        .iter()
        .map(|r| GammaLimitSummary {
            j: r.j,
            eps: r.eps,
            nx: r.grid[0],
            ny: r.grid[1],
            stripes: r.stripes,
            l1_rescaled: r.l1_rescaled,
            rescaled_energy: r.rescaled_energy,
            energy: r.energy.total,
        })
        .collect();
    write_report(
        args.output.out.as_deref(),
        args.output.format,
        &rows,
        &summary,
    )
}

fn read_field(args: &EnergyArgs) -> Result<SpinField, CliError> {
    let text = fs::read_to_string(&args.field)
        .map_err(|e| CliError::Read(args.field.display().to_string(), e))?;
    Ok(match args.m {
        None => SpinField::from_text(&text)?,
        Some(m) => {
            let values = ScalarField::from_text(&text)?;
            let spins = values
                .values()
                .iter()
                .map(|&v| match v {
                    1.0 => Ok(1),
                    -1.0 => Ok(-1),
                    v => Err(Error::Format(format!("spin value {v} is not +-1"))),
                })
                .collect::<Result<Vec<i8>, _>>()?;
            SpinField::new(values.grid().clone(), spins, m)?
        }
    })
}

pub fn energy(args: &EnergyArgs) -> Result<(), CliError> {
    let u = read_field(args)?;
    let grid = u.grid();
    let params = ProblemParams::new(
        args.gamma,
        u.target_mass(),
        grid.lengths()[0],
        grid.ndim() - 1,
    )?;
    let e = total_energy(&u, &params)?;
    write_report(args.output.out.as_deref(), args.output.format, &e, &[e])
}
