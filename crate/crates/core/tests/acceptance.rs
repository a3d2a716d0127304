//! Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test --release -p lamella --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use common::{Perturbation, PerturbedEnergy};
use lamella::core1d::{energy_1d, gamma_boundary, lamellar_profile, optimal_k};
use lamella::energy2d::{reflect_even, total_energy};
use lamella::optimizer::{
    anneal, cascade_experiment, gamma_limit_experiment, majority, AnnealSchedule, Init,
};
use lamella::poisson::{
    neumann_laplacian, nonlocal_energy, GridSpec, PoissonSolver, ScalarField, SpinField,
};
use lamella::stability::{
    epsilon_star, paper_bound, second_variation_value, zero_mode_form, TransverseMode,
};
use lamella::{Error, ProblemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a / b - 1.0).abs()
    }
}

fn closed_form_energy() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=50 {
        let u = lamellar_profile(k).map_err(|e| e.to_string())?;
        for gamma in [0.0, 1.0, 1000.0] {
            let e = energy_1d(&u, &ProblemParams::one_d(gamma, 0.0).unwrap())
                .map_err(|e| e.to_string())?;
            worst = worst.max(rel(e, k as f64 + gamma / (12.0 * (k * k) as f64)));
        }
    }
    let msg = format!("max relative error {worst:.2e} (tol 1e-12)");
    if worst < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Argmin of `k + γ/(12k²)` by scanning every `k` up to well past the minimum.
fn brute_argmin(gamma: f64) -> usize {
    let limit = 2 * ((gamma / 6.0).cbrt().ceil() as usize) + 4;
    (1..=limit)
        .min_by(|&a, &b| {
            let e = |k: usize| k as f64 + gamma / (12.0 * (k * k) as f64);
            e(a).total_cmp(&e(b))
        })
        .unwrap()
}

fn staircase() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let gamma: f64 = rng.gen_range(0.0..1e5);
        let got = optimal_k(gamma).map_err(|e| e.to_string())?;
        if got != [brute_argmin(gamma)] {
            return Err(format!(
                "γ = {gamma}: got {got:?}, brute force {}",
                brute_argmin(gamma)
            ));
        }
    }
    for k in 1..=20i128 {
        // with γ = num/den, E(j)·12·den·j² = 12·den·j³ + num; cross-multiply to compare
        let (num, den) = (12 * k * k * (k + 1) * (k + 1), 2 * k + 1);
        let scaled = |j: i128| (12 * den * j * j * j + num, 12 * den * j * j);
        let ((a, b), (c, d)) = (scaled(k), scaled(k + 1));
        if a * d != c * b {
            return Err(format!("rational oracle finds no tie at k = {k}"));
        }
        let gamma = gamma_boundary(k as usize);
        if gamma != num as f64 / den as f64 {
            return Err(format!("boundary {k}: {gamma} vs {num}/{den}"));
        }
        let got = optimal_k(gamma).map_err(|e| e.to_string())?;
        if got != [k as usize, k as usize + 1] {
            return Err(format!("tie at k = {k} reported as {got:?}"));
        }
    }
    Ok("1000 random γ match brute force; ties detected for k = 1..20".into())
}

fn cascade_scaling() -> Outcome {
    let mut seen = Vec::new();
    for k in [2usize, 5, 10, 20] {
        let got = optimal_k(6.0 * (k * k * k) as f64).map_err(|e| e.to_string())?;
        if !got.iter().any(|&g| g + 1 >= k && g <= k + 1) {
            return Err(format!("γ = 6·{k}³ gives {got:?}"));
        }
        seen.push(format!("{k}→{got:?}"));
    }
    Ok(seen.join(", "))
}

fn eigenvalue_formula() -> Outcome {
    let params = ProblemParams::rect(1.0, 0.1).unwrap();
    let mut worst = 0.0f64;
    for k in 2..=64 {
        let form = zero_mode_form(k, &params).map_err(|e| e.to_string())?;
        let mut got = form.matrix.eigenvalues().map_err(|e| e.to_string())?;
        got.sort_by(f64::total_cmp);
        let mut want: Vec<f64> = (1..k)
            .map(|j| 2.0 + 2.0 * (j as f64 * PI / k as f64).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    let msg = format!("max abs error {worst:.2e} over k = 2..64 (tol 1e-12)");
    if worst < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn bound_domination() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut found, mut beyond) = (0, 0);
    for _ in 0..50 {
        let k = rng.gen_range(1..=8);
        let gamma = rng.gen_range(1.0..1e4);
        let bound = paper_bound(k, gamma);
        match epsilon_star(k, gamma) {
            Ok(star) if star >= bound => found += 1,
            Ok(star) => {
                return Err(format!(
                    "k = {k}, γ = {gamma}: ε* = {star} below bound {bound}"
                ))
            }
            Err(Error::BracketFailure { .. }) => beyond += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(format!(
        "{found} thresholds above the bound, {beyond} with no instability below 10x the bound"
    ))
}

fn second_variation() -> Outcome {
    let (k, gamma, eps) = (2, 5.0, 0.2);
    let params = ProblemParams::rect(gamma, eps).unwrap();
    let oracle = PerturbedEnergy::new(k, gamma, 64, 1024, eps);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a: f64 = rng.gen_range(-0.5..0.5);
        let mut coeffs = || vec![rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        let f = Perturbation {
            translations: vec![a, -a],
            modes: vec![
                TransverseMode {
                    q: 1,
                    coeffs: coeffs(),
                },
                TransverseMode {
                    q: 2,
                    coeffs: coeffs(),
                },
            ],
        };
        let exact = second_variation_value(k, &params, &f.translations, &f.modes)
            .map_err(|e| e.to_string())?;
        worst = worst.max(rel(oracle.second_derivative(&f, 0.02), exact));
    }
    let msg = format!(
        "max relative deviation {:.3}% over 20 perturbations (tol 2%)",
        100.0 * worst
    );
    if worst < 0.02 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn poisson_exactness() -> Outcome {
    let grid = GridSpec::rect(8, 240, 0.05).unwrap();
    let (nx, ny) = (8.0, 240.0);
    let rhs = ScalarField::from_fn(grid.clone(), |x| {
        // cell-centre cosines are exact eigenvectors of the discrete Neumann Laplacian
        let (i, j) = (x[0] / 0.05 * nx, x[1] * ny);
        (PI * 3.0 * i / nx).cos() * (PI * 7.0 * j / ny).cos() + 0.5 * (PI * 2.0 * j / ny).cos()
    });
    let v = PoissonSolver::new(&grid)
        .solve(&rhs)
        .map_err(|e| e.to_string())?;
    let lap = neumann_laplacian(&v);
    let residual = lap
        .values()
        .iter()
        .zip(rhs.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mean = v.mean().abs();
    if residual > 1e-10 || mean > 1e-12 {
        return Err(format!("residual {residual:.2e}, mean {mean:.2e}"));
    }
    let (gamma, eps) = (100.0, 0.05);
    let params = ProblemParams::rect(gamma, eps).unwrap();
    let mut worst = 0.0f64;
    for k in 1..=4 {
        let u = SpinField::from_profile(grid.clone(), &lamellar_profile(k).unwrap())
            .map_err(|e| e.to_string())?;
        let e = nonlocal_energy(&u, &params).map_err(|e| e.to_string())?;
        worst = worst.max(rel(e, eps * gamma / (12.0 * (k * k) as f64)));
    }
    let msg = format!(
        "residual {residual:.2e}, mean {mean:.2e}, stripe energy max deviation {:.3}%",
        100.0 * worst
    );
    if worst < 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn reflection() -> Outcome {
    let eps = 0.15;
    let params = ProblemParams::rect(12.0, eps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u = SpinField::random(GridSpec::rect(6, 48, eps).unwrap(), 0.0, &mut rng)
            .map_err(|e| e.to_string())?;
        let e1 = total_energy(&u, &params).map_err(|e| e.to_string())?.total;
        for j in 2..=4 {
            let ej = total_energy(&reflect_even(&u, j), &params.with_eps(eps * j as f64))
                .map_err(|e| e.to_string())?
                .total;
            worst = worst.max(rel(ej, j as f64 * e1));
        }
    }
    let msg = format!("max relative error {worst:.2e} (tol 1e-10)");
    if worst < 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn desk_check() -> Outcome {
    let (gamma, eps) = (100.0, 0.05);
    let params = ProblemParams::rect(gamma, eps).unwrap();
    let grid = GridSpec::rect(8, 240, eps).unwrap();
    let target = eps * (3.0 + gamma / 108.0);
    let runs: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = (1..=5u64)
            .map(|seed| {
                let (grid, params) = (grid.clone(), params);
                s.spawn(move || {
                    let u0 = Init::Random.build(grid, 0.0, seed)?;
                    anneal(&u0, &params, &AnnealSchedule::default_for(eps, seed))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let runs = runs
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let good = runs
        .iter()
        .filter(|r| r.stripes == Some(3) && rel(r.energy.total, target) < 0.03)
        .count();
    let stripes: Vec<_> = runs.iter().map(|r| r.stripes).collect();
    if 2 * good <= runs.len() {
        return Err(format!(
            "8x240, γ = 100: only {good}/5 seeds at 3 stripes within 3%, stripes {stripes:?}"
        ));
    }

    let gammas = [5.0, 50.0, 150.0, 400.0, 800.0];
    let cascade_grid = GridSpec::rect(8, 60, eps).unwrap();
    let template = ProblemParams::rect(gammas[0], eps).unwrap();
    let rows: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = gammas
            .iter()
            .map(|&g| {
                let (grid, template) = (cascade_grid.clone(), template);
                s.spawn(move || {
                    cascade_experiment(
                        &[g],
                        &template,
                        &grid,
                        &AnnealSchedule::default_for(eps, 0),
                        &[1, 2, 3],
                    )
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut observed = Vec::new();
    for rows in rows {
        let rows = rows.map_err(|e| e.to_string())?;
        let counts: Vec<_> = rows.iter().map(|r| r.stripes).collect();
        let m = majority(&counts).flatten();
        observed.push(m);
        if m.is_none_or(|k| !rows[0].predicted_k.contains(&k)) {
            return Err(format!(
                "cascade γ = {}: counts {counts:?}, predicted {:?}",
                rows[0].gamma, rows[0].predicted_k
            ));
        }
    }
    Ok(format!(
        "8x240: {good}/5 seeds at 3 stripes within 3%; cascade on 8x60 majorities {observed:?}"
    ))
}

fn gamma_limit() -> Outcome {
    let rows = gamma_limit_experiment(100.0, 0.3, &[2, 4, 8], 120, Init::Random, |e| {
        AnnealSchedule::default_for(e, 1)
    })
    .map_err(|e| e.to_string())?;
    let target = 3.0 + 100.0 / 108.0;
    let energies: Vec<f64> = rows.iter().map(|r| r.rescaled_energy).collect();
    let l1: Vec<f64> = rows.iter().map(|r| r.l1_rescaled).collect();
    let within = energies.iter().all(|&e| rel(e, target) < 0.03);
    let monotone = l1.windows(2).all(|w| w[1] <= 1.1 * w[0] + 1e-12);
    let msg = format!("rescaled energies {energies:.4?} vs {target:.4}, L1 {l1:.4?}");
    if within && monotone {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form 1D energy", closed_form_energy),
        ("staircase lookup and ties", staircase),
        ("cascade scaling", cascade_scaling),
        ("zero-mode eigenvalues", eigenvalue_formula),
        ("stability bound domination", bound_domination),
        ("second variation vs energy differences", second_variation),
        ("Poisson exactness", poisson_exactness),
        ("reflection additivity", reflection),
        ("annealing desk check", desk_check),
        ("thin-limit refinement", gamma_limit),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.1} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
