#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons also reject NaN

//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain numbers and returns a number or a flat `Float64Array`,
//! so the page needs no glue beyond what `wasm-bindgen --target web` generates.

use lamella::core1d::{lamellar_energy, lamellar_profile, optimal_k, solve_potential_1d};
use lamella::stability::{epsilon_star, is_stable, paper_bound};
use lamella::ProblemParams;
use wasm_bindgen::prelude::*;

fn js_err(e: lamella::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[γ, k_opt, E_0(u_k)]` for `steps` values of `γ` evenly spaced on `[0, gamma_max]`.
///
/// At a tie the smaller count is reported.
#[wasm_bindgen]
pub fn staircase(gamma_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    if !(gamma_max > 0.0) || steps < 2 {
        return Err(JsError::new("need gamma_max > 0 and at least 2 steps"));
    }
    let mut out = Vec::with_capacity(3 * steps);
    for i in 0..steps {
        let gamma = gamma_max * i as f64 / (steps - 1) as f64;
        let k = optimal_k(gamma).map_err(js_err)?[0];
        out.extend([gamma, k as f64, lamellar_energy(k, gamma)]);
    }
    Ok(out)
}

/// `[y, u_k(y), v_k(y), v_k'(y)]` at `samples` evenly spaced points of `[0, 1]`.
#[wasm_bindgen]
pub fn potential_samples(k: usize, samples: usize) -> Result<Vec<f64>, JsError> {
    if samples < 2 {
        return Err(JsError::new("need at least 2 samples"));
    }
    let u = lamellar_profile(k).map_err(js_err)?;
    let v = solve_potential_1d(&u, 0.0).map_err(js_err)?;
    let n = samples - 1;
    Ok((0..=n)
        .flat_map(|i| {
            let y = i as f64 / n as f64;
            [y, u.value(y), v.value(y), v.derivative(y)]
        })
        .collect())
}

/// `[ε, smallest second-variation eigenvalue]` for `samples` widths on `[eps_min, eps_max]`.
#[wasm_bindgen]
pub fn stability_curve(
    k: usize,
    gamma: f64,
    eps_min: f64,
    eps_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    if !(eps_min > 0.0 && eps_min < eps_max) || samples < 2 {
        return Err(JsError::new(
            "need 0 < eps_min < eps_max and at least 2 samples",
        ));
    }
    let mut out = Vec::with_capacity(2 * samples);
    for i in 0..samples {
        let eps = eps_min + (eps_max - eps_min) * i as f64 / (samples - 1) as f64;
        let params = ProblemParams::rect(gamma, eps).map_err(js_err)?;
        let report = is_stable(k, &params).map_err(js_err)?;
        out.extend([eps, report.min_eigenvalue]);
    }
    Ok(out)
}

/// `[ε*, π√(k/(2γ))]`; `ε*` is `NaN` when no instability exists below ten times the bound.
#[wasm_bindgen]
pub fn stability_thresholds(k: usize, gamma: f64) -> Result<Vec<f64>, JsError> {
    let bound = paper_bound(k, gamma);
    let star = match epsilon_star(k, gamma) {
        Ok(e) => e,
        Err(lamella::Error::BracketFailure { .. }) => f64::NAN,
        Err(e) => return Err(js_err(e)),
    };
    Ok(vec![star, bound])
}
