mod common;

use common::{Perturbation, PerturbedEnergy};
use lamella::stability::{second_variation_value, TransverseMode};
use lamella::ProblemParams;
use rand::{Rng, SeedableRng};

#[test]
fn quadratic_form_matches_energy_differences() {
    let (k, gamma, eps) = (2, 5.0, 0.2);
    let params = ProblemParams::rect(gamma, eps).unwrap();
    let oracle = PerturbedEnergy::new(k, gamma, 64, 1024, eps);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
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
        let exact = second_variation_value(k, &params, &f.translations, &f.modes).unwrap();
        let fd = oracle.second_derivative(&f, 0.02);
        assert!(
            (fd - exact).abs() < 0.02 * exact.abs(),
            "form {exact}, energy differences {fd}"
        );
    }
}

#[test]
fn pure_translation_of_three_interfaces() {
    let (k, gamma, eps) = (3, 20.0, 0.1);
    let params = ProblemParams::rect(gamma, eps).unwrap();
    let oracle = PerturbedEnergy::new(k, gamma, 16, 1200, eps);
    let f = Perturbation {
        translations: vec![0.3, -0.5, 0.2],
        modes: vec![],
    };
    let exact = second_variation_value(k, &params, &f.translations, &f.modes).unwrap();
    let fd = oracle.second_derivative(&f, 0.04);
    assert!(
        (fd - exact).abs() < 0.02 * exact.abs(),
        "form {exact}, energy differences {fd}"
    );
}
