use crate::error::{Error, Result};

/// `E_0(u_k) = k + gamma / (12 k^2)`.
pub fn lamellar_energy(k: usize, gamma: f64) -> f64 {
    k as f64 + gamma / (12.0 * (k * k) as f64)
}

/// The value of `gamma` where `u_k` and `u_{k+1}` have equal energy,
/// `12 k^2 (k+1)^2 / (2k + 1)`. `k = 0` gives the left end `0` of the first interval.
///
/// The numerator is an exact integer, so the result is correctly rounded and
/// shared bit-for-bit by both neighbouring intervals.
pub fn gamma_boundary(k: usize) -> f64 {
    let k = k as u128;
    (12 * k * k * (k + 1) * (k + 1)) as f64 / (2 * k + 1) as f64
}

/// `(gamma_1(k), gamma_2(k))`, the range of `gamma` on which `u_k` is the global
/// one-dimensional minimizer.
pub fn gamma_interval(k: usize) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    Ok((gamma_boundary(k - 1), gamma_boundary(k)))
}

/// All `k >= 1` minimizing `k + gamma / (12 k^2)`.
///
/// A single value inside an interval; both neighbours exactly at an interval
/// endpoint `gamma_2(k) = gamma_1(k+1)`. Returned in increasing order.
pub fn optimal_k(gamma: f64) -> Result<Vec<usize>> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma must be >= 0, got {gamma}"
        )));
    }
    // gamma_2(k) ~ 6 k^3, so the answer sits within a couple of steps of (gamma/6)^(1/3).
    let guess = (gamma / 6.0).cbrt().floor() as usize;
    let mut k = guess.saturating_sub(2).max(1);
    while gamma_boundary(k - 1) > gamma {
        k -= 1;
    }
    while gamma > gamma_boundary(k) {
        k += 1;
    }
    if gamma == gamma_boundary(k) {
        Ok(vec![k, k + 1])
    } else {
        Ok(vec![k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scan `k = 1..K_max`; exact ties only occur on a null set of random gammas.
    fn brute_force(gamma: f64) -> Vec<usize> {
        let k_max = (2.0 * (gamma / 6.0).cbrt()).ceil() as usize + 2;
        let energies: Vec<f64> = (1..=k_max).map(|k| lamellar_energy(k, gamma)).collect();
        let best = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        (1..=k_max)
            .filter(|&k| energies[k - 1] <= best * (1.0 + 1e-14))
            .collect()
    }

    #[test]
    fn interval_endpoints() {
        assert_eq!(gamma_interval(1).unwrap(), (0.0, 16.0));
        assert_eq!(gamma_interval(2).unwrap(), (16.0, 86.4));
        let (g1, g2) = gamma_interval(3).unwrap();
        assert_eq!(g1, 86.4);
        assert!((g2 - 1728.0 / 7.0).abs() < 1e-12);
        assert_eq!(gamma_interval(4).unwrap().0, g2);
        assert!(gamma_interval(0).is_err());
    }

    #[test]
    fn shared_endpoints_are_bitwise_equal() {
        for k in 1..=100 {
            assert_eq!(
                gamma_interval(k).unwrap().1,
                gamma_interval(k + 1).unwrap().0
            );
            let (a, b) = gamma_interval(k).unwrap();
            assert!(a < b);
        }
    }

    #[test]
    fn examples() {
        assert_eq!(optimal_k(16.0).unwrap(), vec![1, 2]);
        assert!((lamellar_energy(1, 16.0) - 7.0 / 3.0).abs() < 1e-15);
        assert!((lamellar_energy(2, 16.0) - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!(optimal_k(5.0).unwrap(), vec![1]);
        assert_eq!(optimal_k(0.0).unwrap(), vec![1]);
        assert_eq!(optimal_k(6000.0).unwrap(), vec![10]);
        assert_eq!(brute_force(6000.0), vec![10]);
        assert!(optimal_k(-1.0).is_err());
    }

    #[test]
    fn ties_at_every_endpoint() {
        for k in 1..=20 {
            assert_eq!(optimal_k(gamma_boundary(k)).unwrap(), vec![k, k + 1]);
        }
    }

    #[test]
    fn lookup_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let g: f64 = rng.gen_range(0.0..1e5);
            assert_eq!(optimal_k(g).unwrap(), brute_force(g), "gamma = {g}");
        }
    }

    #[test]
    fn staircase_is_monotone() {
        let mut last = 1;
        for i in 0..20_000 {
            let k = optimal_k(i as f64 * 0.5).unwrap()[0];
            assert!(k >= last);
            last = k;
        }
    }
}
