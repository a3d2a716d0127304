use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::core1d::Profile1D;
use crate::error::{Error, Result};

use super::GridSpec;

/// One real value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.cell_count();
        ScalarField {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Samples `f(centre)` at every cell centre.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.cell_count())
            .map(|i| {
                let x: Vec<f64> = grid
                    .coords(i)
                    .iter()
                    .enumerate()
                    .map(|(a, &c)| (c as f64 + 0.5) * grid.h(a))
                    .collect();
                f(&x)
            })
            .collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Plain-text form: header `n_0 n_1 [n_2] L_0 L_1 [L_2] m`, then the values in
    /// row-major order, one line per run of the last axis. Scalar fields carry `m = 0`.
    pub fn to_text(&self) -> String {
        write_text(
            &self.grid,
            0.0,
            self.values.iter().map(|v| format!("{v:e}")),
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (grid, _, values) = parse_text(text)?;
        Self::new(grid, values)
    }
}

fn write_text(grid: &GridSpec, m: f64, values: impl Iterator<Item = String>) -> String {
    let mut out = String::new();
    for n in grid.counts() {
        write!(out, "{n} ").unwrap();
    }
    for l in grid.lengths() {
        write!(out, "{l:e} ").unwrap();
    }
    writeln!(out, "{m:e}").unwrap();
    let ny = grid.ny();
    for (i, v) in values.enumerate() {
        out.push_str(&v);
        out.push(if (i + 1) % ny == 0 { '\n' } else { ' ' });
    }
    out
}

fn parse_text(text: &str) -> Result<(GridSpec, f64, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Format("empty field file".into()))?
        .split_whitespace()
        .collect();
    let dims = match header.len() {
        5 => 2,
        7 => 3,
        n => {
            return Err(Error::Format(format!(
                "header has {n} tokens, expected 5 or 7"
            )))
        }
    };
    let bad = |t: &str| Error::Format(format!("cannot parse header token {t:?}"));
    let counts = header[..dims]
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| bad(t)))
        .collect::<Result<Vec<_>>>()?;
    let lengths = header[dims..2 * dims]
        .iter()
        .map(|t| t.parse::<f64>().map_err(|_| bad(t)))
        .collect::<Result<Vec<_>>>()?;
    let m = header[2 * dims]
        .parse::<f64>()
        .map_err(|_| bad(header[2 * dims]))?;
    let grid = GridSpec::new(counts, lengths)?;
    let values = lines
        .flat_map(|l| l.split_whitespace())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Format(format!("cannot parse value {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != grid.cell_count() {
        return Err(Error::Format(format!(
            "expected {} values, found {}",
            grid.cell_count(),
            values.len()
        )));
    }
    Ok((grid, m, values))
}

/// `+-1` per cell with target average `m`.
///
/// The number of `+1` cells is what the optimizer conserves; the invariant is that
/// the cell average lies within one cell's worth (`2 / N`) of `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinField {
    grid: GridSpec,
    spins: Vec<i8>,
    m: f64,
}

impl SpinField {
    pub fn new(grid: GridSpec, spins: Vec<i8>, m: f64) -> Result<Self> {
        if spins.len() != grid.cell_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} spins, got {}",
                grid.cell_count(),
                spins.len()
            )));
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter("spins must be +1 or -1".into()));
        }
        if !(-1.0..=1.0).contains(&m) {
            return Err(Error::InvalidParameter(format!("mass {m} outside [-1, 1]")));
        }
        let f = SpinField { grid, spins, m };
        let slack = 2.0 / f.spins.len() as f64 + 1e-12;
        if (f.mean() - m).abs() > slack {
            return Err(Error::MassMismatch { mass: f.mean(), m });
        }
        Ok(f)
    }

    /// Spins whose target mass is their own average.
    pub fn from_spins(grid: GridSpec, spins: Vec<i8>) -> Result<Self> {
        let m = spins.iter().map(|&s| s as f64).sum::<f64>() / spins.len().max(1) as f64;
        Self::new(grid, spins, m)
    }

    /// Rasterizes a profile of `y` by sampling at cell centres; constant in the thin
    /// directions. Exact when every jump falls on a cell boundary.
    pub fn from_profile(grid: GridSpec, profile: &Profile1D) -> Result<Self> {
        let ny = grid.ny();
        let column: Vec<i8> = (0..ny)
            .map(|i| profile.value(grid.y_center(i)) as i8)
            .collect();
        let spins = (0..grid.cell_count()).map(|idx| column[idx % ny]).collect();
        Self::from_spins(grid, spins)
    }

    /// Uniformly shuffled field with `round(N (1 + m) / 2)` positive cells.
    pub fn random<R: Rng + ?Sized>(grid: GridSpec, m: f64, rng: &mut R) -> Result<Self> {
        let n = grid.cell_count();
        let plus = (n as f64 * (1.0 + m) / 2.0).round() as usize;
        let mut spins: Vec<i8> = (0..n).map(|i| if i < plus { 1 } else { -1 }).collect();
        spins.shuffle(rng);
        Self::new(grid, spins, m)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn target_mass(&self) -> f64 {
        self.m
    }

    pub fn plus_count(&self) -> usize {
        self.spins.iter().filter(|&&s| s == 1).count()
    }

    /// Cell average of `u`.
    pub fn mean(&self) -> f64 {
        self.spins.iter().map(|&s| s as i64).sum::<i64>() as f64 / self.spins.len() as f64
    }

    /// All spins flipped, target mass negated.
    pub fn negated(&self) -> Self {
        SpinField {
            grid: self.grid.clone(),
            spins: self.spins.iter().map(|s| -s).collect(),
            m: -self.m,
        }
    }

    /// `u - mean(u)`, the compatible right-hand side of the Poisson problem.
    pub fn centered(&self) -> ScalarField {
        let mean = self.mean();
        ScalarField {
            grid: self.grid.clone(),
            values: self.spins.iter().map(|&s| s as f64 - mean).collect(),
        }
    }

    pub fn to_scalar(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.spins.iter().map(|&s| s as f64).collect(),
        }
    }

    /// Same text layout as [`ScalarField::to_text`] with the target mass in the header.
    pub fn to_text(&self) -> String {
        write_text(&self.grid, self.m, self.spins.iter().map(|s| s.to_string()))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (grid, m, values) = parse_text(text)?;
        let spins = values
            .iter()
            .map(|&v| match v {
                1.0 => Ok(1),
                -1.0 => Ok(-1),
                v => Err(Error::Format(format!("spin value {v} is not +-1"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(grid, spins, m)
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, spins: Vec<i8>, m: f64) -> Self {
        SpinField { grid, spins, m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core1d::lamellar_profile;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn lamellar_rasterization_is_exact_on_aligned_grids() {
        let grid = GridSpec::rect(8, 240, 0.05).unwrap();
        for k in 1..=6 {
            let u = SpinField::from_profile(grid.clone(), &lamellar_profile(k).unwrap()).unwrap();
            assert_eq!(u.mean(), 0.0);
            assert_eq!(u.plus_count(), 960);
        }
    }

    #[test]
    fn mass_invariant_is_enforced() {
        let grid = GridSpec::rect(2, 2, 1.0).unwrap();
        assert!(SpinField::new(grid.clone(), vec![1, 1, -1, -1], 0.0).is_ok());
        assert!(SpinField::new(grid.clone(), vec![1, 1, 1, -1], 0.0).is_ok());
        assert!(SpinField::new(grid.clone(), vec![1, 1, 1, 1], 0.0).is_err());
        assert!(SpinField::new(grid.clone(), vec![1, 1, 1, 1], 1.0).is_ok());
        assert!(SpinField::new(grid, vec![1, 0, 1, -1], 0.0).is_err());
    }

    #[test]
    fn random_field_hits_exact_count() {
        let grid = GridSpec::rect(8, 160, 0.05).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u = SpinField::random(grid, 0.25, &mut rng).unwrap();
        assert_eq!(u.plus_count(), 800);
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(ScalarField::from_text("").is_err());
        assert!(ScalarField::from_text("2 2 1 1\n0 0 0 0").is_err());
        assert!(ScalarField::from_text("2 2 1 1 0\n0 0 0").is_err());
        assert!(SpinField::from_text("2 2 1 1 0\n1 -1 1 0.5").is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(seed in 0u64..1000, three in prop::bool::ANY) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let grid = if three {
                GridSpec::thin_box(3, 6, 0.3).unwrap()
            } else {
                GridSpec::rect(4, 10, 0.15).unwrap()
            };
            let u = SpinField::random(grid.clone(), 0.0, &mut rng).unwrap();
            prop_assert_eq!(SpinField::from_text(&u.to_text()).unwrap(), u.clone());
            let s = ScalarField::from_fn(grid, |x| x.iter().map(|c| (7.0 * c).sin()).sum::<f64>() + seed as f64);
            prop_assert_eq!(ScalarField::from_text(&s.to_text()).unwrap(), s);
        }
    }
}
