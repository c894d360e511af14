//! Synthetic designs for the top-percentile regression with known
//! coefficients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::inference::{DesignMatrix, COLUMNS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogitDesignSpec {
    pub n: usize,
    /// Coefficients in column order: intercept, generalist, team size,
    /// year, career age.
    pub beta: [f64; 5],
    pub generalist_share: f64,
    pub team_size: (usize, usize),
    pub years: (i32, i32),
    pub max_career_age: f64,
    pub seed: u64,
}

impl Default for LogitDesignSpec {
    fn default() -> Self {
        Self {
            n: 50_000,
            beta: [103.5, 0.267, -0.214, -0.053, -0.004],
            generalist_share: 0.4,
            team_size: (2, 10),
            years: (1960, 2019),
            max_career_age: 30.0,
            seed: 0,
        }
    }
}

pub fn generate_logit_design(spec: &LogitDesignSpec) -> DesignMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = Vec::with_capacity(spec.n);
    let mut y = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let row = vec![
            if rng.gen_bool(spec.generalist_share) { 1.0 } else { 0.0 },
            rng.gen_range(spec.team_size.0..=spec.team_size.1) as f64,
            rng.gen_range(spec.years.0..=spec.years.1) as f64,
            (rng.gen::<f64>() * spec.max_career_age * 4.0).round() / 4.0,
        ];
        let eta = spec.beta[0] + row.iter().zip(&spec.beta[1..]).map(|(x, b)| x * b).sum::<f64>();
        y.push(rng.gen::<f64>() < 1.0 / (1.0 + (-eta).exp()));
        rows.push(row);
    }
    DesignMatrix::from_rows(&COLUMNS[1..], &rows, y)
}
