use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::seed::derive_seed;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi<T> {
    pub lo: T,
    pub hi: T,
    /// Sample mean.
    pub mean: T,
    /// Mean of the resampled means.
    pub boot_mean: T,
}

pub fn mean<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::of_usize(values.len())
}

/// Percentile bootstrap interval for the mean. Resample `j` draws from its
/// own generator seeded by `derive_seed(seed, j, 0)`.
///
/// With `alpha = (1 - level) / 2` and sorted resample means `m`, the bounds
/// are `m[floor(alpha * b)]` and `m[ceil((1 - alpha) * b) - 1]`.
pub fn bootstrap_ci<T: Scalar>(values: &[T], b: usize, level: f64, seed: u64) -> BootstrapCi<T> {
    assert!(!values.is_empty(), "bootstrap of an empty sample");
    assert!(b > 0);
    let n = values.len();
    let mut means: Vec<T> = (0..b)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, j as u64, 0));
            let s: T = (0..n).map(|_| values[rng.gen_range(0..n)]).sum();
            s / T::of_usize(n)
        })
        .collect();
    let boot_mean = mean(&means);
    means.sort_by(|a, b| a.partial_cmp(b).expect("finite means"));
    let alpha = (1.0 - level) / 2.0;
    let lo_i = ((alpha * b as f64).floor() as usize).min(b - 1);
    let hi_i = (((1.0 - alpha) * b as f64 - 1e-9).ceil() as usize).clamp(1, b) - 1;
    BootstrapCi {
        lo: means[lo_i],
        hi: means[hi_i],
        mean: mean(values),
        boot_mean,
    }
}
