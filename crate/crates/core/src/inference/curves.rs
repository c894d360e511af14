//! Metric-versus-team-fields curves for generalist and specialist teams.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bootstrap::bootstrap_ci;
use crate::atypicality::AtypicalityScore;
use crate::disruption::DisruptionScore;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::derive_seed;
use crate::teams::{Composition, TeamRecord};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveMetric {
    MeanAtypicality,
    PTop5Disruptive,
}

impl CurveMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveMetric::MeanAtypicality => "mean_atypicality",
            CurveMetric::PTop5Disruptive => "p_top5_disruptive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    pub b: usize,
    pub level: f64,
    pub seed: u64,
    pub min_bin: usize,
    pub min_fields: usize,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            b: 1000,
            level: 0.95,
            seed: 0,
            min_bin: 30,
            min_fields: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveBin<T> {
    pub group: Composition,
    pub n_fields: usize,
    pub mean: T,
    pub ci_lo: T,
    pub ci_hi: T,
    pub boot_mean: T,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinnedCurve<T> {
    pub metric: CurveMetric,
    /// Sorted by (group, n_fields).
    pub bins: Vec<CurveBin<T>>,
}

impl<T: Scalar> BinnedCurve<T> {
    pub fn get(&self, group: Composition, n_fields: usize) -> Option<&CurveBin<T>> {
        self.bins
            .iter()
            .find(|b| b.group == group && b.n_fields == n_fields)
    }

    /// `(v(from) - v(to)) / v(from) * 100` for one group.
    pub fn relative_decline_pct(&self, group: Composition, from: usize, to: usize) -> Option<f64> {
        let a = self.get(group, from)?.mean.to_f64_lossy();
        let b = self.get(group, to)?.mean.to_f64_lossy();
        (a != 0.0).then(|| (a - b) / a * 100.0)
    }
}

/// Per-paper 0/1 values of the top-percentile flag, `None` when d is undefined.
pub fn top5_values<T: Scalar, D>(scores: &[DisruptionScore<D>], flags: &[bool]) -> Vec<Option<T>> {
    scores
        .iter()
        .zip(flags)
        .map(|(s, &f)| s.defined.then(|| if f { T::one() } else { T::zero() }))
        .collect()
}

pub fn atypicality_values<T: Scalar>(scores: &[AtypicalityScore<T>]) -> Vec<Option<T>> {
    scores.iter().map(|s| s.defined.then_some(s.a)).collect()
}

/// Group multi-author generalist and specialist papers by team field count
/// and average `values` (indexed by paper) per bin, with bootstrap
/// intervals. Bins with fewer than `min_bin` papers are dropped.
pub fn binned_metric_vs_fields<T: Scalar>(
    records: &[TeamRecord],
    metric: CurveMetric,
    values: &[Option<T>],
    opts: &CurveOptions,
) -> Result<BinnedCurve<T>> {
    let mut groups: BTreeMap<(Composition, usize), Vec<T>> = BTreeMap::new();
    let mut any_pure = false;
    for r in records {
        if !r.is_team() || !r.composition.is_pure() {
            continue;
        }
        any_pure = true;
        let Some(k) = r.n_team_fields else { continue };
        if k < opts.min_fields {
            continue;
        }
        if let Some(v) = values[r.paper.index()] {
            groups.entry((r.composition, k)).or_default().push(v);
        }
    }
    if !any_pure {
        return Err(Error::NoPureTeams);
    }
    let bins = groups
        .into_par_iter()
        .filter(|(_, v)| v.len() >= opts.min_bin.max(1))
        .map(|((group, k), v)| {
            let g = if group == Composition::Generalist { 0 } else { 1 };
            let seed = derive_seed(opts.seed, g, k as u64);
            let ci = bootstrap_ci(&v, opts.b, opts.level, seed);
            CurveBin {
                group,
                n_fields: k,
                mean: ci.mean,
                ci_lo: ci.lo,
                ci_hi: ci.hi,
                boot_mean: ci.boot_mean,
                n: v.len(),
            }
        })
        .collect();
    Ok(BinnedCurve { metric, bins })
}
