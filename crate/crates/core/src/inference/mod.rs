//! Logistic regression of top-percentile disruption on team covariates,
//! bootstrap intervals, and binned curves against team field counts.

mod bootstrap;
mod curves;
pub mod linalg;
mod logistic;
mod table;

pub use bootstrap::{bootstrap_ci, mean, BootstrapCi};
pub use curves::{
    atypicality_values, binned_metric_vs_fields, top5_values, BinnedCurve, CurveBin, CurveMetric,
    CurveOptions,
};
pub use logistic::{
    build_design_matrix, fit_logistic, log_likelihood, odds_ratios, score, stars, two_sided_p,
    DesignMatrix, FitOptions, RegressionResult, COLUMNS,
};
pub use table::render_table;
