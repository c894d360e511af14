pub mod atypicality;
pub mod corpus;
pub mod disruption;
pub mod error;
pub mod format;
pub mod ids;
pub mod inference;
pub mod scalar;
pub mod seed;
pub mod style;
pub mod synth;
pub mod teams;

pub use error::{Error, Result};

/// Exact rational, for scores that are ratios of counts.
pub type ExactFraction = num_rational::Ratio<i64>;

pub type Profile = style::AuthorProfile<f64>;
pub type Trajectory = style::StyleTrajectory<f64>;
pub type Disruption = disruption::DisruptionScore<f64>;
pub type ExactDisruption = disruption::DisruptionScore<ExactFraction>;
pub type Atypicality = atypicality::AtypicalityScore<f64>;
pub type PairStats = atypicality::PairStatistics<f64>;
pub type Regression = inference::RegressionResult<f64>;
pub type Curve = inference::BinnedCurve<f64>;
