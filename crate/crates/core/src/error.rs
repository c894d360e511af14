use std::path::PathBuf;

use crate::ids::{AuthorId, FieldId, PaperId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: duplicate paper id `{id}`")]
    DuplicatePaper {
        path: PathBuf,
        line: usize,
        id: String,
    },
    #[error("invalid taxonomy: {0}")]
    Taxonomy(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus cache: {0}")]
    Cache(String),
    #[error("paper {0} has no field scores at the requested level")]
    NoField(PaperId),
    #[error("field {0} has no discipline parent")]
    MissingParent(FieldId),
    #[error("unknown paper id `{0}`")]
    UnknownPaper(String),
    #[error("specialization score needs at least one paper")]
    NoPapers,
    #[error("specialization score {0} outside (0, 1]")]
    InvalidScore(f64),
    #[error("trajectory needs {need} first-authored papers, author has {have}")]
    InsufficientPapers { have: usize, need: usize },
    #[error("no eligible authors in cohort")]
    EmptyCohort,
    #[error("author {author} debuts in {first_pub_year}, after paper {paper} ({year})")]
    ClockSkew {
        paper: PaperId,
        author: AuthorId,
        first_pub_year: i32,
        year: i32,
    },
    #[error("author {0} has no style profile")]
    Unprofiled(AuthorId),
    #[error("no defined scores to rank")]
    NoDefinedScores,
    #[error("logistic regression: outcome has no variation ({positives} positives of {n})")]
    DegenerateOutcome { positives: usize, n: usize },
    #[error("logistic regression: perfect separation suspected (coefficient norm {norm:.3} after {iter} iterations)")]
    Separation { norm: f64, iter: usize },
    #[error("logistic regression: design is collinear (condition number {condition:.3e})")]
    Collinear { condition: f64 },
    #[error("no generalist or specialist teams to bin")]
    NoPureTeams,
    #[error("infeasible synthetic spec: {0}")]
    InfeasibleSpec(String),
    #[error("paper {0} has no later papers that could cite it")]
    InsufficientCiters(PaperId),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
