use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input vectors are linearly dependent: {0}")]
    DegenerateInput(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },
    #[error("plane is too steep over the reference plane (angle {angle})")]
    TooSteep { angle: f64 },
    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("face {0} of the simplex is degenerate")]
    DegenerateFace(usize),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("symmetrization over {tuple_len}! permutations is not supported (n <= 6)")]
    TooLargeN { tuple_len: usize },
    #[error("ball contains no atoms")]
    EmptyBall,
    #[error("{needed} tuple evaluations exceed the cap of {cap}")]
    TooLarge { needed: f64, cap: f64 },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("measure has no atoms")]
    EmptyMeasure,
    #[error("no stopping ball found for cube {0}")]
    NoGoodBall(usize),
    #[error("two Z-points share the projection {0:?}")]
    ProjectionNotInjective(Vec<f64>),
    #[error("point outside the domain of the function")]
    OutOfDomain,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::TooSteep { .. } => "TooSteep",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DegenerateFace(_) => "DegenerateFace",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::TooLargeN { .. } => "TooLargeN",
            Error::EmptyBall => "EmptyBall",
            Error::TooLarge { .. } => "TooLarge",
            Error::BadParams(_) => "BadParams",
            Error::EmptyMeasure => "EmptyMeasure",
            Error::NoGoodBall(_) => "NoGoodBall",
            Error::ProjectionNotInjective(_) => "ProjectionNotInjective",
            Error::OutOfDomain => "OutOfDomain",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }
}
