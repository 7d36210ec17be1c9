use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between reading samples and writing a model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid damping parameters alpha={alpha}, beta={beta}: both must be finite and >= 0")]
    InvalidDamping { alpha: f64, beta: f64 },

    #[error("singular pencil at s={point} (condition estimate {condition:e})")]
    SingularPencil { point: Complex64, condition: f64 },

    #[error("odd sample count {0}: left/right partition needs an even number of samples")]
    OddSampleCount(usize),

    #[error("duplicate interpolation point {0}")]
    DuplicatePoint(Complex64),

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("conjugate inconsistency at s={point}: H(conj s) != conj H(s)")]
    ConjugateInconsistency { point: Complex64 },

    #[error("conjugate pairs cannot be split evenly between left and right sets")]
    UnbalancedConjugatePartition,

    #[error("coincident left/right points at (row {row}, col {col})")]
    CoincidentPoints { row: usize, col: usize },

    #[error("f(mu) and f(lambda) collide at (row {row}, col {col})")]
    FCollision { row: usize, col: usize },

    #[error("s={0} is a pole of f (1 + beta s = 0)")]
    PoleOfF(Complex64),

    #[error("numerical rank {0} is odd: inconsistent with SO structure")]
    OddRank(usize),

    #[error("truncation order {r} outside 1..={max}")]
    InvalidOrder { r: usize, max: usize },

    #[error("tolerance {0} outside (0, 1)")]
    InvalidTolerance(f64),

    #[error("test fraction {0} outside (0, 1)")]
    InvalidFraction(f64),

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("data not conjugate-closed with pairs on the same side")]
    NotConjugateClosed,

    #[error("residual imaginary part {0:e} above threshold")]
    ResidualImaginary(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite result: {0}")]
    NonFiniteResult(String),

    #[error("every grid cell failed identification")]
    NoFeasibleCell,

    #[error("generator: {0}")]
    Generator(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("missing damping parameters")]
    MissingDamping,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the computation itself (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularPencil { .. }
                | Error::CoincidentPoints { .. }
                | Error::FCollision { .. }
                | Error::PoleOfF(_)
                | Error::OddRank(_)
                | Error::ResidualImaginary(_)
                | Error::NoFeasibleCell
                | Error::NonFiniteResult(_)
                | Error::Generator(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::InvalidDamping { .. } => "invalid_damping",
            Error::SingularPencil { .. } => "singular_pencil",
            Error::OddSampleCount(_) => "odd_sample_count",
            Error::DuplicatePoint(_) => "duplicate_point",
            Error::NonFinite(_) => "non_finite",
            Error::ConjugateInconsistency { .. } => "conjugate_inconsistency",
            Error::UnbalancedConjugatePartition => "unbalanced_partition",
            Error::CoincidentPoints { .. } => "coincident_points",
            Error::FCollision { .. } => "f_collision",
            Error::PoleOfF(_) => "pole_of_f",
            Error::OddRank(_) => "odd_rank",
            Error::InvalidOrder { .. } => "invalid_order",
            Error::InvalidTolerance(_) => "invalid_tolerance",
            Error::InvalidFraction(_) => "invalid_fraction",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::NotConjugateClosed => "not_conjugate_closed",
            Error::ResidualImaginary(_) => "residual_imaginary",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::NoFeasibleCell => "no_feasible_cell",
            Error::NonFiniteResult(_) => "non_finite_result",
            Error::Generator(_) => "generator",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::MissingDamping => "missing_damping",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
