use thiserror::Error;

/// Syntax error in a metric file or expression (1-based line and column).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain violation in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },
    #[error("expression references coordinate index {0} outside the chart")]
    UnknownVariable(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("metric must have dimension >= 2, got {0}")]
    Dimension(usize),
    #[error("{0}")]
    Invalid(String),
    #[error("g[{i}][{j}]: {source}")]
    Eval {
        i: usize,
        j: usize,
        #[source]
        source: EvalError,
    },
    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },
    #[error("point has {got} coordinates, chart has {expected}")]
    PointDimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("variance signatures differ")]
    VarianceMismatch,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported rank {0}")]
    UnsupportedRank(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("Weyl tensor needs dimension >= 3, got {0}")]
    WeylDimension(usize),
    #[error("degenerate plane: spanning vectors are linearly dependent")]
    DegeneratePlane,
    #[error("vector is not unit length (|u|^2 = {0})")]
    NotUnit(f64),
    #[error("arguments are not orthonormal (worst deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("quasi-constant-curvature model needs q >= 1, got {0}")]
    InvalidMultiplicity(usize),
    #[error("curvature invariant violated: {0}")]
    Invariant(String),
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("no sample points")]
    EmptySample,
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
