use thiserror::Error;

/// Errors raised by the symbolic engine, the matrix algebra and the
/// reduction pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at column {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown variable `{name}` at column {position}")]
    UnknownVariable { name: String, position: usize },

    #[error("division by zero at column {position}")]
    DivisionByZero { position: usize },

    #[error("variable index {index} out of range for {count} variables")]
    VariableIndex { index: usize, count: usize },

    #[error("invalid variable set: {0}")]
    VarSet(String),

    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,

    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular matrix")]
    Singular,

    #[error("polynomial degree too small for a resultant (degrees {0} and {1})")]
    DegenerateDegree(usize, usize),

    #[error("singular Jacobian: the transformation is not invertible")]
    SingularJacobian,

    #[error("supplied inverse does not invert the forward map: {0}")]
    InverseMismatch(String),

    #[error("asymmetric connection component {0}")]
    AsymmetricConnection(String),

    #[error("the constant term of the squared characteristic polynomial vanishes")]
    ZeroEpsilon,

    #[error("pole of the connection at {0:?}")]
    PoleOnPath(Vec<f64>),

    #[error("determinant of T collapsed to {det:e} at {point:?}")]
    DeterminantCollapse { point: Vec<f64>, det: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
