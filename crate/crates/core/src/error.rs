use thiserror::Error;

use crate::matrix::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("moment matrix M_{degree} is singular; the functional is not quasi-definite at degree {degree}")]
    SingularMomentMatrix { degree: usize },

    #[error("Gram matrix H_{degree} is singular")]
    SingularGram { degree: usize },

    #[error("modified functional is not quasi-definite at degree {degree}")]
    NotQuasiDefinite { degree: usize },

    #[error("no three-term relation at degree {degree} for variable x{}: residual {residual}", .variable + 1)]
    NoThreeTerm {
        degree: usize,
        variable: usize,
        residual: String,
    },

    #[error("connection coefficient N_2 vanishes; the multiplier would not have degree 2")]
    DegreeCollapse,

    #[error("moment parity and three-term coefficients disagree about central symmetry")]
    InconsistentSymmetry,

    #[error("inadmissible parameters: {0}")]
    InadmissibleParameters(String),

    #[error("1 + lambda K_{degree}(0,0) vanishes")]
    MassDegenerate { degree: usize },

    #[error("mass point {0} appears more than once")]
    DuplicatePoint(String),

    #[error("mass {index} is zero")]
    ZeroMass { index: usize },

    #[error("{points} points but {masses} masses")]
    LengthMismatch { points: usize, masses: usize },

    #[error("moment {0} is not available")]
    MissingMoment(String),

    #[error("moment {0} is irrational and cannot be represented exactly")]
    IrrationalMoment(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, Error>;
