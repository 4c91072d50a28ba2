//! Multivariate orthogonal polynomials built from moment functionals.
//!
//! The crate constructs monic orthogonal polynomial systems in `d` variables,
//! applies Uvarov (finite point mass) and Christoffel (quadratic multiplier)
//! modifications, and checks the resulting connection formulas. Every
//! algorithm is generic over [`Scalar`], so the same code runs in exact
//! rational arithmetic and in `f64`.

pub mod christoffel;
pub mod error;
pub mod families;
pub mod matrix;
pub mod moments;
pub mod multiindex;
pub mod ops;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod spec_file;
pub mod uvarov;

pub use christoffel::{Connection, QuadraticMultiplier};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use moments::MomentFunctional;
pub use multiindex::{
    cumulative_size, enumerate, rank_size, shift_matrix, GradedBasis, MultiIndex, ShiftMatrix,
};
pub use ops::OpSystem;
pub use poly::{Polynomial, VectorPolynomial};
pub use scalar::{Rational, Scalar};
pub use uvarov::{UvarovSpec, UvarovSystem};
