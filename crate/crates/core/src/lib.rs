//! Symbolic test for reducing a quasilinear parabolic system to diffusion
//! form by a change of variables, and numeric construction of that change.

pub mod error;
pub mod scalar;
pub mod symexpr;
pub mod polyalg;
pub mod geometry;
pub mod criterion;
pub mod pfaff;
pub mod fixtures;

pub use error::{Error, Result};
pub use scalar::{Field, Rational, Ring};
pub use symexpr::{parse_expr, Expr, Poly, VarSet};

/// Matrices of rational functions in the state variables.
pub type ExprMatrix = polyalg::Matrix<Expr>;
/// Exact constant matrices.
pub type RationalMatrix = polyalg::Matrix<Rational>;
pub type FloatMatrix = polyalg::Matrix<f64>;
/// Univariate polynomials in λ whose coefficients are functions of y.
pub type ExprPoly = polyalg::UniPoly<Expr>;
pub type RationalPoly = polyalg::UniPoly<Rational>;
pub type RationalConnection = geometry::Connection<Rational>;
pub type GridSolution64 = pfaff::GridSolution<f64>;
