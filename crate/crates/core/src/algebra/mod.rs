//! Exact arithmetic on bivariate polynomials and rational functions.

pub mod algpoly;
pub mod bipoly;
pub mod linear;
pub mod parse;
pub mod ratfn;
pub mod recpoly;
pub mod scalar;
pub mod unipoly;
pub mod uniratfn;
pub mod univariate;

use thiserror::Error;

pub use algpoly::AlgPoly;
pub use bipoly::{BiPoly, Mono};
pub use parse::{parse_rf, ParseError};
pub use ratfn::{Homogeneity, RatFn, Var};
pub use scalar::Scalar;
pub use unipoly::UniPoly;
pub use uniratfn::UniRatFn;
pub use univariate::{rational_roots, resultant, resultant_linear_pencil, squarefree_factor, SquarefreeFactors};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial division is not exact")]
    InexactDivision,
    #[error("substitution makes the denominator vanish identically")]
    DegenerateSubstitution,
    #[error("evaluation at a pole")]
    Pole,
    #[error("input is not {expected}-homogeneous")]
    NotHomogeneous { expected: i64 },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("coefficient too large for divisor search")]
    CoefficientTooLarge,
}
