//! Vector fields of projective flows: brackets, conjugation, level 0.

mod birmap;
mod flow;
mod vector_field;

use thiserror::Error;

use crate::algebra::{AlgebraError, Homogeneity, ParseError};

pub use birmap::BirMap;
pub use flow::{compose_level0, compose_maps, field_of_rational_flow, RationalFlow};
pub(crate) use vector_field::require_degree;
pub use vector_field::{commute_check, conjugate_field, is_level0, lie_bracket, CommuteResult, VectorField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{component} is not {expected}-homogeneous ({found:?})")]
    NotHomogeneous { component: &'static str, expected: i64, found: Homogeneity },
    #[error("conjugating function is zero")]
    ZeroConjugator,
    #[error("boundary condition fails for {component}")]
    BoundaryViolated { component: &'static str },
    #[error("linear map is not invertible")]
    SingularMap,
    #[error("radial map needs coprime homogeneous P, Q of equal degree")]
    BadRadial,
    #[error("point lies on the singular locus")]
    SingularPoint,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
