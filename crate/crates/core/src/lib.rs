//! Commuting projective flows in the plane: exact analysis of rational
//! vector fields, construction of commuting partners from orbit functions,
//! and floating-point verification of the resulting flow maps.

pub mod algebra;
pub mod catalog;
pub mod fields;
pub mod orbit;
pub mod numeric;
pub mod partner;

pub use algebra::{AlgebraError, Homogeneity, ParseError, Var};

pub type Q = num_rational::BigRational;
pub type Poly = algebra::BiPoly<Q>;
pub type Poly1 = algebra::UniPoly<Q>;
pub type Rf = algebra::RatFn<Q>;
pub type Rf1 = algebra::UniRatFn<Q>;
pub type Alg = algebra::AlgPoly<Q>;
