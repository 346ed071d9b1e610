use std::fmt;

use serde::{Deserialize, Serialize};

use super::FieldError;
use crate::{Q, Rf};

/// A pair `ϖ • ϱ` of 2-homogeneous rational functions.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawField")]
pub struct VectorField {
    first: Rf,
    second: Rf,
}

#[derive(Deserialize)]
struct RawField {
    first: Rf,
    second: Rf,
}

impl TryFrom<RawField> for VectorField {
    type Error = FieldError;
    fn try_from(r: RawField) -> Result<Self, FieldError> {
        VectorField::new(r.first, r.second)
    }
}

impl VectorField {
    pub fn new(first: Rf, second: Rf) -> Result<Self, FieldError> {
        for (name, c) in [("first", &first), ("second", &second)] {
            let h = c.homogeneity();
            if !h.admits(2) {
                return Err(FieldError::NotHomogeneous { component: name, expected: 2, found: h });
            }
        }
        Ok(Self { first, second })
    }

    pub fn parse(first: &str, second: &str) -> Result<Self, FieldError> {
        Self::new(first.parse()?, second.parse()?)
    }

    pub fn zero() -> Self {
        Self { first: Rf::zero(), second: Rf::zero() }
    }

    pub fn first(&self) -> &Rf {
        &self.first
    }

    pub fn second(&self) -> &Rf {
        &self.second
    }

    pub fn is_zero(&self) -> bool {
        self.first.is_zero() && self.second.is_zero()
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self { first: self.first.scale(c), second: self.second.scale(c) }
    }

    /// `z·self + w·other`.
    pub fn combine(&self, z: &Q, other: &Self, w: &Q) -> Self {
        Self {
            first: &self.first.scale(z) + &other.first.scale(w),
            second: &self.second.scale(z) + &other.second.scale(w),
        }
    }

    /// `xϱ − yϖ`; zero exactly for level-0 fields.
    pub fn kernel(&self) -> Rf {
        &(&Rf::x() * &self.second) - &(&Rf::y() * &self.first)
    }

    /// Evaluates both components at a point.
    pub fn eval(&self, x: &Q, y: &Q) -> Result<(Q, Q), crate::AlgebraError> {
        Ok((self.first.eval(x, y)?, self.second.eval(x, y)?))
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) • ({})", self.first, self.second)
    }
}

/// `[F, G]`, as a raw pair since the components are 3-homogeneous.
pub fn lie_bracket(f: &VectorField, g: &VectorField) -> (Rf, Rf) {
    let (p, r) = (&f.first, &f.second);
    let (a, b) = (&g.first, &g.second);
    let along = |h: &Rf, u: &Rf, v: &Rf| &(u * &h.dx()) + &(v * &h.dy());
    (&along(a, p, r) - &along(p, a, b), &along(b, p, r) - &along(r, a, b))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CommuteResult {
    pub commute: bool,
    /// The nonzero bracket when the fields do not commute.
    pub witness: Option<(Rf, Rf)>,
}

pub fn commute_check(f: &VectorField, g: &VectorField) -> CommuteResult {
    let (a, b) = lie_bracket(f, g);
    if a.is_zero() && b.is_zero() {
        CommuteResult { commute: true, witness: None }
    } else {
        CommuteResult { commute: false, witness: Some((a, b)) }
    }
}

pub fn is_level0(f: &VectorField) -> bool {
    f.kernel().is_zero()
}

/// Field of `ℓ⁻¹∘φ∘ℓ` for `ℓ = (xA, yA)`.
pub fn conjugate_field(a: &Rf, f: &VectorField) -> Result<VectorField, FieldError> {
    if a.is_zero() {
        return Err(FieldError::ZeroConjugator);
    }
    let h = a.homogeneity();
    if !h.admits(0) {
        return Err(FieldError::NotHomogeneous { component: "A", expected: 0, found: h });
    }
    let k = f.kernel();
    let first = &(a * &f.first) - &(&a.dy() * &k);
    let second = &(a * &f.second) + &(&a.dx() * &k);
    VectorField::new(first, second)
}

pub(crate) fn require_degree(f: &Rf, d: i64, name: &'static str) -> Result<(), FieldError> {
    let h = f.homogeneity();
    if h.admits(d) {
        Ok(())
    } else {
        Err(FieldError::NotHomogeneous { component: name, expected: d, found: h })
    }
}
