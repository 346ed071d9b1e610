//! Birational 1-homogeneous plane maps.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{FieldError, VectorField};
use crate::{Poly, Q, Rf};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Repr", into = "Repr")]
pub enum BirMap {
    /// `(x, y) ↦ (m00 x + m01 y, m10 x + m11 y)`.
    Linear([[Q; 2]; 2]),
    /// `ℓ_{P,Q}(x, y) = (xP/Q, yP/Q)`.
    Radial { p: Poly, q: Poly },
    /// Applied left to right.
    Composite(Vec<BirMap>),
}

impl BirMap {
    pub fn linear(m: [[Q; 2]; 2]) -> Result<Self, FieldError> {
        let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
        if det.is_zero() {
            return Err(FieldError::SingularMap);
        }
        Ok(BirMap::Linear(m))
    }

    pub fn identity() -> Self {
        let (o, z) = (Q::from_integer(1.into()), Q::zero());
        BirMap::Linear([[o.clone(), z.clone()], [z, o]])
    }

    pub fn radial(p: Poly, q: Poly) -> Result<Self, FieldError> {
        let (dp, dq) = match (p.homogeneous_degree(), q.homogeneous_degree()) {
            (Some(a), Some(b)) if !p.is_zero() && !q.is_zero() => (a, b),
            _ => return Err(FieldError::BadRadial),
        };
        if dp != dq || !p.gcd(&q).is_constant() {
            return Err(FieldError::BadRadial);
        }
        Ok(BirMap::Radial { p, q })
    }

    /// `ℓ_A` for a 0-homogeneous `A = P/Q`.
    pub fn from_ratio(a: &Rf) -> Result<Self, FieldError> {
        Self::radial(a.num().clone(), a.den().clone())
    }

    pub fn inverse(&self) -> Self {
        match self {
            BirMap::Linear(m) => {
                let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
                BirMap::Linear([
                    [&m[1][1] / &det, -&m[0][1] / &det],
                    [-&m[1][0] / &det, &m[0][0] / &det],
                ])
            }
            BirMap::Radial { p, q } => BirMap::Radial { p: q.clone(), q: p.clone() },
            BirMap::Composite(ms) => BirMap::Composite(ms.iter().rev().map(Self::inverse).collect()),
        }
    }

    pub fn apply(&self, x: &Q, y: &Q) -> Result<(Q, Q), FieldError> {
        match self {
            BirMap::Linear(m) => Ok((&m[0][0] * x + &m[0][1] * y, &m[1][0] * x + &m[1][1] * y)),
            BirMap::Radial { p, q } => {
                let d = q.eval(x, y);
                if d.is_zero() {
                    return Err(FieldError::SingularPoint);
                }
                let r = p.eval(x, y) / d;
                Ok((x * &r, y * &r))
            }
            BirMap::Composite(ms) => ms.iter().try_fold((x.clone(), y.clone()), |(a, b), m| m.apply(&a, &b)),
        }
    }

    pub fn apply_f64(&self, x: f64, y: f64) -> Result<(f64, f64), FieldError> {
        match self {
            BirMap::Linear(m) => {
                let f = |c: &Q| c.to_f64().unwrap_or(f64::NAN);
                Ok((f(&m[0][0]) * x + f(&m[0][1]) * y, f(&m[1][0]) * x + f(&m[1][1]) * y))
            }
            BirMap::Radial { p, q } => {
                let lift = |c: &Q| c.to_f64().unwrap_or(f64::NAN);
                let d = q.eval_with(x, y, lift);
                if d == 0.0 {
                    return Err(FieldError::SingularPoint);
                }
                let r = p.eval_with(x, y, lift) / d;
                Ok((x * r, y * r))
            }
            BirMap::Composite(ms) => ms.iter().try_fold((x, y), |(a, b), m| m.apply_f64(a, b)),
        }
    }

    /// Symbolic image of the point `(sx, sy)`.
    pub fn apply_rf(&self, sx: &Rf, sy: &Rf) -> Result<(Rf, Rf), FieldError> {
        match self {
            BirMap::Linear(m) => Ok((
                &sx.scale(&m[0][0]) + &sy.scale(&m[0][1]),
                &sx.scale(&m[1][0]) + &sy.scale(&m[1][1]),
            )),
            BirMap::Radial { p, q } => {
                let r = Rf::new(p.clone(), q.clone())?.substitute(sx, sy)?;
                Ok((sx * &r, sy * &r))
            }
            BirMap::Composite(ms) => {
                ms.iter().try_fold((sx.clone(), sy.clone()), |(a, b), m| m.apply_rf(&a, &b))
            }
        }
    }

    /// Field of `m⁻¹∘φ∘m`, computed as `(Dm)⁻¹ F(m)`.
    pub fn conjugate(&self, f: &VectorField) -> Result<VectorField, FieldError> {
        let (m1, m2) = self.apply_rf(&Rf::x(), &Rf::y())?;
        let (a, b, c, d) = (m1.dx(), m1.dy(), m2.dx(), m2.dy());
        let det = &(&a * &d) - &(&b * &c);
        let p = f.first().substitute(&m1, &m2)?;
        let r = f.second().substitute(&m1, &m2)?;
        let first = (&(&d * &p) - &(&b * &r)).checked_div(&det)?;
        let second = (&(&a * &r) - &(&c * &p)).checked_div(&det)?;
        VectorField::new(first, second)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Repr {
    Linear([[String; 2]; 2]),
    Radial { p: String, q: String },
    Composite(Vec<Repr>),
}

impl From<BirMap> for Repr {
    fn from(m: BirMap) -> Repr {
        match m {
            BirMap::Linear(m) => Repr::Linear(m.map(|row| row.map(|c| c.to_string()))),
            BirMap::Radial { p, q } => Repr::Radial { p: p.to_string(), q: q.to_string() },
            BirMap::Composite(ms) => Repr::Composite(ms.into_iter().map(Repr::from).collect()),
        }
    }
}

impl TryFrom<Repr> for BirMap {
    type Error = FieldError;
    fn try_from(r: Repr) -> Result<Self, FieldError> {
        let poly = |s: &str| -> Result<Poly, FieldError> {
            let f: Rf = s.parse()?;
            f.as_polynomial().ok_or(FieldError::BadRadial)
        };
        match r {
            Repr::Linear(m) => {
                let mut out: [[Q; 2]; 2] = Default::default();
                for (i, row) in m.iter().enumerate() {
                    for (j, s) in row.iter().enumerate() {
                        let f: Rf = s.parse()?;
                        out[i][j] = f.constant_value().ok_or(FieldError::SingularMap)?;
                    }
                }
                BirMap::linear(out)
            }
            Repr::Radial { p, q } => BirMap::radial(poly(&p)?, poly(&q)?),
            Repr::Composite(ms) => {
                Ok(BirMap::Composite(ms.into_iter().map(BirMap::try_from).collect::<Result<_, _>>()?))
            }
        }
    }
}
