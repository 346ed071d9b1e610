//! Flows given by rational closed forms `u • v`, with `φ^z(x) = φ(xz)/z`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::vector_field::require_degree;
use super::{BirMap, FieldError, VectorField};
use crate::{Poly, Q, Rf};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawFlow")]
pub struct RationalFlow {
    u: Rf,
    v: Rf,
}

#[derive(Deserialize)]
struct RawFlow {
    u: Rf,
    v: Rf,
}

impl TryFrom<RawFlow> for RationalFlow {
    type Error = FieldError;
    fn try_from(r: RawFlow) -> Result<Self, FieldError> {
        RationalFlow::new(r.u, r.v)
    }
}

/// Leading behaviour of `f(xz, yz)` as `z → 0`: `z^k (lead + z next + ...)`.
struct Expansion {
    order: i64,
    lead: Rf,
    next: Rf,
}

fn expand(f: &Rf) -> Option<Expansion> {
    if f.is_zero() {
        return None;
    }
    let parts = |p: &Poly| {
        let k = p.min_total_degree().expect("nonzero");
        (k, p.homogeneous_part(k), p.homogeneous_part(k + 1))
    };
    let (n, n0, n1) = parts(f.num());
    let (m, d0, d1) = parts(f.den());
    let d0sq = &d0 * &d0;
    // (n0 + z n1)/(d0 + z d1) = n0/d0 + z (n1 d0 - n0 d1)/d0^2 + O(z^2)
    Some(Expansion {
        order: n as i64 - m as i64,
        lead: Rf::new(n0.clone(), d0.clone()).expect("nonzero"),
        next: Rf::new(&(&n1 * &d0) - &(&n0 * &d1), d0sq).expect("nonzero"),
    })
}

impl RationalFlow {
    /// Checks `u(xz, yz)/z → x` and `v(xz, yz)/z → y` exactly.
    pub fn new(u: Rf, v: Rf) -> Result<Self, FieldError> {
        for (name, f, target) in [("u", &u, Rf::x()), ("v", &v, Rf::y())] {
            let ok = expand(f).is_some_and(|e| e.order == 1 && e.lead == target);
            if !ok {
                return Err(FieldError::BoundaryViolated { component: name });
            }
        }
        Ok(Self { u, v })
    }

    pub fn parse(u: &str, v: &str) -> Result<Self, FieldError> {
        Self::new(u.parse()?, v.parse()?)
    }

    pub fn identity() -> Self {
        Self { u: Rf::x(), v: Rf::y() }
    }

    pub fn u(&self) -> &Rf {
        &self.u
    }

    pub fn v(&self) -> &Rf {
        &self.v
    }

    /// `φ^z` as a pair of rational functions, for a nonzero rational `z`.
    pub fn at(&self, z: &Q) -> Result<(Rf, Rf), FieldError> {
        if z.is_zero() {
            return Ok((Rf::x(), Rf::y()));
        }
        let (sx, sy) = (Rf::x().scale(z), Rf::y().scale(z));
        let inv = Q::from_integer(1.into()) / z;
        Ok((self.u.substitute(&sx, &sy)?.scale(&inv), self.v.substitute(&sx, &sy)?.scale(&inv)))
    }

    /// `m⁻¹∘φ∘m`.
    pub fn conjugate_by(&self, m: &BirMap) -> Result<Self, FieldError> {
        let (a, b) = m.apply_rf(&Rf::x(), &Rf::y())?;
        let (u, v) = (self.u.substitute(&a, &b)?, self.v.substitute(&a, &b)?);
        let (u, v) = m.inverse().apply_rf(&u, &v)?;
        Self::new(u, v)
    }
}

/// `f ∘ g` for maps given as pairs.
pub fn compose_maps(f: &(Rf, Rf), g: &(Rf, Rf)) -> Result<(Rf, Rf), FieldError> {
    Ok((f.0.substitute(&g.0, &g.1)?, f.1.substitute(&g.0, &g.1)?))
}

/// The level-0 flow `x/(1 − J − K) • y/(1 − J − K)`.
pub fn compose_level0(j: &Rf, k: &Rf) -> Result<RationalFlow, FieldError> {
    require_degree(j, 1, "J")?;
    require_degree(k, 1, "K")?;
    let den = &(&Rf::one() - j) - k;
    let u = Rf::x().checked_div(&den)?;
    let v = Rf::y().checked_div(&den)?;
    RationalFlow::new(u, v)
}

/// `d/dz φ^z(x)` at `z = 0`, by first-order expansion in `z`.
pub fn field_of_rational_flow(f: &RationalFlow) -> Result<VectorField, FieldError> {
    let part = |g: &Rf| expand(g).map(|e| e.next).unwrap_or_else(Rf::zero);
    VectorField::new(part(&f.u), part(&f.v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::is_level0;

    fn rf(s: &str) -> Rf {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn boundary_check() {
        assert!(RationalFlow::parse("x + (x-y)^2", "y + (x-y)^2").is_ok());
        assert_eq!(
            RationalFlow::parse("2*x", "y"),
            Err(FieldError::BoundaryViolated { component: "u" })
        );
        assert_eq!(
            RationalFlow::parse("x", "y + 1"),
            Err(FieldError::BoundaryViolated { component: "v" })
        );
    }

    #[test]
    fn fields_of_closed_forms() {
        let s = RationalFlow::parse("x + (x-y)^2", "y + (x-y)^2").unwrap();
        let f = field_of_rational_flow(&s).unwrap();
        assert_eq!(f, VectorField::parse("(x-y)^2", "(x-y)^2").unwrap());
        assert!(field_of_rational_flow(&RationalFlow::identity()).unwrap().is_zero());
        let l = RationalFlow::parse("x/(1-x)", "y/(1-x)").unwrap();
        // x/(1 - xz) z^-1 ... = x + z x^2 + O(z^2)
        assert_eq!(field_of_rational_flow(&l).unwrap(), VectorField::parse("x^2", "x*y").unwrap());
    }

    #[test]
    fn level0_compositions() {
        let f = compose_level0(&rf("x"), &rf("y")).unwrap();
        assert_eq!((f.u(), f.v()), (&rf("x/(1-x-y)"), &rf("y/(1-x-y)")));
        let j = rf("x^2/(x+y)");
        let g = compose_level0(&j, &Rf::zero()).unwrap();
        assert_eq!(g.u(), &rf("x/(1 - x^2/(x+y))"));
        assert!(is_level0(&field_of_rational_flow(&g).unwrap()));
        let id = compose_level0(&rf("x^2/y"), &rf("-x^2/y")).unwrap();
        assert_eq!(id, RationalFlow::identity());
        assert!(compose_level0(&rf("x^2"), &Rf::zero()).is_err());
    }

    #[test]
    fn exact_translation_of_superflow() {
        let s = RationalFlow::parse("x + (x-y)^2", "y + (x-y)^2").unwrap();
        let (z, w) = (q(2, 3), q(-5, 7));
        let lhs = s.at(&(&z + &w)).unwrap();
        let rhs = compose_maps(&s.at(&z).unwrap(), &s.at(&w).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugated_flow_has_conjugated_field() {
        // ℓ^{-1} ∘ φ ∘ ℓ for the superflow and A = y/(x - y).
        let s = RationalFlow::parse("x + (x-y)^2", "y + (x-y)^2").unwrap();
        let a = rf("y/(x-y)");
        let m = BirMap::from_ratio(&a).unwrap();
        let c = s.conjugate_by(&m).unwrap();
        let f = field_of_rational_flow(&c).unwrap();
        assert_eq!(f, VectorField::parse("-(x-y)^2", "0").unwrap());
    }
}
