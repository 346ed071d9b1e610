//! Commuting partners of level-1 flows.
//!
//! A level-1 field is conjugated by `ℓ_A`, `A = y/W`, into a horizontal field
//! `ϖ • 0`. Writing `ϖ = V²/V_x` for a 1-homogeneous `V`, the fields
//! `(V²/V_x) • 0` and `(yV/V_x − xy) • (−y²)` commute, and their flows are
//! `u • y` and `a • y/(y+1)` with `V/(1 − V) = V(u, y)` and
//! `V(a, y/(y+1)) = V(x, y)`.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::linear::solve_columns;
use crate::algebra::Scalar;
use crate::fields::{commute_check, conjugate_field, BirMap, FieldError, VectorField};
use crate::orbit::{hermite_logpart, orbit_function, Level, OrbitError};
use crate::{Alg, Q, Rf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartnerError {
    #[error("V_x vanishes identically (V = c·y)")]
    ConstantInX,
    #[error("the field is not of level 1")]
    NotLevelOne,
    #[error("the chart field does not integrate to a rational V")]
    NonRationalV,
    #[error("constructed partner does not commute")]
    NotCommuting,
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<crate::AlgebraError> for PartnerError {
    fn from(e: crate::AlgebraError) -> Self {
        PartnerError::Field(e.into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationResult {
    /// `y/W`, 0-homogeneous.
    pub a: Rf,
    /// `ℓ_A = (xA, yA)`.
    pub map: BirMap,
    /// `conjugate_field(A, F)`, horizontal.
    pub normalized_field: VectorField,
    pub orbit: Rf,
}

/// Conjugates a level-1 field into the chart where its second component is 0.
pub fn normalize_to_horizontal(f: &VectorField) -> Result<NormalizationResult, PartnerError> {
    let report = orbit_function(f)?;
    let w = match (report.level, report.orbit()) {
        (Level::Finite(1), Some(w)) => w.clone(),
        _ => return Err(PartnerError::NotLevelOne),
    };
    let a = Rf::y().checked_div(&w)?;
    let normalized_field = conjugate_field(&a, f)?;
    debug_assert!(normalized_field.second().is_zero());
    let map = BirMap::from_ratio(&a)?;
    Ok(NormalizationResult { a, map, normalized_field, orbit: w })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartnerFields {
    /// `(V²/V_x) • 0`.
    pub phi: VectorField,
    /// `(yV/V_x − xy) • (−y²)`.
    pub psi: VectorField,
    /// Whether no constant multiple of one field gives the other.
    pub independent: bool,
}

fn check_v(v: &Rf) -> Result<Rf, PartnerError> {
    crate::fields::require_degree(v, 1, "V")?;
    let vx = v.dx();
    if vx.is_zero() {
        return Err(PartnerError::ConstantInX);
    }
    Ok(vx)
}

pub fn partner_fields_from_v(v: &Rf) -> Result<PartnerFields, PartnerError> {
    let vx = check_v(v)?;
    let (x, y) = (Rf::x(), Rf::y());
    let phi = VectorField::new((v * v).checked_div(&vx)?, Rf::zero())?;
    let alpha = &(&y * v).checked_div(&vx)? - &(&x * &y);
    let psi = VectorField::new(alpha, -&(&y * &y))?;
    let independent = !proportional(&phi, &psi);
    Ok(PartnerFields { phi, psi, independent })
}

fn proportional(f: &VectorField, g: &VectorField) -> bool {
    if f.is_zero() || g.is_zero() {
        return true;
    }
    let ratio = |a: &Rf, b: &Rf| -> Option<Option<Q>> {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => Some(None),
            (false, false) => a.ratio_constant(b).map(Some),
            _ => None,
        }
    };
    match (ratio(f.first(), g.first()), ratio(f.second(), g.second())) {
        (Some(Some(c)), Some(Some(d))) => c == d,
        (Some(_), Some(_)) => true,
        _ => false,
    }
}

/// Orbit function `V y/(zV + wy)` of `z·φ + w·ψ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinedOrbit {
    v: Rf,
}

impl CombinedOrbit {
    pub fn new(v: Rf) -> Self {
        Self { v }
    }

    pub fn specialize(&self, z: &Q, w: &Q) -> Result<Rf, PartnerError> {
        let den = &self.v.scale(z) + &Rf::y().scale(w);
        Ok((&self.v * &Rf::y()).checked_div(&den)?)
    }

    /// Value at a point for real parameters.
    pub fn eval_f64(&self, z: f64, w: f64, x: f64, y: f64) -> f64 {
        let lift = |c: &Q| c.to_f64_lossy();
        let v = self.v.num().eval_with(x, y, lift) / self.v.den().eval_with(x, y, lift);
        v * y / (z * v + w * y)
    }
}

impl std::fmt::Display for CombinedOrbit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({v})*y/(z*({v}) + w*y)", v = self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartnerBundle {
    pub v: Rf,
    pub phi_field: VectorField,
    pub psi_field: VectorField,
    /// Polynomial in `a` whose root `a(x, y)` is the first coordinate of `ψ`.
    pub a_equation: Alg,
    /// Polynomial in `u` whose root `u(x, y)` is the first coordinate of `φ`.
    pub u_equation: Alg,
    pub combined_orbit: CombinedOrbit,
}

impl PartnerBundle {
    /// `V(t, y/(yz + 1)) = V(x, y)`, whose root is `a(xz, yz)/z`.
    pub fn a_equation_scaled(&self, z: &Q) -> Result<Alg, PartnerError> {
        let s = Rf::y().checked_div(&(&Rf::y().scale(z) + &Rf::one()))?;
        Ok(a_relation(&self.v, &s))
    }

    /// `V/(1 − zV) = V(t, y)`, whose root is `u(xz, yz)/z`.
    pub fn u_equation_scaled(&self, z: &Q) -> Alg {
        u_relation(&self.v, z)
    }
}

fn a_relation(v: &Rf, s: &Rf) -> Alg {
    let (n, d) = (v.num(), v.den());
    let lhs = Alg::from_first_variable(n, s).scale(&Rf::from_poly(d.clone()));
    let rhs = Alg::from_first_variable(d, s).scale(&Rf::from_poly(n.clone()));
    (&lhs - &rhs).primitive()
}

fn u_relation(v: &Rf, z: &Q) -> Alg {
    let (n, d) = (v.num(), v.den());
    let y = Rf::y();
    let left = &Rf::from_poly(d.clone()) - &Rf::from_poly(n.clone()).scale(z);
    let lhs = Alg::from_first_variable(n, &y).scale(&left);
    let rhs = Alg::from_first_variable(d, &y).scale(&Rf::from_poly(n.clone()));
    (&lhs - &rhs).primitive()
}

pub fn partner_bundle(v: &Rf) -> Result<PartnerBundle, PartnerError> {
    let PartnerFields { phi, psi, .. } = partner_fields_from_v(v)?;
    let s = Rf::y().checked_div(&(&Rf::y() + &Rf::one()))?;
    Ok(PartnerBundle {
        v: v.clone(),
        phi_field: phi,
        psi_field: psi,
        a_equation: a_relation(v, &s),
        u_equation: u_relation(v, &Q::from_integer(1.into())),
        combined_orbit: CombinedOrbit::new(v.clone()),
    })
}

impl Serialize for PartnerBundle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PartnerBundle", 6)?;
        st.serialize_field("V", &self.v.to_string())?;
        st.serialize_field("phi_field", &self.phi_field)?;
        st.serialize_field("psi_field", &self.psi_field)?;
        st.serialize_field("a_equation", &self.a_equation.fmt_var("a"))?;
        st.serialize_field("u_equation", &self.u_equation.fmt_var("u"))?;
        st.serialize_field("combined_orbit", &self.combined_orbit.to_string())?;
        st.end()
    }
}

/// The plane of fields commuting with a level-1 field: `z·field + w·partner`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingFamily {
    pub field: VectorField,
    pub partner: VectorField,
    pub normalization: NormalizationResult,
    /// Chart orbit function with `ϖ' = V²/V_x`.
    pub v: Rf,
}

impl CommutingFamily {
    /// `(c, d)` with `h = c·field + d·partner`, if any.
    pub fn coordinates(&self, h: &VectorField) -> Option<(Q, Q)> {
        let comps = |f: &VectorField| [f.first().clone(), f.second().clone()];
        let (f, g, hh) = (comps(&self.field), comps(&self.partner), comps(h));
        let mut cols = vec![Vec::new(), Vec::new()];
        let mut rhs = Vec::new();
        let q = |n: i64| Q::from_integer(n.into());
        let points = [(q(2), q(3)), (q(5), q(-7)), (q(-3), q(11)), (q(13), q(4)), (q(7), q(17))];
        for (px, py) in &points {
            for k in 0..2 {
                let (Ok(a), Ok(b), Ok(c)) = (f[k].eval(px, py), g[k].eval(px, py), hh[k].eval(px, py))
                else {
                    continue;
                };
                cols[0].push(a);
                cols[1].push(b);
                rhs.push(c);
            }
        }
        let sol = solve_columns(&cols, &rhs)?;
        let (c, d) = (sol[0].clone(), sol[1].clone());
        (self.field.combine(&c, &self.partner, &d) == *h).then_some((c, d))
    }

    pub fn contains(&self, h: &VectorField) -> bool {
        self.coordinates(h).is_some()
    }
}

/// Builds a partner of a level-1 field in the horizontal chart and maps it back.
pub fn commuting_family(f: &VectorField) -> Result<CommutingFamily, PartnerError> {
    let normalization = normalize_to_horizontal(f)?;
    let p = normalization.normalized_field.first();
    // V²/V_x = ϖ' at y = 1 reads (−1/V)' = 1/ϖ'.
    let integral = hermite_logpart(&p.recip()?.dehomogenize())?;
    if !integral.log_terms.is_empty() {
        return Err(PartnerError::NonRationalV);
    }
    let v = -&Rf::rehomogenize(&integral.rational_part, -1).recip()?;
    let fields = partner_fields_from_v(&v)?;
    debug_assert_eq!(fields.phi, normalization.normalized_field);
    let partner = conjugate_field(&normalization.a.recip()?, &fields.psi)?;
    if !commute_check(f, &partner).commute {
        return Err(PartnerError::NotCommuting);
    }
    Ok(CommutingFamily { field: f.clone(), partner, normalization, v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{field_of_rational_flow, lie_bracket, RationalFlow};
    use num_traits::Zero;

    fn rf(s: &str) -> Rf {
        s.parse().unwrap()
    }

    fn vf(a: &str, b: &str) -> VectorField {
        VectorField::parse(a, b).unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn normalization_examples() {
        let s = normalize_to_horizontal(&vf("x^2 - 2*x*y + y^2", "x^2 - 2*x*y + y^2")).unwrap();
        assert_eq!(s.normalized_field, vf("-(x-y)^2", "0"));
        assert_eq!(s.a.ratio_constant(&rf("y/(x-y)")).map(|c| c != Q::zero()), Some(true));
        let h = normalize_to_horizontal(&vf("x^2 + y^2", "0")).unwrap();
        assert_eq!(h.a, Rf::one());
        assert_eq!(h.normalized_field, vf("x^2 + y^2", "0"));
        let cubic = vf("2*x^2 + x*y", "x*y + 2*y^2");
        let c = normalize_to_horizontal(&cubic).unwrap();
        assert!(c.normalized_field.second().is_zero());
        assert_eq!(c.normalized_field, conjugate_field(&c.a, &cubic).unwrap());
        assert_eq!(
            normalize_to_horizontal(&vf("x^2 + y^2", "x*y")),
            Err(PartnerError::NotLevelOne)
        );
        assert_eq!(normalize_to_horizontal(&vf("x^2", "x*y")), Err(PartnerError::NotLevelOne));
    }

    #[test]
    fn cubic_chart_of_the_worked_example() {
        // The other chart lands on the ψ side with second component −y².
        let cubic = vf("2*x^2 + x*y", "x*y + 2*y^2");
        let g = conjugate_field(&rf("y*(y - 3*x)/(6*x^2)"), &cubic).unwrap();
        let v = rf("(3*x - y)*y^3/(x - y)^3");
        let p = partner_fields_from_v(&v).unwrap();
        assert_eq!(p.psi, g);
        assert_eq!(g, vf("(4*x*y^2 - y^3 - 9*x^2*y)/(6*x)", "-y^2"));
    }

    #[test]
    fn monomial_partner_matches_closed_forms() {
        let p = partner_fields_from_v(&rf("x^2/y")).unwrap();
        assert_eq!(p.phi, vf("x^3/(2*y)", "0"));
        assert_eq!(p.psi, vf("-x*y/2", "-y^2"));
        assert!(p.independent);
        // Oracle: fields of the explicit flows x(1 − x²/y)^{-1/2} • y and
        // x(y + 1)^{-1/2} • y/(y + 1), expanded to first order by hand:
        // x(1 − z x²/y)^{-1/2} = x + z x³/(2y) + O(z²),
        // x(1 + zy)^{-1/2} = x − z xy/2 + O(z²), y/(1 + zy) = y − z y² + O(z²).
        assert_eq!(p.phi.first(), &rf("x^3/(2*y)"));
        assert_eq!(p.psi.first(), &rf("-x*y/2"));
    }

    #[test]
    fn linear_v_partner() {
        let p = partner_fields_from_v(&rf("x - y")).unwrap();
        assert_eq!(p.phi, vf("(x-y)^2", "0"));
        assert_eq!(p.psi, vf("-y^2", "-y^2"));
        let (a, b) = lie_bracket(&p.phi, &p.psi);
        assert!(a.is_zero() && b.is_zero());
        // Oracle: the fields of the rational flows solving the implicit equations.
        let u = RationalFlow::parse("y + (x-y)/(1-x+y)", "y").unwrap();
        let a = RationalFlow::parse("x - y^2/(y+1)", "y/(y+1)").unwrap();
        assert_eq!(field_of_rational_flow(&u).unwrap(), p.phi);
        assert_eq!(field_of_rational_flow(&a).unwrap(), p.psi);
    }

    #[test]
    fn partner_examples_commute() {
        for v in ["x^2/y", "x - y", "x^3/y^2", "(3*x - y)*y^3/(x - y)^3", "x", "x^2/(x+y)"] {
            let p = partner_fields_from_v(&rf(v)).unwrap();
            assert!(commute_check(&p.phi, &p.psi).commute, "{v}");
            assert!(p.phi.second().is_zero());
            assert_eq!(p.psi.second(), &rf("-y^2"));
            assert!(p.independent, "{v}");
        }
        assert_eq!(partner_fields_from_v(&rf("3*y")), Err(PartnerError::ConstantInX));
        assert!(matches!(partner_fields_from_v(&rf("x^2")), Err(PartnerError::Field(_))));
    }

    #[test]
    fn degenerate_v_is_still_independent() {
        let p = partner_fields_from_v(&rf("2*x")).unwrap();
        assert_eq!(p.phi, vf("2*x^2", "0"));
        assert_eq!(p.psi, vf("0", "-y^2"));
        assert!(p.independent);
        assert!(proportional(&p.phi, &p.phi.scale(&q(-3, 2))));
    }

    #[test]
    fn implicit_equations_for_linear_v() {
        let b = partner_bundle(&rf("x - y")).unwrap();
        assert_eq!(b.a_equation.degree(), Some(1));
        assert!(b.a_equation.eval(&rf("x - y^2/(y+1)")).is_zero());
        assert!(b.u_equation.eval(&rf("y + (x-y)/(1-x+y)")).is_zero());
    }

    #[test]
    fn implicit_equations_for_monomial_v() {
        let b = partner_bundle(&rf("x^2/y")).unwrap();
        // a² (y + 1) = x² and u² (y − x²) = x² y
        assert_eq!(b.a_equation, Alg::new(vec![rf("-x^2"), Rf::zero(), rf("y + 1")]));
        let u = b.u_equation.scale(&b.u_equation.lc().recip().unwrap());
        assert_eq!(u, Alg::new(vec![rf("x^2*y/(x^2 - y)"), Rf::zero(), Rf::one()]));
    }

    #[test]
    fn scaled_equations_vanish_at_the_base_point() {
        for v in ["x^2/y", "x - y", "x^3/y^2", "(3*x - y)*y^3/(x - y)^3"] {
            let b = partner_bundle(&rf(v)).unwrap();
            assert!(b.a_equation.degree() >= Some(1) && b.u_equation.degree() >= Some(1));
            let z0 = Q::zero();
            assert!(b.a_equation_scaled(&z0).unwrap().eval(&Rf::x()).is_zero(), "{v}");
            assert!(b.u_equation_scaled(&z0).eval(&Rf::x()).is_zero(), "{v}");
            assert_eq!(b.a_equation_scaled(&q(1, 1)).unwrap(), b.a_equation);
            assert_eq!(b.u_equation_scaled(&q(1, 1)), b.u_equation);
        }
    }

    #[test]
    fn cubic_a_equation_has_degree_three() {
        let b = partner_bundle(&rf("(3*x - y)*y^3/(x - y)^3")).unwrap();
        assert_eq!(b.a_equation.degree(), Some(3));
        assert_eq!(b.u_equation.degree(), Some(3));
    }

    #[test]
    fn combined_orbit_specializations() {
        for v in ["x^2/y", "x - y", "x^3/y^2", "(3*x - y)*y^3/(x - y)^3"] {
            let v = rf(v);
            let b = partner_bundle(&v).unwrap();
            assert_eq!(b.combined_orbit.specialize(&q(1, 1), &q(0, 1)).unwrap(), Rf::y());
            assert_eq!(b.combined_orbit.specialize(&q(0, 1), &q(1, 1)).unwrap(), v);
            // Invariance along z·φ + w·ψ.
            let (z, w) = (q(3, 5), q(-7, 2));
            let o = b.combined_orbit.specialize(&z, &w).unwrap();
            let g = b.phi_field.combine(&z, &b.psi_field, &w);
            let drift = &(&o.dx() * g.first()) + &(&o.dy() * g.second());
            assert!(drift.is_zero());
        }
    }

    #[test]
    fn bundle_serializes_as_strings() {
        let b = partner_bundle(&rf("x - y")).unwrap();
        let j = serde_json::to_value(&b).unwrap();
        assert_eq!(j["V"], "x - y");
        assert_eq!(j["combined_orbit"], "(x - y)*y/(z*(x - y) + w*y)");
        assert!(j["a_equation"].as_str().unwrap().contains('a'));
    }

    #[test]
    fn families_of_worked_examples() {
        let s = commuting_family(&vf("(x-y)^2", "(x-y)^2")).unwrap();
        assert!(s.contains(&vf("x^2 - y^2", "2*x*y - 2*y^2")));
        assert!(!s.contains(&vf("x^2 - y^2", "2*x*y - y^2")));
        let quad = vf("2*x^2 - 3*x*y", "x*y - 2*y^2");
        let f = commuting_family(&quad).unwrap();
        assert!(f.contains(&vf("y^3/x", "y^3/x")));
        let cubic = vf("2*x^2 + x*y", "x*y + 2*y^2");
        let c = commuting_family(&cubic).unwrap();
        let g = vf("-x*y^3/(x-y)^2", "(3*x*y^3 - 2*y^4)/(x-y)^2");
        assert!(c.contains(&g));
        // Mirror image under (x, y) ↦ (y, x) equals −F − G.
        let mirror = vf("(3*x^3*y - 2*x^4)/(x-y)^2", "-x^3*y/(x-y)^2");
        assert_eq!(cubic.combine(&q(-1, 1), &g, &q(-1, 1)), mirror);
        assert!(c.contains(&mirror));
        assert_eq!(commuting_family(&vf("x^2", "x*y")), Err(PartnerError::NotLevelOne));
    }

    #[test]
    fn family_members_commute() {
        let c = commuting_family(&vf("2*x^2 + x*y", "x*y + 2*y^2")).unwrap();
        for (z, w) in [(q(1, 1), q(0, 1)), (q(2, 3), q(-5, 4)), (q(0, 1), q(1, 1))] {
            let h = c.field.combine(&z, &c.partner, &w);
            assert!(commute_check(&c.field, &h).commute);
            assert_eq!(c.coordinates(&h), Some((z, w)));
        }
    }
}
