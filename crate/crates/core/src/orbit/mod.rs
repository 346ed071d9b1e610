//! Orbit functions, level classification and the Wronskian identities.

mod integrate;
mod ode;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::fields::{commute_check, is_level0, lie_bracket, FieldError, VectorField};
use crate::{Poly1, Q, Rf, Rf1};

pub use integrate::{hermite_logpart, IntegralResult, LogTerm};
pub use ode::{
    rational_ode_solve, rational_ode_solve_with, OdeLimits, RationalOdeProblem, RationalOdeSolution,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("the field has level 0 (xϱ − yϖ = 0)")]
    LevelZero,
    #[error("the field is not of level 1")]
    NotLevelOne,
    #[error("ϱ vanishes identically")]
    ZeroRho,
    #[error("leading coefficient of the equation is zero")]
    ZeroLeadingCoefficient,
    #[error("integral is not rational; the orbit function does not match the field")]
    NonRationalIntegral,
    #[error("no constant makes the candidate commute")]
    NoAdmissibleConstant,
    #[error("undecided: {0}")]
    Undecided(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Algebra(AlgebraError),
}

impl OrbitError {
    pub(crate) fn from_algebra(e: AlgebraError) -> Self {
        match e {
            AlgebraError::CoefficientTooLarge => {
                OrbitError::Undecided("rational root search exceeded coefficient limit".into())
            }
            e => OrbitError::Algebra(e),
        }
    }
}

impl From<AlgebraError> for OrbitError {
    fn from(e: AlgebraError) -> Self {
        Self::from_algebra(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Zero,
    Finite(u32),
    NotFinite,
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Level::Zero => s.serialize_u32(0),
            Level::Finite(n) => s.serialize_u32(*n),
            Level::NotFinite => s.serialize_str("not-finite"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residue {
    #[serde(serialize_with = "ser_display")]
    pub factor: Poly1,
    #[serde(serialize_with = "ser_display")]
    pub value: Q,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &Option<T>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(t) => s.serialize_some(&t.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub level: Level,
    /// `W^N`, normalized, when the level is a finite `N > 0`.
    pub orbit_power: Option<Rf>,
    pub trace: Option<Rf>,
    #[serde(serialize_with = "ser_opt_display")]
    pub logderiv: Option<Rf1>,
    pub residues: Vec<Residue>,
    /// Log terms with irrational residues, kept for diagnostics.
    pub algebraic_terms: Vec<LogTerm>,
}

impl OrbitReport {
    /// `W` itself for level-1 fields.
    pub fn orbit(&self) -> Option<&Rf> {
        match self.level {
            Level::Finite(1) => self.orbit_power.as_ref(),
            _ => None,
        }
    }
}

fn level_zero_report() -> OrbitReport {
    OrbitReport {
        level: Level::Zero,
        orbit_power: None,
        trace: None,
        logderiv: None,
        residues: Vec::new(),
        algebraic_terms: Vec::new(),
    }
}

/// Classifies the field and computes `W^N` from `W_x/W = ϱ/(xϱ − yϖ)`.
pub fn orbit_function(f: &VectorField) -> Result<OrbitReport, OrbitError> {
    if is_level0(f) {
        return Ok(level_zero_report());
    }
    let k = f.kernel();
    let g = f.second().checked_div(&k)?.dehomogenize();
    let integral = hermite_logpart(&g)?;
    let trace = Some(orbit_trace(f)?);
    let mut report = OrbitReport {
        level: Level::NotFinite,
        orbit_power: None,
        trace,
        logderiv: Some(g),
        residues: Vec::new(),
        algebraic_terms: Vec::new(),
    };
    for t in &integral.log_terms {
        match t {
            LogTerm::Rational { coeff, arg } => {
                report.residues.push(Residue { factor: arg.clone(), value: coeff.clone() })
            }
            LogTerm::Algebraic { .. } => report.algebraic_terms.push(t.clone()),
        }
    }
    // Irrational residues cannot be multiples of 1/N, so no power of W is rational.
    if !integral.rational_part.is_zero() || !report.algebraic_terms.is_empty() {
        return Ok(report);
    }
    let n = report
        .residues
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, r| acc.lcm(r.value.denom()));
    let n = n
        .to_u32()
        .ok_or_else(|| OrbitError::Undecided("level exceeds u32".into()))?;
    let big_n = Q::from_integer(n.into());
    let mut num = Poly1::one();
    let mut den = Poly1::one();
    for r in &report.residues {
        let e = (&r.value * &big_n).to_integer();
        let p = e.abs().to_u32().ok_or_else(|| OrbitError::Undecided("exponent too large".into()))?;
        if e.is_positive() {
            num = &num * &r.factor.pow(p);
        } else {
            den = &den * &r.factor.pow(p);
        }
    }
    let w = Rf::rehomogenize(&Rf1::new(num, den)?, n as i64).numerator_monic();
    report.level = Level::Finite(n);
    report.orbit_power = Some(w);
    Ok(report)
}

/// `T = (2ϱ + xϱ_x − yϖ_x)/(xϱ − yϖ)`.
pub fn orbit_trace(f: &VectorField) -> Result<Rf, OrbitError> {
    let k = f.kernel();
    if k.is_zero() {
        return Err(OrbitError::LevelZero);
    }
    let (p, r) = (f.first(), f.second());
    let num = &(&r.scale(&Q::from_integer(2.into())) + &(&Rf::x() * &r.dx())) - &(&Rf::y() * &p.dx());
    Ok(num.checked_div(&k)?)
}

/// The level-1 criterion: `f ϱ + f' (xϱ − ϖ) = 1` at `y = 1` has only rational solutions.
pub fn level1_check(f: &VectorField) -> Result<bool, OrbitError> {
    let (_, sol) = level1_problem(f)?;
    Ok(sol.particular.is_some() && sol.homogeneous_rational)
}

pub fn level1_problem(f: &VectorField) -> Result<(RationalOdeProblem, RationalOdeSolution), OrbitError> {
    if is_level0(f) {
        return Err(OrbitError::LevelZero);
    }
    let p = f.first().dehomogenize();
    let r = f.second().dehomogenize();
    let x = Rf1::from_poly(Poly1::x());
    let a = &(&x * &r) - &p;
    let pr = RationalOdeProblem::new(a, r, Rf1::one())?;
    let sol = rational_ode_solve(&pr)?;
    Ok((pr, sol))
}

/// `β = −ϱ ∫ yϱ_x W/ϱ² dx` with zero integration constant.
pub fn beta_from_w(f: &VectorField, w: &Rf) -> Result<Rf, OrbitError> {
    let r = f.second();
    if r.is_zero() {
        return Err(OrbitError::ZeroRho);
    }
    crate::fields::require_degree(w, 1, "W")?;
    let h = (&(&Rf::y() * &r.dx()) * w).checked_div(&(r * r))?;
    let res = hermite_logpart(&h.dehomogenize())?;
    if !res.log_terms.is_empty() {
        return Err(OrbitError::NonRationalIntegral);
    }
    Ok(-&(r * &Rf::rehomogenize(&res.rational_part, 0)))
}

/// `α = (βϖ + c W (xϱ − yϖ))/ϱ` with the unique `c` making `α • β` commute with `F`.
pub fn alpha_from_wronskian(f: &VectorField, w: &Rf, beta: &Rf) -> Result<(Rf, Q), OrbitError> {
    let r = f.second();
    if r.is_zero() {
        return Err(OrbitError::ZeroRho);
    }
    let base = (beta * f.first()).checked_div(r)?;
    let step = (w * &f.kernel()).checked_div(r)?;
    // The bracket is affine in c: B(c) = B0 + c B1.
    let g0 = VectorField::new(base.clone(), beta.clone())?;
    let g1 = VectorField::new(step.clone(), Rf::zero())?;
    let (a0, b0) = lie_bracket(f, &g0);
    let (a1, b1) = lie_bracket(f, &g1);
    let c = if a1.is_zero() && b1.is_zero() {
        if !(a0.is_zero() && b0.is_zero()) {
            return Err(OrbitError::NoAdmissibleConstant);
        }
        Q::zero()
    } else {
        let from = |n: &Rf, d: &Rf| -> Option<Q> {
            if d.is_zero() {
                n.is_zero().then(Q::zero)
            } else {
                (-n).ratio_constant(d)
            }
        };
        let ca = from(&a0, &a1);
        let cb = from(&b0, &b1);
        let c = match (ca, cb, a1.is_zero(), b1.is_zero()) {
            (Some(x), _, false, true) => x,
            (_, Some(y), true, false) => y,
            (Some(x), Some(y), false, false) if x == y => x,
            _ => return Err(OrbitError::NoAdmissibleConstant),
        };
        if (a1.is_zero() && !a0.is_zero()) || (b1.is_zero() && !b0.is_zero()) {
            return Err(OrbitError::NoAdmissibleConstant);
        }
        c
    };
    let alpha = &base + &step.scale(&c);
    let g = VectorField::new(alpha.clone(), beta.clone())?;
    if !commute_check(f, &g).commute {
        return Err(OrbitError::NoAdmissibleConstant);
    }
    Ok((alpha, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Homogeneity;

    fn vf(a: &str, b: &str) -> VectorField {
        VectorField::parse(a, b).unwrap()
    }

    fn rf(s: &str) -> Rf {
        s.parse().unwrap()
    }

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn orbit_examples() {
        let s = orbit_function(&vf("(x-y)^2", "(x-y)^2")).unwrap();
        assert_eq!(s.level, Level::Finite(1));
        assert_eq!(s.orbit(), Some(&rf("x - y")));
        let t = orbit_function(&vf("2*x^2 - 3*x*y", "x*y - 2*y^2")).unwrap();
        assert_eq!(t.orbit(), Some(&rf("x^-2*(x-y)*y^2")));
        let c = orbit_function(&vf("(4*x*y^2 - y^3 - 9*x^2*y)/(6*x)", "-y^2")).unwrap();
        let w = c.orbit().unwrap();
        assert!(w.ratio_constant(&rf("(3*x - y)*y^3/(x-y)^3")).is_some());
        assert_eq!(w.num().lc(), q(1));
        assert_eq!(orbit_function(&vf("x^2", "x*y")).unwrap().level, Level::Zero);
    }

    #[test]
    fn orbit_satisfies_its_equation() {
        for (a, b) in [("(x-y)^2", "(x-y)^2"), ("2*x^2 - 3*x*y", "x*y - 2*y^2"), ("x^2 + x*y", "2*y^2")] {
            let f = vf(a, b);
            let rep = orbit_function(&f).unwrap();
            let Level::Finite(n) = rep.level else { panic!("{a}") };
            let wn = rep.orbit_power.unwrap();
            // N ϱ W^N + (W^N)_x (yϖ − xϱ) = 0
            let lhs = &(&f.second().scale(&q(n as i64)) * &wn) - &(&wn.dx() * &f.kernel());
            assert!(lhs.is_zero(), "{a}");
            assert_eq!(wn.homogeneity(), Homogeneity::Degree(n as i64));
        }
    }

    #[test]
    fn higher_level_and_not_finite() {
        // W = x^{1/2} y^{1/2}: ϖ•ϱ = x^2 • -xy has W_x/W = 1/(2x).
        let f = vf("x^2", "-x*y");
        let rep = orbit_function(&f).unwrap();
        assert_eq!(rep.level, Level::Finite(2));
        assert_eq!(rep.orbit_power, Some(rf("x*y")));
        // (x^2 + y^2) • xy: W_x/W = x/(x^2 - x^2 - 1)·... has a polynomial part.
        let g = orbit_function(&vf("x^2 + y^2", "x*y")).unwrap();
        assert_eq!(g.level, Level::NotFinite);
        // ϱ/(xϱ − yϖ) = 1/(x^2 + 1) at y = 1 for x ϱ − y ϖ = (x^2+y^2) y ... complex residues.
        let h = orbit_function(&vf("x*y - x^2 - y^2", "y^2")).unwrap();
        assert_eq!(h.level, Level::NotFinite);
        assert!(!h.algebraic_terms.is_empty());
    }

    #[test]
    fn traces() {
        let s = vf("(x-y)^2", "(x-y)^2");
        assert_eq!(orbit_trace(&s).unwrap(), rf("4/(x-y)"));
        let h = vf("x^2 - 3*y^2", "0");
        assert_eq!(orbit_trace(&h).unwrap(), &h.first().dx() / h.first());
        let t = orbit_trace(&vf("2*x^2 - 3*x*y", "x*y - 2*y^2")).unwrap();
        assert_eq!(t.homogeneity(), Homogeneity::Degree(-1));
        assert_eq!(orbit_trace(&vf("x^2", "x*y")), Err(OrbitError::LevelZero));
    }

    #[test]
    fn level_one_criterion() {
        assert!(level1_check(&vf("2*x^2 - 3*x*y", "x*y - 2*y^2")).unwrap());
        assert!(level1_check(&vf("2*x^2 + x*y", "x*y + 2*y^2")).unwrap());
        assert!(!level1_check(&vf("x^2 + y^2", "x*y")).unwrap());
        assert!(level1_check(&vf("(x-y)^2", "(x-y)^2")).unwrap());
        assert_eq!(level1_check(&vf("x^2", "x*y")), Err(OrbitError::LevelZero));
    }

    #[test]
    fn beta_examples() {
        let s = vf("(x-y)^2", "(x-y)^2");
        let b = beta_from_w(&s, &rf("x - y")).unwrap();
        assert_eq!(b, rf("2*x*y - 2*y^2"));
        let f = vf("2*x^2 - 3*x*y", "x*y - 2*y^2");
        let b = beta_from_w(&f, &rf("x^-2*(x-y)*y^2")).unwrap();
        assert_eq!(b, rf("y^3/(2*x)"));
        let (a, _) = alpha_from_wronskian(&f, &rf("x^-2*(x-y)*y^2"), &b).unwrap();
        assert!(commute_check(&f, &vf(&a.to_string(), &b.to_string())).commute);
        assert!(beta_from_w(&vf("x^2", "y^2"), &rf("y")).unwrap().is_zero());
        assert_eq!(beta_from_w(&vf("x^2", "0"), &rf("y")), Err(OrbitError::ZeroRho));
    }

    #[test]
    fn alpha_examples() {
        let s = vf("(x-y)^2", "(x-y)^2");
        let (a, c) = alpha_from_wronskian(&s, &rf("x - y"), &rf("2*x*y - 2*y^2")).unwrap();
        assert_eq!((a, c), (rf("x^2 - y^2"), q(1)));
        let f = vf("2*x^2 - 3*x*y", "x*y - 2*y^2");
        let w = rf("x^-2*(x-y)*y^2");
        let (a, c) = alpha_from_wronskian(&f, &w, &rf("y^3/x")).unwrap();
        assert_eq!((a.clone(), c.clone()), (rf("y^3/x"), q(2)));
        // Oracle: αϱ − βϖ = 2 W (xϱ − yϖ) by expansion.
        let lhs = &(&a * f.second()) - &(&rf("y^3/x") * f.first());
        assert_eq!(lhs, (&w * &f.kernel()).scale(&q(2)));
        let (a, c) = alpha_from_wronskian(&f, &w, f.second()).unwrap();
        assert_eq!((&a, c), (f.first(), q(0)));
    }
}
