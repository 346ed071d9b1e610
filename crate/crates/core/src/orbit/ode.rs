//! Rational solutions of `a f' + b f = c`.

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::integrate::hermite_logpart;
use super::OrbitError;
use crate::algebra::linear::solve_columns;
use crate::algebra::{rational_roots, resultant_linear_pencil, squarefree_factor};
use crate::{Poly1, Q, Rf1};

/// Search limits; exceeding one is reported as undecided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OdeLimits {
    pub max_pole_order: u32,
    pub max_numerator_degree: u32,
}

impl Default for OdeLimits {
    fn default() -> Self {
        Self { max_pole_order: 30, max_numerator_degree: 60 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalOdeProblem {
    pub a: Rf1,
    pub b: Rf1,
    pub c: Rf1,
}

impl RationalOdeProblem {
    pub fn new(a: Rf1, b: Rf1, c: Rf1) -> Result<Self, OrbitError> {
        if a.is_zero() {
            return Err(OrbitError::ZeroLeadingCoefficient);
        }
        Ok(Self { a, b, c })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalOdeSolution {
    #[serde(serialize_with = "ser_opt")]
    pub particular: Option<Rf1>,
    pub homogeneous_rational: bool,
}

fn ser_opt<S: serde::Serializer>(v: &Option<Rf1>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(f) => s.serialize_some(&f.to_string()),
        None => s.serialize_none(),
    }
}

pub fn rational_ode_solve(p: &RationalOdeProblem) -> Result<RationalOdeSolution, OrbitError> {
    rational_ode_solve_with(p, OdeLimits::default())
}

pub fn rational_ode_solve_with(
    p: &RationalOdeProblem,
    limits: OdeLimits,
) -> Result<RationalOdeSolution, OrbitError> {
    let homogeneous_rational = homogeneous_is_rational(p)?;
    let particular = particular_solution(p, limits)?;
    Ok(RationalOdeSolution { particular, homogeneous_rational })
}

/// Whether `exp(−∫ b/a)` is rational.
fn homogeneous_is_rational(p: &RationalOdeProblem) -> Result<bool, OrbitError> {
    let g = -&p.b.checked_div(&p.a)?;
    let res = hermite_logpart(&g).map_err(OrbitError::from_algebra)?;
    if !res.rational_part.is_zero() {
        return Ok(false);
    }
    Ok(res
        .rational_residues()
        .is_some_and(|rs| rs.iter().all(|(_, c)| c.is_integer())))
}

/// Multiplies through by the lcm of the denominators.
fn clear(p: &RationalOdeProblem) -> (Poly1, Poly1, Poly1) {
    let l = [&p.a, &p.b, &p.c]
        .iter()
        .fold(Poly1::one(), |acc, f| {
            let g = acc.gcd(f.den());
            (&acc * f.den()).exact_div(&g).expect("gcd divides")
        });
    let part = |f: &Rf1| &l.exact_div(f.den()).expect("lcm") * f.num();
    (part(&p.a), part(&p.b), part(&p.c))
}

/// Largest positive integer root of `t`, if any.
fn max_positive_integer_root(t: &Poly1) -> Result<Option<u64>, OrbitError> {
    if t.is_zero() {
        return Ok(None);
    }
    let roots = rational_roots(t).map_err(OrbitError::from_algebra)?;
    Ok(roots
        .iter()
        .filter(|r| r.is_integer() && r.is_positive())
        .filter_map(|r| r.to_integer().to_u64())
        .max())
}

/// Splits a squarefree `s` by the order of vanishing of `b` at its roots.
fn split_by_order(s: &Poly1, b: &Poly1) -> Vec<(Poly1, u32)> {
    let mut out = Vec::new();
    let (mut rest, mut bcur) = (s.clone(), b.clone());
    let mut beta = 0;
    while !rest.is_constant() {
        let g = rest.gcd(&bcur);
        let piece = rest.exact_div(&g).expect("gcd divides");
        if !piece.is_constant() {
            out.push((piece, beta));
        }
        bcur = bcur.exact_div(&g).expect("g divides b");
        rest = g;
        beta += 1;
    }
    out
}

/// Universal denominator `∏ q^{m_q}` for the poles of a rational solution.
fn universal_denominator(a: &Poly1, b: &Poly1, limits: OdeLimits) -> Result<Poly1, OrbitError> {
    let mut den = Poly1::one();
    for (s, alpha) in squarefree_factor(a).map_err(OrbitError::from_algebra)?.factors {
        let pieces = if b.is_zero() { vec![(s.clone(), u32::MAX)] } else { split_by_order(&s, b) };
        for (q, beta) in pieces {
            let m = if beta == u32::MAX || alpha - 1 < beta {
                alpha - 1
            } else if alpha - 1 > beta {
                beta
            } else {
                let a1 = a.exact_div(&q.pow(alpha)).map_err(OrbitError::from_algebra)?;
                let b1 = b.exact_div(&q.pow(beta)).map_err(OrbitError::from_algebra)?;
                let ind = resultant_linear_pencil(&q, &b1, &(&a1 * &q.derivative()));
                let r = max_positive_integer_root(&ind)?.unwrap_or(0);
                if r > limits.max_pole_order as u64 {
                    return Err(OrbitError::Undecided(format!("pole order {r} exceeds cap")));
                }
                (alpha - 1).max(r as u32)
            };
            if m > limits.max_pole_order {
                return Err(OrbitError::Undecided(format!("pole order {m} exceeds cap")));
            }
            den = &den * &q.pow(m);
        }
    }
    Ok(den)
}

/// Bound on `deg f` at infinity.
fn degree_bound(a: &Poly1, b: &Poly1, c: &Poly1) -> Result<i64, OrbitError> {
    let (da, dc) = (a.deg_i(), c.deg_i());
    let mut bound = 0.max(dc - da + 1);
    if !b.is_zero() {
        let db = b.deg_i();
        bound = bound.max(dc - db);
        if da - 1 == db {
            let t = -(b.lc() / a.lc());
            if t.is_integer() {
                let v = t.to_integer().to_i64().ok_or_else(|| {
                    OrbitError::Undecided("indicial exponent at infinity too large".into())
                })?;
                bound = bound.max(v);
            }
        }
    }
    Ok(bound)
}

fn particular_solution(p: &RationalOdeProblem, limits: OdeLimits) -> Result<Option<Rf1>, OrbitError> {
    if p.c.is_zero() {
        return Ok(Some(Rf1::zero()));
    }
    let (a, b, c) = clear(p);
    let den = universal_denominator(&a, &b, limits)?;
    let n = den.deg_i() + degree_bound(&a, &b, &c)?;
    if n < 0 {
        return Ok(None);
    }
    if n > limits.max_numerator_degree as i64 {
        return Err(OrbitError::Undecided(format!("numerator degree {n} exceeds cap")));
    }
    // a (P' D − P D') + b P D = c D^2
    let dd = den.derivative();
    let cols: Vec<Vec<Q>> = (0..=n as usize)
        .map(|k| {
            let xk = Poly1::monomial(Q::from_integer(1.into()), k);
            let e = &(&a * &(&(&xk.derivative() * &den) - &(&xk * &dd))) + &(&(&b * &xk) * &den);
            e.coeffs().to_vec()
        })
        .collect();
    let rhs = &c * &(&den * &den);
    let Some(sol) = solve_columns(&cols, rhs.coeffs()) else {
        return Ok(None);
    };
    let num = Poly1::from_coeffs(sol);
    Ok(Some(Rf1::new(num, den).map_err(OrbitError::from_algebra)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Poly1 {
        Poly1::from_i64s(cs)
    }

    fn poly(cs: &[i64]) -> Rf1 {
        Rf1::from_poly(p(cs))
    }

    fn check(pr: &RationalOdeProblem, f: &Rf1) {
        let lhs = &(&pr.a * &f.derivative()) + &(&pr.b * f);
        assert_eq!(lhs, pr.c);
    }

    #[test]
    fn trivial_antiderivative() {
        let pr = RationalOdeProblem::new(Rf1::one(), Rf1::zero(), Rf1::one()).unwrap();
        let s = rational_ode_solve(&pr).unwrap();
        assert_eq!(s.particular, Some(poly(&[0, 1])));
        assert!(s.homogeneous_rational);
    }

    #[test]
    fn quadratic_field_problem() {
        // rho = x - 2, a = x(x - 2) - (2x^2 - 3x) = -x^2 + x
        let pr = RationalOdeProblem::new(poly(&[0, 1, -1]), poly(&[-2, 1]), Rf1::one()).unwrap();
        let s = rational_ode_solve(&pr).unwrap();
        check(&pr, s.particular.as_ref().unwrap());
        assert!(s.homogeneous_rational);
    }

    #[test]
    fn exponential_homogeneous_solution() {
        // -f' + x f = 1
        let pr = RationalOdeProblem::new(poly(&[-1]), poly(&[0, 1]), Rf1::one()).unwrap();
        let s = rational_ode_solve(&pr).unwrap();
        assert!(!s.homogeneous_rational);
        // Oracle: -b/a = x has a nonzero polynomial part.
        let g = -&pr.b.checked_div(&pr.a).unwrap();
        assert!(!hermite_logpart(&g).unwrap().rational_part.is_zero());
    }

    #[test]
    fn indicial_pole_order() {
        // (x-1)^3 f' + (x-1)^2 f = 1 has f = -1/(x-1)^2.
        let pr = RationalOdeProblem::new(poly(&[-1, 3, -3, 1]), poly(&[1, -2, 1]), Rf1::one()).unwrap();
        let s = rational_ode_solve(&pr).unwrap();
        let f = s.particular.unwrap();
        check(&pr, &f);
        assert_eq!(f, Rf1::new(p(&[-1]), p(&[1, -2, 1])).unwrap());
    }

    #[test]
    fn resonant_pole_from_indicial_root() {
        // x f' - 3 f = x^-3 ... choose f = x^-1 + x^3: x(-x^-2 + 3x^2) - 3x^-1 - 3x^3 = -4/x
        let pr = RationalOdeProblem::new(poly(&[0, 1]), poly(&[-3]), Rf1::new(p(&[-4]), p(&[0, 1])).unwrap())
            .unwrap();
        let s = rational_ode_solve(&pr).unwrap();
        check(&pr, s.particular.as_ref().unwrap());
        assert!(s.homogeneous_rational);
    }

    #[test]
    fn no_rational_solution() {
        // f' = 1/x needs a logarithm.
        let pr = RationalOdeProblem::new(Rf1::one(), Rf1::zero(), Rf1::new(p(&[1]), p(&[0, 1])).unwrap())
            .unwrap();
        assert_eq!(rational_ode_solve(&pr).unwrap().particular, None);
    }

    #[test]
    fn caps_are_reported() {
        let pr = RationalOdeProblem::new(poly(&[0, 1]), poly(&[-3]), Rf1::one()).unwrap();
        let tight = OdeLimits { max_pole_order: 30, max_numerator_degree: 0 };
        assert!(matches!(rational_ode_solve_with(&pr, tight), Err(OrbitError::Undecided(_))));
        assert_eq!(RationalOdeProblem::new(Rf1::zero(), Rf1::one(), Rf1::one()), Err(OrbitError::ZeroLeadingCoefficient));
    }
}
