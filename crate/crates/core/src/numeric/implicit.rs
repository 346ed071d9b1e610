//! Algebraic functions defined implicitly, tracked by Newton continuation in `z`.

use num_complex::Complex64;

use super::expr::{Env, Expr, Sym, DEFAULT_STEPS, STEP_FLOOR};
use super::NumericError;
use crate::Rf;

/// A root `t(x, y, z)` of `relation(t, x, y, z) = 0` with `t = base(x, y)` at `z = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImplicitBranch {
    relation: Expr,
    dt: Expr,
    base: Expr,
}

/// Accepted steps must leave `|P/P'| < RESIDUAL·(1 + |t|)`.
pub const RESIDUAL: f64 = 1e-12;

impl ImplicitBranch {
    pub fn new(relation: Expr, base: Expr) -> Self {
        let dt = relation.diff(Sym::T);
        Self { relation, dt, base }
    }

    pub fn relation(&self) -> &Expr {
        &self.relation
    }

    /// First coordinate of the flow of `(yV/V_x − xy) • (−y²)`:
    /// `V(t, y/(yz + 1)) = V(x, y)`, cleared of denominators.
    pub fn partner_a(v: &Rf) -> Self {
        let (x, y, z, t) = (Expr::var(Sym::X), Expr::var(Sym::Y), Expr::var(Sym::Z), Expr::var(Sym::T));
        let s = y.clone() / (y.clone() * z + Expr::c(1.0));
        let (n, d) = (v.num(), v.den());
        let rel = Expr::from_poly(n, &t, &s) * Expr::from_poly(d, &x, &y)
            - Expr::from_poly(n, &x, &y) * Expr::from_poly(d, &t, &s);
        Self::new(rel, x)
    }

    /// First coordinate of the flow of `(V²/V_x) • 0`: `V/(1 − zV) = V(t, y)`.
    pub fn partner_u(v: &Rf) -> Self {
        let (x, y, z, t) = (Expr::var(Sym::X), Expr::var(Sym::Y), Expr::var(Sym::Z), Expr::var(Sym::T));
        let (n, d) = (v.num(), v.den());
        let nx = Expr::from_poly(n, &x, &y);
        let rel = Expr::from_poly(n, &t, &y) * (Expr::from_poly(d, &x, &y) - z * nx.clone())
            - nx * Expr::from_poly(d, &t, &y);
        Self::new(rel, x)
    }
}

/// Scale-free Newton residual `|P/P'|/(1 + |t|)`.
fn newton_step(ib: &ImplicitBranch, env: &Env) -> Result<(Complex64, f64), NumericError> {
    let p = ib.relation.eval_plain(env)?;
    let dp = ib.dt.eval_plain(env)?;
    if dp.norm() == 0.0 {
        return Err(NumericError::RootCollision);
    }
    let delta = p / dp;
    Ok((delta, delta.norm() / (1.0 + env.t.norm())))
}

/// Newton iteration from `t0`; `None` if it does not settle.
fn correct(ib: &ImplicitBranch, mut env: Env, t0: Complex64) -> Result<Option<Complex64>, NumericError> {
    env.t = t0;
    for _ in 0..40 {
        let (delta, rel) = newton_step(ib, &env)?;
        env.t -= delta;
        if rel < 1e-15 {
            break;
        }
    }
    let (_, rel) = newton_step(ib, &env)?;
    Ok((rel < RESIDUAL && env.t.is_finite()).then_some(env.t))
}

/// Value of the branch at `(x, y, z)`.
pub fn implicit_eval(ib: &ImplicitBranch, x: f64, y: f64, z: f64) -> Result<Complex64, NumericError> {
    implicit_eval_env(ib, Env::real(x, y, z))
}

pub fn implicit_eval_env(ib: &ImplicitBranch, env: Env) -> Result<Complex64, NumericError> {
    let target = env.z;
    let at = |s: f64| Env { z: target * s, ..env };
    let base = ib.base.eval_plain(&env)?;
    let mut t = correct(ib, at(0.0), base)?.ok_or(NumericError::NewtonFailed)?;
    if (t - base).norm() > 1e-8 * (1.0 + base.norm()) {
        return Err(NumericError::NewtonFailed);
    }
    let (mut s, mut h) = (0.0, 1.0 / DEFAULT_STEPS as f64);
    let mut slope = Complex64::new(0.0, 0.0);
    while s < 1.0 {
        let step = h.min(1.0 - s);
        let predicted = t + slope * step;
        match correct(ib, at(s + step), predicted)? {
            // Stay on the same root: the correction must be small against the step.
            Some(next) if (next - predicted).norm() <= 0.1 * (1.0 + t.norm()) => {
                slope = (next - t) / step;
                t = next;
                s += step;
                h = (2.0 * h).min(1.0 / DEFAULT_STEPS as f64);
            }
            _ => {
                h /= 2.0;
                if h < STEP_FLOOR {
                    return Err(NumericError::StepUnderflow);
                }
            }
        }
    }
    Ok(t)
}

/// Scaled partner coordinates `(a(xz, yz)/z, u(xz, yz)/z)` for orbit function `V`.
pub fn solve_partner_pointwise(v: &Rf, x: f64, y: f64, z: f64) -> Result<(Complex64, Complex64), NumericError> {
    let a = implicit_eval(&ImplicitBranch::partner_a(v), x, y, z)?;
    let u = implicit_eval(&ImplicitBranch::partner_u(v), x, y, z)?;
    Ok((a, u))
}

/// `u(a(x, y), y/(y + 1))` against `a(u(x, y), y)` at unit time, as a relative gap.
pub fn partner_identity_residual(v: &Rf, x: f64, y: f64) -> Result<f64, NumericError> {
    let (pa, pu) = (ImplicitBranch::partner_a(v), ImplicitBranch::partner_u(v));
    let real = |t: Complex64| super::flows::as_real(t);
    let a = real(implicit_eval(&pa, x, y, 1.0)?)?;
    let u = real(implicit_eval(&pu, x, y, 1.0)?)?;
    let lhs = real(implicit_eval(&pu, a, y / (y + 1.0), 1.0)?)?;
    let rhs = real(implicit_eval(&pa, u, y, 1.0)?)?;
    Ok(super::verify::rel_diff(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(s: &str) -> Rf {
        s.parse().unwrap()
    }

    #[test]
    fn linear_relation_is_exact() {
        let ib = ImplicitBranch::new(Expr::parse("t - (x - z*y^2/(z*y+1))").unwrap(), Expr::parse("x").unwrap());
        let v = implicit_eval(&ib, 0.8, 0.3, 1.0).unwrap();
        assert!((v - (0.8 - 0.09 / 1.3)).norm() < 1e-14);
    }

    #[test]
    fn rational_partner_values() {
        let v = rf("x - y");
        let (x, y, z) = (0.6, 0.25, 0.7);
        let (a, u) = solve_partner_pointwise(&v, x, y, z).unwrap();
        assert!((a - (x - z * y * y / (y * z + 1.0))).norm() < 1e-13);
        // u(xz, yz)/z for u = y + (x − y)/(1 − x + y).
        let u_exact = y + (x - y) / (1.0 - z * (x - y));
        assert!((u - u_exact).norm() < 1e-13);
        let (a0, u0) = solve_partner_pointwise(&v, x, y, 0.0).unwrap();
        assert_eq!((a0.re, u0.re), (x, x));
    }

    #[test]
    fn monomial_partner_matches_radicals() {
        let v = rf("x^2/y");
        let (x, y, z) = (0.5, 0.8, 0.9);
        let (a, u) = solve_partner_pointwise(&v, x, y, z).unwrap();
        assert!((u - x * (1.0 - z * x * x / y).powf(-0.5)).norm() < 1e-12);
        assert!((a - x * (1.0 + z * y).powf(-0.5)).norm() < 1e-12);
    }

    #[test]
    fn partners_commute_pointwise() {
        for (v, x, y) in [("x - y", 0.5, 0.2), ("x^2/y", 0.4, 0.9)] {
            assert!(partner_identity_residual(&rf(v), x, y).unwrap() < 1e-12);
        }
    }

    #[test]
    fn continuation_keeps_the_boundary_branch() {
        // t^2 = x^2 (1 + z): both ±x(1+z)^{1/2} are roots; the branch starts at +x.
        let ib = ImplicitBranch::new(Expr::parse("t^2 - x^2*(1 + z)").unwrap(), Expr::parse("x").unwrap());
        let v = implicit_eval(&ib, -1.5, 0.0, 3.0).unwrap();
        assert!((v - (-3.0)).norm() < 1e-12);
    }
}
