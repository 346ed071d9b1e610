//! Evaluators for `φ^z(x, y)`.

use std::sync::Arc;

use num_complex::Complex64;

use super::expr::{branch_eval_env, Env, Expr, Sym};
use super::implicit::{implicit_eval_env, ImplicitBranch};
use super::ode::{dopri5, OdeOptions};
use super::NumericError;
use crate::algebra::Scalar;
use crate::fields::{BirMap, VectorField};
use crate::partner::CommutingFamily;
use crate::Rf;

/// Accepts a complex value as real when `|Im| < 1e-9 (1 + |Re|)`.
pub fn as_real(v: Complex64) -> Result<f64, NumericError> {
    if v.im.abs() < 1e-9 * (1.0 + v.re.abs()) {
        Ok(v.re)
    } else {
        Err(NumericError::NotReal)
    }
}

/// The time-`z` map of a projective flow.
pub trait FlowMap: Send + Sync {
    fn apply(&self, x: f64, y: f64, z: f64) -> Result<(f64, f64), NumericError>;
}

/// Closed form `u^z • v^z` written in `x, y, z`.
#[derive(Clone, Debug)]
pub struct ClosedFlow {
    u: Expr,
    v: Expr,
}

impl ClosedFlow {
    pub fn new(u: Expr, v: Expr) -> Self {
        Self { u, v }
    }

    pub fn parse(u: &str, v: &str) -> Result<Self, NumericError> {
        Ok(Self::new(Expr::parse(u)?, Expr::parse(v)?))
    }

    pub fn identity() -> Self {
        Self::new(Expr::var(Sym::X), Expr::var(Sym::Y))
    }
}

impl FlowMap for ClosedFlow {
    fn apply(&self, x: f64, y: f64, z: f64) -> Result<(f64, f64), NumericError> {
        let env = Env::real(x, y, z);
        Ok((as_real(branch_eval_env(&self.u, env)?)?, as_real(branch_eval_env(&self.v, env)?)?))
    }
}

/// First coordinate from an implicit branch, second from an expression in `t`, `x`, `y`, `z`.
#[derive(Clone, Debug)]
pub struct ImplicitFlow {
    first: ImplicitBranch,
    second: Expr,
}

impl ImplicitFlow {
    pub fn new(first: ImplicitBranch, second: Expr) -> Self {
        Self { first, second }
    }

    /// Flow of `(V²/V_x) • 0`.
    pub fn partner_phi(v: &Rf) -> Self {
        Self::new(ImplicitBranch::partner_u(v), Expr::var(Sym::Y))
    }

    /// Flow of `(yV/V_x − xy) • (−y²)`.
    pub fn partner_psi(v: &Rf) -> Self {
        let y = Expr::var(Sym::Y);
        Self::new(ImplicitBranch::partner_a(v), y.clone() / (y * Expr::var(Sym::Z) + Expr::c(1.0)))
    }
}

impl FlowMap for ImplicitFlow {
    fn apply(&self, x: f64, y: f64, z: f64) -> Result<(f64, f64), NumericError> {
        let t = implicit_eval_env(&self.first, Env::real(x, y, z))?;
        let env = Env { t, ..Env::real(x, y, z) };
        Ok((as_real(t)?, as_real(self.second.eval_plain(&env)?)?))
    }
}

/// Integrates the field itself.
#[derive(Clone, Debug)]
pub struct OdeFlow {
    field: VectorField,
    tol: f64,
}

impl OdeFlow {
    pub fn new(field: VectorField, tol: f64) -> Self {
        Self { field, tol }
    }
}

impl FlowMap for OdeFlow {
    fn apply(&self, x: f64, y: f64, z: f64) -> Result<(f64, f64), NumericError> {
        flow_integrate(&self.field, x, y, z, self.tol)
    }
}

/// `rf` at a real point, `None` close to a pole.
pub fn eval_rf(f: &Rf, x: f64, y: f64) -> Option<f64> {
    let lift = |c: &crate::Q| c.to_f64_lossy();
    let d = f.den().eval_with(x, y, lift);
    let scale = 1.0 + x.abs().max(y.abs()).powi(f.den().total_degree().unwrap_or(0) as i32);
    if d.abs() < 1e-13 * scale {
        return None;
    }
    Some(f.num().eval_with(x, y, lift) / d)
}

/// Solves `d/dz X = F(X)` from `(x, y)` for time `z`.
pub fn flow_integrate(f: &VectorField, x: f64, y: f64, z: f64, tol: f64) -> Result<(f64, f64), NumericError> {
    let rhs = |_, p: &[f64; 2]| Some([eval_rf(f.first(), p[0], p[1])?, eval_rf(f.second(), p[0], p[1])?]);
    let out = dopri5(rhs, 0.0, [x, y], z, OdeOptions::with_tol(tol))?;
    Ok((out[0], out[1]))
}

/// `m ∘ inner ∘ m⁻¹`.
pub struct Conjugated {
    inner: Arc<dyn FlowMap>,
    map: BirMap,
    inverse: BirMap,
}

impl Conjugated {
    pub fn new(inner: Arc<dyn FlowMap>, map: BirMap) -> Self {
        let inverse = map.inverse();
        Self { inner, map, inverse }
    }
}

impl FlowMap for Conjugated {
    fn apply(&self, x: f64, y: f64, z: f64) -> Result<(f64, f64), NumericError> {
        let (a, b) = self.inverse.apply_f64(x, y).map_err(|_| NumericError::Singular)?;
        let (c, d) = self.inner.apply(a, b, z)?;
        self.map.apply_f64(c, d).map_err(|_| NumericError::Singular)
    }
}

/// `first^{p z} ∘ second^{q z}`.
pub struct Composite {
    first: (Arc<dyn FlowMap>, f64),
    second: (Arc<dyn FlowMap>, f64),
}

impl Composite {
    pub fn new(first: Arc<dyn FlowMap>, p: f64, second: Arc<dyn FlowMap>, q: f64) -> Self {
        Self { first: (first, p), second: (second, q) }
    }
}

impl FlowMap for Composite {
    fn apply(&self, x: f64, y: f64, z: f64) -> Result<(f64, f64), NumericError> {
        let (a, b) = self.second.0.apply(x, y, self.second.1 * z)?;
        self.first.0.apply(a, b, self.first.1 * z)
    }
}

/// Flow of `c·field + d·partner`, evaluated in the horizontal chart of the family.
pub fn family_flow(family: &CommutingFamily, c: f64, d: f64) -> Conjugated {
    let phi: Arc<dyn FlowMap> = Arc::new(ImplicitFlow::partner_phi(&family.v));
    let psi: Arc<dyn FlowMap> = Arc::new(ImplicitFlow::partner_psi(&family.v));
    Conjugated::new(Arc::new(Composite::new(phi, c, psi, d)), family.normalization.map.clone())
}
