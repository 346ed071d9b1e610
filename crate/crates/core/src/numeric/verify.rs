//! Seeded sampling and the translation, PDE, commutation and orbit checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::expr::{Env, Expr};
use super::flows::{as_real, eval_rf, FlowMap};
use super::NumericError;
use crate::algebra::Scalar;
use crate::fields::{BirMap, VectorField};
use crate::partner::{CombinedOrbit, CommutingFamily};
use crate::Poly;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub count: usize,
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: (f64, f64),
    pub w: (f64, f64),
    /// Minimum estimated distance `|p|/|∇p|` to each singular curve.
    pub exclusion: f64,
    #[serde(skip)]
    pub singular: Vec<Poly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl SamplePlan {
    pub fn new(seed: u64, count: usize, x: (f64, f64), y: (f64, f64), z: (f64, f64), w: (f64, f64)) -> Self {
        Self { seed, count, x, y, z, w, exclusion: 0.05, singular: Vec::new() }
    }

    pub fn avoiding(mut self, curves: impl IntoIterator<Item = Poly>) -> Self {
        self.singular.extend(curves.into_iter().filter(|p| !p.is_constant()));
        self
    }

    fn clear_of_singularities(&self, x: f64, y: f64) -> bool {
        let lift = |c: &crate::Q| c.to_f64_lossy();
        self.singular.iter().all(|p| {
            let v = p.eval_with(x, y, lift).abs();
            let gx = p.dx().eval_with(x, y, lift);
            let gy = p.dy().eval_with(x, y, lift);
            let g = gx.hypot(gy);
            if g == 0.0 {
                v > 0.0
            } else {
                v / g > self.exclusion
            }
        })
    }

    /// Draws the samples; the sequence depends only on the plan.
    pub fn samples(&self) -> Result<Vec<Sample>, NumericError> {
        if self.count == 0 || self.exclusion <= 0.0 {
            return Err(NumericError::Plan("count and exclusion radius must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let draw = |rng: &mut ChaCha8Rng, (a, b): (f64, f64)| if a == b { a } else { rng.gen_range(a..b) };
        let mut out = Vec::with_capacity(self.count);
        for _ in 0..10 * self.count {
            let (x, y) = (draw(&mut rng, self.x), draw(&mut rng, self.y));
            let (z, w) = (draw(&mut rng, self.z), draw(&mut rng, self.w));
            if self.clear_of_singularities(x, y) {
                out.push(Sample { index: out.len(), x, y, z, w });
                if out.len() == self.count {
                    return Ok(out);
                }
            }
        }
        Err(NumericError::Plan(format!("only {} of {} samples clear of singular curves", out.len(), self.count)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub point: [f64; 4],
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub seed: u64,
    pub samples: usize,
    /// Infinite (serialized as `null`) if some evaluation failed.
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<PointRecord>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &PointRecord> {
        self.records.iter().filter(move |r| r.residual.is_none_or(|v| v >= self.tolerance))
    }

    /// Drops the per-point records.
    pub fn summary(mut self) -> Self {
        self.records.clear();
        self
    }
}

/// `|a − b|/max(1, |a|, |b|)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn pair_diff(a: (f64, f64), b: (f64, f64)) -> f64 {
    rel_diff(a.0, b.0).max(rel_diff(a.1, b.1))
}

fn run<F>(check: &str, plan: &SamplePlan, tol: f64, f: F) -> VerificationReport
where
    F: Fn(&Sample) -> Result<f64, NumericError> + Sync,
{
    let samples = match plan.samples() {
        Ok(s) => s,
        Err(e) => {
            return VerificationReport {
                check: check.into(),
                seed: plan.seed,
                samples: 0,
                max_residual: f64::INFINITY,
                tolerance: tol,
                pass: false,
                records: vec![PointRecord { index: 0, point: [0.0; 4], residual: None, error: Some(e.to_string()) }],
            }
        }
    };
    let records: Vec<PointRecord> = samples
        .par_iter()
        .map(|s| {
            let r = f(s);
            PointRecord {
                index: s.index,
                point: [s.x, s.y, s.z, s.w],
                residual: r.as_ref().ok().copied().filter(|v| v.is_finite()),
                error: r.err().map(|e| e.to_string()),
            }
        })
        .collect();
    let max_residual = records.iter().fold(0.0f64, |m, r| m.max(r.residual.unwrap_or(f64::INFINITY)));
    VerificationReport {
        check: check.into(),
        seed: plan.seed,
        samples: records.len(),
        max_residual,
        tolerance: tol,
        pass: max_residual < tol,
        records,
    }
}

/// `φ^{z+w} = φ^z ∘ φ^w`.
pub fn verify_translation(flow: &dyn FlowMap, plan: &SamplePlan, tol: f64) -> VerificationReport {
    run("translation", plan, tol, |s| {
        let lhs = flow.apply(s.x, s.y, s.z + s.w)?;
        let (a, b) = flow.apply(s.x, s.y, s.w)?;
        Ok(pair_diff(lhs, flow.apply(a, b, s.z)?))
    })
}

/// Central-difference step relative to the coordinate size.
pub const FD_STEP: f64 = 1e-6;

/// `u_x (zϖ − x) + u_y (zϱ − y) = −u` for both coordinates of `φ^z`.
pub fn verify_pde(flow: &dyn FlowMap, field: &VectorField, plan: &SamplePlan, tol: f64) -> VerificationReport {
    run("pde", plan, tol, |s| {
        let (x, y, z) = (s.x, s.y, s.z);
        let hx = FD_STEP * x.abs().max(1.0);
        let hy = FD_STEP * y.abs().max(1.0);
        let (px, mx) = (flow.apply(x + hx, y, z)?, flow.apply(x - hx, y, z)?);
        let (py, my) = (flow.apply(x, y + hy, z)?, flow.apply(x, y - hy, z)?);
        let c = flow.apply(x, y, z)?;
        let p = eval_rf(field.first(), x, y).ok_or(NumericError::Singular)? * z;
        let r = eval_rf(field.second(), x, y).ok_or(NumericError::Singular)? * z;
        let one = |fpx: f64, fmx: f64, fpy: f64, fmy: f64, u: f64| {
            let ux = (fpx - fmx) / (2.0 * hx);
            let uy = (fpy - fmy) / (2.0 * hy);
            rel_diff(ux * (p - x) + uy * (r - y), -u)
        };
        Ok(one(px.0, mx.0, py.0, my.0, c.0).max(one(px.1, mx.1, py.1, my.1, c.1)))
    })
}

/// `φ^z ∘ ψ^w = ψ^w ∘ φ^z`.
pub fn verify_commute(phi: &dyn FlowMap, psi: &dyn FlowMap, plan: &SamplePlan, tol: f64) -> VerificationReport {
    run("commute", plan, tol, |s| {
        let (a, b) = psi.apply(s.x, s.y, s.w)?;
        let lhs = phi.apply(a, b, s.z)?;
        let (c, d) = phi.apply(s.x, s.y, s.z)?;
        Ok(pair_diff(lhs, psi.apply(c, d, s.w)?))
    })
}

/// An invariant `W_{z,w}(x, y)` of `φ^z ∘ ψ^w`.
pub trait OrbitFn: Sync {
    fn value(&self, x: f64, y: f64, z: f64, w: f64) -> Result<f64, NumericError>;
}

/// Orbit function given by an expression in `x, y, z, w`.
pub struct ExprOrbit(pub Expr);

impl OrbitFn for ExprOrbit {
    fn value(&self, x: f64, y: f64, z: f64, w: f64) -> Result<f64, NumericError> {
        let env = Env { w: w.into(), ..Env::real(x, y, z) };
        as_real(self.0.eval_plain(&env)?)
    }
}

/// Combined orbit of a commuting family, pulled back from the horizontal chart.
/// The two flows are `c1·F + d1·G` and `c2·F + d2·G`.
pub struct FamilyOrbit {
    template: CombinedOrbit,
    inverse: BirMap,
    first: (f64, f64),
    second: (f64, f64),
}

impl FamilyOrbit {
    pub fn new(family: &CommutingFamily, first: (f64, f64), second: (f64, f64)) -> Self {
        Self {
            template: CombinedOrbit::new(family.v.clone()),
            inverse: family.normalization.map.inverse(),
            first,
            second,
        }
    }
}

impl OrbitFn for FamilyOrbit {
    fn value(&self, x: f64, y: f64, z: f64, w: f64) -> Result<f64, NumericError> {
        let (a, b) = self.inverse.apply_f64(x, y).map_err(|_| NumericError::Singular)?;
        let zz = z * self.first.0 + w * self.second.0;
        let ww = z * self.first.1 + w * self.second.1;
        let v = self.template.eval_f64(zz, ww, a, b);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericError::Singular)
        }
    }
}

/// Drift of the orbit function along `(U, V) = φ^z ∘ ψ^w (x, y)`.
pub fn verify_orbit(
    phi: &dyn FlowMap,
    psi: &dyn FlowMap,
    orbit: &dyn OrbitFn,
    plan: &SamplePlan,
    tol: f64,
) -> VerificationReport {
    run("orbit", plan, tol, |s| {
        let (a, b) = psi.apply(s.x, s.y, s.w)?;
        let (u, v) = phi.apply(a, b, s.z)?;
        Ok(rel_diff(orbit.value(u, v, s.z, s.w)?, orbit.value(s.x, s.y, s.z, s.w)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::flows::ClosedFlow;
    use crate::Rf;

    struct Diff;
    impl OrbitFn for Diff {
        fn value(&self, x: f64, y: f64, _: f64, _: f64) -> Result<f64, NumericError> {
            Ok(x - y)
        }
    }

    fn plan() -> SamplePlan {
        SamplePlan::new(7, 100, (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))
    }

    #[test]
    fn sampling_is_deterministic_and_excludes_curves() {
        let p = plan().avoiding(["x - y".parse::<Rf>().unwrap().as_polynomial().unwrap()]);
        let a = p.samples().unwrap();
        assert_eq!(a, p.samples().unwrap());
        assert!(a.iter().all(|s| (s.x - s.y).abs() / 2f64.sqrt() > 0.05));
        let mut q = p.clone();
        q.exclusion = 10.0;
        assert!(q.samples().is_err());
    }

    #[test]
    fn superflow_checks() {
        let s = ClosedFlow::parse("x + z*(x-y)^2", "y + z*(x-y)^2").unwrap();
        let f = VectorField::parse("(x-y)^2", "(x-y)^2").unwrap();
        let p = plan();
        assert!(verify_translation(&s, &p, 1e-12).pass);
        let pde = verify_pde(&s, &f, &p, 1e-6);
        assert!(pde.pass, "{}", pde.max_residual);
        let id = ClosedFlow::identity();
        assert_eq!(verify_translation(&id, &p, 1e-12).max_residual, 0.0);
        assert!(verify_orbit(&s, &id, &Diff, &p, 1e-12).pass);
        assert!(verify_pde(&id, &VectorField::zero(), &p, 1e-6).max_residual < 1e-9);
    }

    #[test]
    fn reports_are_reproducible_json() {
        let s = ClosedFlow::parse("x/(1 - z*x)", "y/(1 - z*x)").unwrap();
        let p = SamplePlan::new(3, 20, (0.1, 0.5), (0.1, 0.5), (-0.5, 0.5), (-0.5, 0.5));
        let a = serde_json::to_string(&verify_translation(&s, &p, 1e-10)).unwrap();
        let b = serde_json::to_string(&verify_translation(&s, &p, 1e-10)).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["check"], "translation");
        assert_eq!(v["seed"], 3);
        assert_eq!(v["pass"], true);
    }

    #[test]
    fn negative_control_fails() {
        let s = ClosedFlow::parse("x + z*(x-y)^2", "y + z*(x-y)^2").unwrap();
        let wrong = VectorField::parse("(x-y)^2", "(x-y)^2 + y^2").unwrap();
        let r = verify_pde(&s, &wrong, &plan(), 1e-6);
        assert!(!r.pass && r.max_residual > 1e-2);
        assert!(r.failures().count() > 0);
    }
}
