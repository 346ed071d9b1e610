//! Floating-point evaluation of flows and numeric verification.

pub mod expr;
pub mod flows;
pub mod implicit;
pub mod ode;
pub mod verify;

use thiserror::Error;

pub use expr::{branch_eval, branch_eval_env, Branch, Env, Expr, Sym};
pub use flows::{as_real, family_flow, flow_integrate, ClosedFlow, Composite, Conjugated, FlowMap, ImplicitFlow, OdeFlow};
pub use implicit::{implicit_eval, implicit_eval_env, partner_identity_residual, solve_partner_pointwise, ImplicitBranch};
pub use ode::{dopri5, OdeOptions};
pub use verify::{
    rel_diff, verify_commute, ExprOrbit, FamilyOrbit, verify_orbit, verify_pde, verify_translation, OrbitFn, PointRecord, Sample,
    SamplePlan, VerificationReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("expression: {0}")]
    Parse(String),
    #[error("singularity on the continuation path")]
    Singular,
    #[error("continuation step fell below the floor")]
    StepUnderflow,
    #[error("two branches nearly coincide")]
    BranchAmbiguous,
    #[error("roots collide on the continuation path")]
    RootCollision,
    #[error("Newton iteration did not converge")]
    NewtonFailed,
    #[error("value is not real")]
    NotReal,
    #[error("sample plan: {0}")]
    Plan(String),
}
