//! Worked examples: monomial fields, the superflow, a quadratic and a cubic field.
//!
//! Each record keeps only the input field plus golden values. [`check_example`]
//! re-derives the orbit function, the commuting family and the flows and diffs
//! them against the goldens; [`verify_example`] runs the numeric suite on the
//! golden flows.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::fields::{commute_check, FieldError, VectorField};
use crate::numeric::{
    as_real, family_flow, rel_diff, verify_commute, verify_orbit, verify_pde, verify_translation, ClosedFlow, Expr,
    ExprOrbit, FamilyOrbit, FlowMap, ImplicitBranch, ImplicitFlow, NumericError, OdeFlow, OrbitFn, SamplePlan,
    VerificationReport,
};
use crate::orbit::{orbit_function, Level, OrbitError};
use crate::partner::{commuting_family, CommutingFamily, PartnerError};
use crate::{Alg, Poly, Q, Rf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown example `{0}`")]
    Unknown(String),
    #[error("perturbation: {0}")]
    Perturbation(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Partner(#[from] PartnerError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// How a golden flow is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum GoldenFlow {
    /// `u^z • v^z` in `x, y, z`.
    Closed(String, String),
    /// First coordinate a root `t` of `relation = 0` with `t = x` at `z = 0`, second an expression in `t`.
    Implicit { relation: String, second: String },
    /// Only known through the chart of the commuting family.
    Chart,
}

impl fmt::Display for GoldenFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoldenFlow::Closed(u, v) => write!(f, "({u}) • ({v})"),
            GoldenFlow::Implicit { relation, second } => write!(f, "t • ({second}) where {relation} = 0"),
            GoldenFlow::Chart => f.write_str("horizontal chart"),
        }
    }
}

/// `combination · (field, partner) = target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub target: VectorField,
    pub combination: (Q, Q),
}

#[derive(Clone, Debug)]
pub struct Example {
    pub id: String,
    pub name: String,
    pub field: VectorField,
    /// Orbit function of `field`, up to a constant factor.
    pub orbit: Rf,
    pub partner: VectorField,
    pub phi: GoldenFlow,
    pub psi: GoldenFlow,
    /// Invariant of `φ^z ∘ ψ^w` in `x, y, z, w`; `None` uses the chart of the family.
    pub combined_orbit: Option<String>,
    pub relation: Option<Relation>,
    pub plan: SamplePlan,
}

fn vf(a: &str, b: &str) -> VectorField {
    VectorField::parse(a, b).expect("catalog field")
}

fn poly(s: &str) -> Poly {
    s.parse::<Rf>().ok().and_then(|r| r.as_polynomial()).expect("catalog curve")
}

fn closed(u: &str, v: &str) -> GoldenFlow {
    GoldenFlow::Closed(u.into(), v.into())
}

/// Sampling box shared by all checks of one example, seeded later.
fn plan(x: (f64, f64), y: (f64, f64), t: f64, curves: &[&str]) -> SamplePlan {
    SamplePlan::new(0, 100, x, y, (-t, t), (-t, t)).avoiding(curves.iter().map(|c| poly(c)))
}

/// `(p/q)` with a positive denominator.
fn exponent(p: i64, q: i64) -> String {
    let s = q.signum();
    format!("({}/{})", p * s, q * s)
}

/// Monomial field `x^{n+2} y^{−n}/(n+1) • 0` with orbit `V = x^{n+1} y^{−n}` of its partner.
pub fn monomial(n: i64) -> Example {
    assert!(n != -1, "n = -1 gives no field");
    let k = n + 1;
    let field = VectorField::new(
        Rf::x().pow((n + 2) as i32).unwrap() * Rf::y().pow(-n as i32).unwrap() * Rf::constant(Q::new(1.into(), k.into())),
        Rf::zero(),
    )
    .expect("homogeneous");
    let v = format!("x^({k})*y^({})", -n);
    let partner = VectorField::new(
        Rf::x() * Rf::y() * Rf::constant(Q::new((-n).into(), k.into())),
        -(Rf::y() * Rf::y()),
    )
    .expect("homogeneous");
    Example {
        id: format!("E1:{n}"),
        name: format!("monomial, n = {n}"),
        field,
        orbit: Rf::y(),
        partner,
        phi: closed(&format!("x*(1 - z*{v})^{}", exponent(-1, k)), "y"),
        psi: closed(&format!("x*(1 + z*y)^{}", exponent(-n, k)), "y/(1 + z*y)"),
        combined_orbit: Some(format!("({v})*y/(z*({v}) + w*y)")),
        relation: None,
        plan: plan((0.2, 0.6), (0.6, 1.2), 0.4, &["x", "y"]),
    }
}

pub fn superflow() -> Example {
    Example {
        id: "E2".into(),
        name: "superflow".into(),
        field: vf("(x-y)^2", "(x-y)^2"),
        orbit: "x - y".parse().unwrap(),
        // The printed second component is 2xy − y², which fails to commute with the
        // field and disagrees with the printed flow; 2xy − 2y² matches both.
        partner: vf("x^2 - y^2", "2*x*y - 2*y^2"),
        phi: closed("x + z*(x-y)^2", "y + z*(x-y)^2"),
        psi: closed("(x - z*(x-y)^2)/(z*x - z*y - 1)^2", "y/(z*x - z*y - 1)^2"),
        combined_orbit: None,
        relation: None,
        plan: plan((-1.0, 1.0), (-1.0, 1.0), 0.3, &["x - y", "y"]),
    }
}

pub fn quadratic() -> Example {
    let r = "(1 - 2*x*z + 2*y*z)";
    let s = "x*sqrt(1 - 2*z*y^2/x + 2*z*y^3/x^2)";
    Example {
        id: "E3".into(),
        name: "quadratic".into(),
        field: vf("2*x^2 - 3*x*y", "x*y - 2*y^2"),
        orbit: "(x - y)*y^2/x^2".parse().unwrap(),
        partner: vf("y^3/x", "y^3/x"),
        phi: closed(
            &format!("(x*y*sqrt{r} + x^2)/((x + y + 2*z*y^2)*{r})"),
            &format!("(y^2*sqrt{r} + x*y)/((x + y + 2*z*y^2)*sqrt{r})"),
        ),
        psi: closed(&format!("(x - y)*{s}/({s} - y)"), &format!("(x*y - y^2)/({s} - y)")),
        combined_orbit: Some("(x - y)*y^2/(z*x^2 - w*y^2)".into()),
        relation: None,
        plan: plan((0.5, 1.0), (0.05, 0.3), 0.2, &["x", "y", "x - y"]),
    }
}

/// Scaled cubic for the first coordinate of `ψ^z` in the cubic example.
pub const CUBIC_RELATION: &str = "(9*t*x - 8*x^2 - 3*t*y)*x^2*y^2 - (x - 3*y - 6*y^2*z)*t*(t*y - 3*t*x + 3*x^2)^2";
/// Second coordinate of `ψ^z` in terms of the first.
pub const CUBIC_SECOND: &str = "t^2*(y - 3*x)/x^2 + 3*t";

pub fn cubic() -> Example {
    Example {
        id: "E4".into(),
        name: "cubic".into(),
        field: vf("2*x^2 + x*y", "x*y + 2*y^2"),
        orbit: "x^2*y^2/(x - y)^3".parse().unwrap(),
        partner: vf("-x*y^3/(x-y)^2", "(3*x*y^3 - 2*y^4)/(x-y)^2"),
        phi: GoldenFlow::Chart,
        psi: GoldenFlow::Implicit { relation: CUBIC_RELATION.into(), second: CUBIC_SECOND.into() },
        combined_orbit: Some("x^2*y^2/(z*(y - x)^3 + w*y^2*(3*x - y))".into()),
        relation: Some(Relation {
            target: vf("(3*x^3*y - 2*x^4)/(x-y)^2", "-x^3*y/(x-y)^2"),
            combination: (Q::from_integer((-1).into()), Q::from_integer((-1).into())),
        }),
        plan: plan((0.5, 1.0), (0.05, 0.3), 0.2, &["x", "y", "x - y"]),
    }
}

/// Sampling box for fields outside the catalog.
pub const DEFAULT_BOX: ((f64, f64), (f64, f64), f64) = ((0.5, 1.0), (0.1, 0.4), 0.1);

/// A level-1 field outside the catalog, verified against its constructed partner
/// (or `partner`, which must lie in the commuting family).
pub fn custom(field: VectorField, partner: Option<VectorField>) -> Result<Example, CatalogError> {
    let report = orbit_function(&field)?;
    let orbit = report.orbit().cloned().ok_or(OrbitError::NotLevelOne)?;
    let family = commuting_family(&field)?;
    let partner = match partner {
        Some(p) => {
            family.coordinates(&p).ok_or(PartnerError::NotCommuting)?;
            p
        }
        None => family.partner.clone(),
    };
    let a = &family.normalization.a;
    let curves = [field.first().den(), field.second().den(), partner.first().den(), partner.second().den(), a.num(), a.den()]
        .into_iter()
        .cloned()
        .chain([Poly::x(), Poly::y()])
        .collect::<Vec<_>>();
    let (x, y, t) = DEFAULT_BOX;
    Ok(Example {
        id: "custom".into(),
        name: format!("({}) • ({})", field.first(), field.second()),
        field,
        orbit,
        partner,
        phi: GoldenFlow::Chart,
        psi: GoldenFlow::Chart,
        combined_orbit: None,
        relation: None,
        plan: SamplePlan::new(0, 100, x, y, (-t, t), (-t, t)).avoiding(curves),
    })
}

pub const MONOMIAL_EXPONENTS: [i64; 4] = [-2, 0, 1, 2];

pub fn all_examples() -> Vec<Example> {
    let mut v: Vec<Example> = MONOMIAL_EXPONENTS.iter().map(|&n| monomial(n)).collect();
    v.extend([superflow(), quadratic(), cubic()]);
    v
}

/// Looks up `E1:<n>` (`E1` alone means `n = 1`), `E2`, `E3` or `E4`.
pub fn example(id: &str) -> Result<Example, CatalogError> {
    let unknown = || CatalogError::Unknown(id.into());
    match id.trim().to_ascii_uppercase().as_str() {
        "E1" => Ok(monomial(1)),
        "E2" => Ok(superflow()),
        "E3" => Ok(quadratic()),
        "E4" => Ok(cubic()),
        s => {
            let n: i64 = s.strip_prefix("E1:").and_then(|n| n.trim().parse().ok()).ok_or_else(unknown)?;
            if n == -1 {
                return Err(unknown());
            }
            Ok(monomial(n))
        }
    }
}

/// What the exact pipeline recovers from `field` alone.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub level: Level,
    pub orbit: Rf,
    pub family: CommutingFamily,
    /// Coordinates of the golden partner in the derived family.
    pub coordinates: (Q, Q),
}

pub fn derive(e: &Example) -> Result<Derivation, CatalogError> {
    let report = orbit_function(&e.field)?;
    let orbit = report.orbit().cloned().ok_or(OrbitError::NotLevelOne)?;
    let family = commuting_family(&e.field)?;
    let coordinates = family.coordinates(&e.partner).ok_or(PartnerError::NotCommuting)?;
    Ok(Derivation { level: report.level, orbit, family, coordinates })
}

/// Flows and orbit function used by the numeric checks.
pub struct FlowSet {
    pub phi: Arc<dyn FlowMap>,
    pub psi: Arc<dyn FlowMap>,
    pub orbit: Arc<dyn OrbitFn>,
}

fn to_f64(q: &Q) -> f64 {
    crate::algebra::Scalar::to_f64_lossy(q)
}

fn golden_flow(g: &GoldenFlow, d: &Derivation, c: (f64, f64)) -> Result<Arc<dyn FlowMap>, CatalogError> {
    Ok(match g {
        GoldenFlow::Closed(u, v) => Arc::new(ClosedFlow::parse(u, v)?),
        GoldenFlow::Implicit { relation, second } => Arc::new(ImplicitFlow::new(
            ImplicitBranch::new(Expr::parse(relation)?, Expr::parse("x")?),
            Expr::parse(second)?,
        )),
        GoldenFlow::Chart => Arc::new(family_flow(&d.family, c.0, c.1)),
    })
}

/// The golden flows, falling back to the chart where no closed form is stored.
pub fn golden_flows(e: &Example, d: &Derivation) -> Result<FlowSet, CatalogError> {
    let cd = (to_f64(&d.coordinates.0), to_f64(&d.coordinates.1));
    let orbit: Arc<dyn OrbitFn> = match &e.combined_orbit {
        Some(s) => Arc::new(ExprOrbit(Expr::parse(s)?)),
        None => Arc::new(FamilyOrbit::new(&d.family, (1.0, 0.0), cd)),
    };
    Ok(FlowSet { phi: golden_flow(&e.phi, d, (1.0, 0.0))?, psi: golden_flow(&e.psi, d, cd)?, orbit })
}

/// Flows computed in the horizontal chart of the derived family.
pub fn derived_flows(d: &Derivation) -> FlowSet {
    let cd = (to_f64(&d.coordinates.0), to_f64(&d.coordinates.1));
    FlowSet {
        phi: Arc::new(family_flow(&d.family, 1.0, 0.0)),
        psi: Arc::new(family_flow(&d.family, cd.0, cd.1)),
        orbit: Arc::new(FamilyOrbit::new(&d.family, (1.0, 0.0), cd)),
    }
}

/// Result of diffing a derivation against the golden values.
#[derive(Clone, Debug, Serialize)]
pub struct ExampleCheck {
    pub id: String,
    pub level: Level,
    #[serde(serialize_with = "ser_display")]
    pub orbit: Rf,
    pub orbit_matches: bool,
    #[serde(serialize_with = "ser_display")]
    pub partner: VectorField,
    pub partner_coordinates: (String, String),
    pub partner_commutes: bool,
    pub relation_holds: Option<bool>,
    /// Largest relative gap between golden and chart flows or orbits.
    pub flow_gap: f64,
    pub pass: bool,
}

fn ser_display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Largest gap between golden and derived flows and orbits; must stay below this.
pub const FLOW_GAP_TOL: f64 = 1e-8;

fn flow_gap(golden: &FlowSet, derived: &FlowSet, plan: &SamplePlan) -> f64 {
    let mut p = plan.clone();
    p.count = 20;
    let Ok(samples) = p.samples() else { return f64::INFINITY };
    let mut gap = 0.0f64;
    for s in samples {
        let pair = |a: &dyn FlowMap, b: &dyn FlowMap, t: f64| -> Result<f64, NumericError> {
            let (u, v) = (a.apply(s.x, s.y, t)?, b.apply(s.x, s.y, t)?);
            Ok(rel_diff(u.0, v.0).max(rel_diff(u.1, v.1)))
        };
        let orb = || -> Result<f64, NumericError> {
            // Orbit functions agree up to a function of (z, w); compare their drift instead.
            let (a, b) = golden.psi.apply(s.x, s.y, s.w)?;
            let (u, v) = golden.phi.apply(a, b, s.z)?;
            let g = derived.orbit.value(u, v, s.z, s.w)?;
            Ok(rel_diff(g, derived.orbit.value(s.x, s.y, s.z, s.w)?))
        };
        for r in [pair(&*golden.phi, &*derived.phi, s.z), pair(&*golden.psi, &*derived.psi, s.w), orb()] {
            gap = gap.max(r.unwrap_or(f64::INFINITY));
        }
    }
    gap
}

pub fn check_example(e: &Example) -> Result<ExampleCheck, CatalogError> {
    let d = derive(e)?;
    let orbit_matches = d.orbit.ratio_constant(&e.orbit).is_some();
    let partner_commutes = commute_check(&e.field, &e.partner).commute;
    let relation_holds = e.relation.as_ref().map(|r| {
        let with_golden = CommutingFamily { partner: e.partner.clone(), ..d.family.clone() };
        with_golden.coordinates(&r.target) == Some(r.combination.clone())
    });
    let gap = flow_gap(&golden_flows(e, &d)?, &derived_flows(&d), &e.plan);
    let pass = d.level == Level::Finite(1)
        && orbit_matches
        && partner_commutes
        && relation_holds != Some(false)
        && gap < FLOW_GAP_TOL;
    Ok(ExampleCheck {
        id: e.id.clone(),
        level: d.level,
        orbit: d.orbit,
        orbit_matches,
        partner: d.family.partner.clone(),
        partner_coordinates: (d.coordinates.0.to_string(), d.coordinates.1.to_string()),
        partner_commutes,
        relation_holds,
        flow_gap: gap,
        pass,
    })
}

/// Tolerances of the numeric suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub translation: f64,
    pub pde: f64,
    pub commute: f64,
    pub orbit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { translation: 1e-8, pde: 1e-6, commute: 1e-8, orbit: 1e-8 }
    }
}

impl Tolerances {
    pub fn uniform(t: f64) -> Self {
        Self { translation: t, pde: t, commute: t, orbit: t }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Varpi,
    Rho,
    Alpha,
    Beta,
}

/// Adds a 2-homogeneous term to one component of the field or of its partner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    pub component: Component,
    pub term: Rf,
}

impl std::str::FromStr for Perturbation {
    type Err = CatalogError;

    /// `beta:+y^2`, `alpha:-x*y`, `rho:x^2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| CatalogError::Perturbation(m.into());
        let (c, t) = s.split_once(':').ok_or_else(|| bad("expected <component>:<expr>"))?;
        let component = match c.trim() {
            "varpi" => Component::Varpi,
            "rho" => Component::Rho,
            "alpha" => Component::Alpha,
            "beta" => Component::Beta,
            other => return Err(bad(&format!("unknown component `{other}`"))),
        };
        let t = t.trim();
        let term: Rf = t.strip_prefix('+').unwrap_or(t).parse().map_err(|e| bad(&format!("{e}")))?;
        if !term.homogeneity().admits(2) {
            return Err(bad("term must be 2-homogeneous"));
        }
        Ok(Self { component, term })
    }
}

impl Perturbation {
    fn apply(&self, f: &VectorField, first: bool) -> Result<VectorField, FieldError> {
        if first {
            VectorField::new(f.first() + &self.term, f.second().clone())
        } else {
            VectorField::new(f.first().clone(), f.second() + &self.term)
        }
    }

    fn touches_field(&self) -> bool {
        matches!(self.component, Component::Varpi | Component::Rho)
    }
}

/// ODE tolerance for flows of perturbed fields.
const PERTURBED_ODE_TOL: f64 = 1e-12;

/// Translation and PDE checks for both flows, then commutation and orbit drift.
pub fn verify_example(
    e: &Example,
    seed: u64,
    tol: Tolerances,
    perturbation: Option<&Perturbation>,
) -> Result<Vec<VerificationReport>, CatalogError> {
    let d = derive(e)?;
    let mut flows = golden_flows(e, &d)?;
    let (mut field, mut partner) = (e.field.clone(), e.partner.clone());
    if let Some(p) = perturbation {
        let first = matches!(p.component, Component::Varpi | Component::Alpha);
        if p.touches_field() {
            field = p.apply(&field, first)?;
            flows.phi = Arc::new(OdeFlow::new(field.clone(), PERTURBED_ODE_TOL));
        } else {
            partner = p.apply(&partner, first)?;
            flows.psi = Arc::new(OdeFlow::new(partner.clone(), PERTURBED_ODE_TOL));
        }
    }
    let plan = SamplePlan { seed, ..e.plan.clone() };
    let named = |mut r: VerificationReport, name: &str| {
        r.check = name.into();
        r
    };
    Ok(vec![
        named(verify_translation(&*flows.phi, &plan, tol.translation), "translation:phi"),
        named(verify_translation(&*flows.psi, &plan, tol.translation), "translation:psi"),
        named(verify_pde(&*flows.phi, &field, &plan, tol.pde), "pde:phi"),
        named(verify_pde(&*flows.psi, &partner, &plan, tol.pde), "pde:psi"),
        verify_commute(&*flows.phi, &*flows.psi, &plan, tol.commute),
        verify_orbit(&*flows.phi, &*flows.psi, &*flows.orbit, &plan, tol.orbit),
    ])
}

/// `F(a, x, y)` cutting out the first coordinate `a` of `ψ` in the cubic example.
pub fn cubic_relation() -> Alg {
    let a = Alg::t();
    let c = |s: &str| Alg::constant(s.parse().expect("catalog polynomial"));
    let lin = &(&(&a * &c("9*x - 3*y")) - &c("8*x^2")) * &c("x^2*y^2");
    let quad = &(&a * &c("y - 3*x")) + &c("3*x^2");
    &lin + &(&(&c("3*y + 6*y^2 - x") * &a) * &(&quad * &quad))
}

/// `−F_x (α − x) − F_y (β − y) + a F_a` reduced modulo `F`; zero iff `a` solves
/// `a_x (α − x) + a_y (β − y) = −a` on `F = 0`.
pub fn cubic_pde_remainder() -> Result<Alg, CatalogError> {
    let f = cubic_relation();
    let e = cubic();
    let shift = |g: &Rf, v: Rf| Alg::constant(g - &v);
    let p = &(&(&f.dx() * &shift(e.partner.first(), Rf::x())) + &(&f.dy() * &shift(e.partner.second(), Rf::y())))
        .scale(&-Rf::one())
        + &(&Alg::t() * &f.dt());
    Ok(p.rem(&f).map_err(PartnerError::from)?)
}

/// The closed form `u(xz, yz)/z` at `z → 0` for the cubic field's first coordinate,
/// with positive square roots and real cube roots.
pub const CARDANO_LIMIT: &str = "(cbrt(x + y*psqrt((y - 3*x)/(x - 3*y))) + cbrt(x - y*psqrt((y - 3*x)/(x - 3*y))))*x*(x - y)/(cbrt(x - 3*y)*(y - 3*x)) - 2*x^2/(y - 3*x)";

/// `|limit − x|/max(1, |x|)` on the cone `x − 3y > 0, y − 3x > 0`.
pub fn cardano_limit_residual(x: f64, y: f64) -> Result<f64, NumericError> {
    let e = Expr::parse(CARDANO_LIMIT)?;
    let v = as_real(e.eval_plain(&crate::numeric::Env::real(x, y, 0.0))?)?;
    Ok(rel_diff(v, x))
}
