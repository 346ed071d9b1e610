//! `projflow`: analyze rational vector fields, build commuting partners and verify flows.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 parse error, 3 failed precondition,
//! 4 undecided classification.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use projflow::catalog::{self, CatalogError, Example, Perturbation, Tolerances};
use projflow::fields::{commute_check, FieldError, VectorField};
use projflow::numeric::VerificationReport;
use projflow::orbit::{orbit_function, Level, OrbitError};
use projflow::partner::{commuting_family, partner_bundle, partner_fields_from_v, PartnerError};
use projflow::Rf;

/// Version of the JSON documents written by `--json`.
const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "projflow", version, about = "Commuting projective flows with rational vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write a JSON report to this path (`-` for stdout).
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a field, compute its orbit function and commuting family.
    Analyze {
        #[arg(long, num_args = 2, value_names = ["VARPI", "RHO"], required = true)]
        field: Vec<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Build the commuting pair whose second flow preserves V.
    Partner {
        #[arg(long, value_name = "V")]
        orbit: String,
        #[command(flatten)]
        out: Output,
    },
    /// Run the numeric checks on an example, a level-1 field or an orbit function.
    Verify {
        #[arg(long, value_name = "ID", conflicts_with_all = ["field", "orbit"])]
        example: Option<String>,
        #[arg(long, num_args = 2, value_names = ["VARPI", "RHO"], conflicts_with = "orbit")]
        field: Option<Vec<String>>,
        #[arg(long, value_name = "V")]
        orbit: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// One tolerance for every check instead of the defaults.
        #[arg(long, value_name = "FLOAT")]
        tol: Option<f64>,
        /// Add a term to one component, e.g. `beta:+y^2`.
        #[arg(long, value_name = "COMPONENT:EXPR")]
        perturb: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Re-derive the catalog of examples and diff against the stored values.
    Examples {
        #[command(flatten)]
        out: Output,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

fn orbit_code(e: &OrbitError) -> u8 {
    match e {
        OrbitError::Undecided(_) => 4,
        _ => 3,
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        let code = if matches!(e, FieldError::Parse(_)) { 2 } else { 3 };
        Failure::new(code, e.to_string())
    }
}

impl From<OrbitError> for Failure {
    fn from(e: OrbitError) -> Self {
        Failure::new(orbit_code(&e), e.to_string())
    }
}

impl From<PartnerError> for Failure {
    fn from(e: PartnerError) -> Self {
        let code = match &e {
            PartnerError::Orbit(o) => orbit_code(o),
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Perturbation(_) => Failure::new(2, e.to_string()),
            CatalogError::Field(f) => f.into(),
            CatalogError::Orbit(o) => o.into(),
            CatalogError::Partner(p) => p.into(),
            e => Failure::new(3, e.to_string()),
        }
    }
}

fn parse_rf(s: &str) -> Result<Rf, Failure> {
    s.parse().map_err(|e| Failure::new(2, format!("cannot parse `{s}`: {e}")))
}

fn parse_field(parts: &[String]) -> Result<VectorField, Failure> {
    Ok(VectorField::new(parse_rf(&parts[0])?, parse_rf(&parts[1])?)?)
}

fn emit(out: &Output, doc: Value) -> Result<(), Failure> {
    let Some(path) = &out.json else { return Ok(()) };
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
    if path.as_os_str() == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| Failure::new(3, format!("cannot write {}: {e}", path.display())))
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn level_text(l: Level) -> String {
    match l {
        Level::Zero => "0".into(),
        Level::Finite(n) => n.to_string(),
        Level::NotFinite => "not finite".into(),
    }
}

fn analyze(parts: &[String], out: &Output) -> Result<(), Failure> {
    let f = parse_field(parts)?;
    let report = orbit_function(&f)?;
    println!("field: ({}) • ({})", f.first(), f.second());
    println!("level: {}", level_text(report.level));
    if let Level::Finite(n) = report.level {
        if let Some(w) = &report.orbit_power {
            let lhs = if n == 1 { "W".to_string() } else { format!("W^{n}") };
            println!("orbit: {lhs} = {w}");
        }
    }
    if let Some(t) = &report.trace {
        println!("trace: {t}");
    }
    let family = match report.level {
        Level::Finite(1) => Some(commuting_family(&f)?),
        _ => None,
    };
    if let Some(fam) = &family {
        println!("commuting family: z·F + w·G");
        println!("  F = ({}) • ({})", fam.field.first(), fam.field.second());
        println!("  G = ({}) • ({})", fam.partner.first(), fam.partner.second());
    }
    emit(
        out,
        json!({
            "schema": SCHEMA,
            "command": "analyze",
            "field": to_value(&f),
            "report": to_value(&report),
            "family": family.map(|fam| json!({ "field": to_value(&fam.field), "partner": to_value(&fam.partner) })),
        }),
    )
}

fn partner(v: &str, out: &Output) -> Result<(), Failure> {
    let v = parse_rf(v)?;
    let bundle = partner_bundle(&v)?;
    let commute = commute_check(&bundle.phi_field, &bundle.psi_field);
    println!("V: {}", bundle.v);
    println!("phi field: ({}) • ({})", bundle.phi_field.first(), bundle.phi_field.second());
    println!("psi field: ({}) • ({})", bundle.psi_field.first(), bundle.psi_field.second());
    println!("a equation: {} = 0", bundle.a_equation.fmt_var("a"));
    println!("u equation: {} = 0", bundle.u_equation.fmt_var("u"));
    println!("combined orbit: {}", bundle.combined_orbit);
    println!("commute: {}", commute.commute);
    emit(out, json!({ "schema": SCHEMA, "command": "partner", "bundle": to_value(&bundle), "commute": commute.commute }))?;
    if commute.commute {
        Ok(())
    } else {
        Err(Failure::new(1, "the constructed fields do not commute"))
    }
}

/// Keeps only the failing points of a report.
fn trim(mut r: VerificationReport) -> VerificationReport {
    let tol = r.tolerance;
    r.records.retain(|p| p.residual.is_none_or(|v| v >= tol));
    r
}

struct VerifyArgs<'a> {
    example: Option<&'a str>,
    field: Option<&'a [String]>,
    orbit: Option<&'a str>,
    seed: u64,
    tol: Option<f64>,
    perturb: Option<&'a str>,
}

fn resolve(a: &VerifyArgs) -> Result<Example, Failure> {
    if let Some(id) = a.example {
        return Ok(catalog::example(id)?);
    }
    if let Some(parts) = a.field {
        return Ok(catalog::custom(parse_field(parts)?, None)?);
    }
    if let Some(v) = a.orbit {
        let pair = partner_fields_from_v(&parse_rf(v)?)?;
        return Ok(catalog::custom(pair.phi, Some(pair.psi))?);
    }
    Err(Failure::new(2, "one of --example, --field or --orbit is required"))
}

fn verify(a: VerifyArgs, out: &Output) -> Result<(), Failure> {
    let e = resolve(&a)?;
    let perturbation: Option<Perturbation> = a.perturb.map(str::parse).transpose()?;
    let tol = a.tol.map(Tolerances::uniform).unwrap_or_default();
    if tol.translation.is_nan() || tol.translation <= 0.0 {
        return Err(Failure::new(2, "--tol must be positive"));
    }
    let reports: Vec<_> = catalog::verify_example(&e, a.seed, tol, perturbation.as_ref())?.into_iter().map(trim).collect();
    let pass = reports.iter().all(|r| r.pass);
    println!("{} ({}), seed {}", e.id, e.name, a.seed);
    for r in &reports {
        let verdict = if r.pass { "pass" } else { "FAIL" };
        println!("  {:<16} {verdict}  max {:.3e}  tol {:.0e}  n = {}", r.check, r.max_residual, r.tolerance, r.samples);
    }
    emit(
        out,
        json!({
            "schema": SCHEMA,
            "command": "verify",
            "example": e.id,
            "seed": a.seed,
            "perturbation": a.perturb,
            "tolerances": to_value(&tol),
            "pass": pass,
            "reports": to_value(&reports),
        }),
    )?;
    if pass {
        Ok(())
    } else {
        Err(Failure::new(1, "verification failed"))
    }
}

fn examples(out: &Output) -> Result<(), Failure> {
    let mut checks = Vec::new();
    for e in catalog::all_examples() {
        let c = catalog::check_example(&e)?;
        println!(
            "{:<6} {:<16} level {}  W = {}  partner = {}·F + {}·G  gap {:.1e}  {}",
            c.id,
            e.name,
            level_text(c.level),
            c.orbit,
            c.partner_coordinates.0,
            c.partner_coordinates.1,
            c.flow_gap,
            if c.pass { "ok" } else { "DIFF" }
        );
        let mut doc = to_value(&c);
        doc["field"] = to_value(&e.field);
        doc["phi"] = Value::String(e.phi.to_string());
        doc["psi"] = Value::String(e.psi.to_string());
        checks.push((c.pass, doc));
    }
    let pass = checks.iter().all(|c| c.0);
    let docs: Vec<Value> = checks.into_iter().map(|c| c.1).collect();
    emit(out, json!({ "schema": SCHEMA, "command": "examples", "pass": pass, "examples": docs }))?;
    if pass {
        Ok(())
    } else {
        Err(Failure::new(1, "some examples differ from their stored values"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { field, out } => analyze(field, out),
        Command::Partner { orbit, out } => partner(orbit, out),
        Command::Verify { example, field, orbit, seed, tol, perturb, out } => verify(
            VerifyArgs {
                example: example.as_deref(),
                field: field.as_deref(),
                orbit: orbit.as_deref(),
                seed: *seed,
                tol: *tol,
                perturb: perturb.as_deref(),
            },
            out,
        ),
        Command::Examples { out } => examples(out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
