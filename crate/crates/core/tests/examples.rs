use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use projflow::catalog::{
    all_examples, cardano_limit_residual, check_example, cubic, cubic_pde_remainder, example, verify_example,
    Perturbation, Tolerances, CUBIC_RELATION,
};
use projflow::numeric::{implicit_eval, partner_identity_residual, Expr, ImplicitBranch};
use projflow::Rf;

#[test]
fn every_example_rederives_and_verifies() {
    for e in all_examples() {
        let c = check_example(&e).unwrap();
        assert!(c.pass, "{}: {c:?}", e.id);
        for r in verify_example(&e, 7, Tolerances::default(), None).unwrap() {
            assert!(r.pass, "{} {} {:e}", e.id, r.check, r.max_residual);
            assert!(r.samples >= 100);
        }
    }
}

#[test]
fn golden_partner_coordinates() {
    let coords = |id: &str| check_example(&example(id).unwrap()).unwrap().partner_coordinates;
    assert_eq!(coords("E2"), ("0".into(), "-1".into()));
    assert_eq!(coords("E3"), ("0".into(), "-2".into()));
    assert_eq!(coords("E4"), ("0".into(), "-6".into()));
    assert_eq!(check_example(&cubic()).unwrap().relation_holds, Some(true));
}

#[test]
fn perturbed_partner_fails() {
    let p: Perturbation = "beta:+y^2".parse().unwrap();
    for id in ["E2", "E3"] {
        let reports = verify_example(&example(id).unwrap(), 7, Tolerances::default(), Some(&p)).unwrap();
        let worst = reports.iter().map(|r| r.max_residual).fold(0.0, f64::max);
        assert!(reports.iter().any(|r| !r.pass) && worst > 1e-2, "{id}: {worst}");
    }
}

#[test]
fn reports_do_not_depend_on_thread_timing() {
    let e = example("E3").unwrap();
    let a = serde_json::to_string(&verify_example(&e, 11, Tolerances::default(), None).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_example(&e, 11, Tolerances::default(), None).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn cubic_boundary_limit_is_linear_in_z() {
    let ib = ImplicitBranch::new(Expr::parse(CUBIC_RELATION).unwrap(), Expr::parse("x").unwrap());
    for (x, y) in [(0.8, 0.2), (0.6, 0.1), (0.9, 0.25)] {
        let alpha = -x * y * y * y / ((x - y) * (x - y));
        let gap = |z: f64| {
            let a = implicit_eval(&ib, x, y, z).unwrap();
            assert!(a.im.abs() < 1e-12);
            ((a.re - x) / z - alpha).abs()
        };
        let (g3, g4, g5) = (gap(1e-3), gap(1e-4), gap(1e-5));
        for r in [g3 / g4, g4 / g5] {
            assert!((8.0..12.5).contains(&r), "{x} {y}: {g3:e} {g4:e} {g5:e}");
        }
    }
}

#[test]
fn cubic_pde_holds_modulo_the_relation() {
    assert!(cubic_pde_remainder().unwrap().is_zero());
}

#[test]
fn cardano_limit_on_the_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let y: f64 = rng.gen_range(-2.0..-0.1);
        let x = y * rng.gen_range(0.4..2.5);
        assert!(x - 3.0 * y > 0.0 && y - 3.0 * x > 0.0);
        assert!(cardano_limit_residual(x, y).unwrap() < 1e-8, "{x} {y}");
    }
}

/// `V` with sampling ranges for `x` and `y`.
type Case = (&'static str, (f64, f64), (f64, f64));

#[test]
fn partner_flows_commute_at_unit_time() {
    let cases: [Case; 4] = [
        ("x^2/y", (0.2, 0.5), (0.6, 1.0)),
        ("x - y", (0.3, 0.6), (0.05, 0.25)),
        ("x^3/y^2", (0.2, 0.4), (0.6, 1.0)),
        ("(3*x - y)*y^3/(x - y)^3", (0.6, 1.0), (0.05, 0.2)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (v, xr, yr) in cases {
        let v: Rf = v.parse().unwrap();
        for _ in 0..50 {
            let (x, y) = (rng.gen_range(xr.0..xr.1), rng.gen_range(yr.0..yr.1));
            let r = partner_identity_residual(&v, x, y).unwrap();
            assert!(r < 1e-9, "{v} at ({x}, {y}): {r:e}");
        }
    }
}
