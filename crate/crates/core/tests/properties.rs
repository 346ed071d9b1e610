//! Randomized exact identities over small integer coefficients.

use proptest::prelude::*;

use projflow::algebra::{squarefree_factor, BiPoly, Mono};
use projflow::fields::{
    commute_check, compose_level0, compose_maps, conjugate_field, is_level0, lie_bracket, VectorField,
};
use projflow::orbit::{level1_check, orbit_function, Level};
use projflow::partner::partner_fields_from_v;
use projflow::{Poly, Poly1, Q, Rf};

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, len)
}

/// Homogeneous polynomial of degree `d` from its coefficients, never zero.
fn homog(d: u32, cs: &[i64]) -> Poly {
    let p = BiPoly::from_terms(cs.iter().enumerate().map(|(i, &c)| (Mono::new(i as u32, d - i as u32), q(c))));
    if p.is_zero() {
        BiPoly::term(q(1), d, 0)
    } else {
        p
    }
}

/// Homogeneous rational function of degree `d`: a numerator of degree `d + e` over a denominator of degree `e`.
fn homog_rf(d: u32) -> impl Strategy<Value = Rf> {
    (0u32..=1).prop_flat_map(move |e| {
        (coeffs((d + e + 1) as usize), coeffs((e + 1) as usize))
            .prop_map(move |(n, m)| Rf::new(homog(d + e, &n), homog(e, &m)).unwrap())
    })
}

fn field() -> impl Strategy<Value = VectorField> {
    (homog_rf(2), homog_rf(2)).prop_map(|(a, b)| VectorField::new(a, b).unwrap())
}

fn poly_field() -> impl Strategy<Value = VectorField> {
    (coeffs(3), coeffs(3)).prop_map(|(a, b)| VectorField::new(Rf::from_poly(homog(2, &a)), Rf::from_poly(homog(2, &b))).unwrap())
}

/// 0-homogeneous `p/r` with `p, r` of the same degree.
fn ratio() -> impl Strategy<Value = Rf> {
    ratio_up_to(2)
}

fn ratio_up_to(max: u32) -> impl Strategy<Value = Rf> {
    (1u32..=max).prop_flat_map(|d| {
        (coeffs((d + 1) as usize), coeffs((d + 1) as usize))
            .prop_map(move |(n, m)| Rf::new(homog(d, &n), homog(d, &m)).unwrap())
    })
}

fn small_point() -> impl Strategy<Value = (Q, Q)> {
    ((-9i64..=9), (1i64..=5), (-9i64..=9), (1i64..=5))
        .prop_map(|(a, b, c, d)| (Q::new(a.into(), b.into()), Q::new(c.into(), d.into())))
}

/// `[F, G] = DG·F − DF·G` on arbitrary pairs.
fn bracket(f: &(Rf, Rf), g: &(Rf, Rf)) -> (Rf, Rf) {
    let app = |h: &Rf, v: &(Rf, Rf)| &(&h.dx() * &v.0) + &(&h.dy() * &v.1);
    (&app(&g.0, f) - &app(&f.0, g), &app(&g.1, f) - &app(&f.1, g))
}

fn pair(f: &VectorField) -> (Rf, Rf) {
    (f.first().clone(), f.second().clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn arithmetic_matches_evaluation(f in homog_rf(1), g in homog_rf(2), (x, y) in small_point()) {
        if let (Ok(a), Ok(b)) = (f.eval(&x, &y), g.eval(&x, &y)) {
            prop_assert_eq!((&f + &g).eval(&x, &y).unwrap(), &a + &b);
            prop_assert_eq!((&f - &g).eval(&x, &y).unwrap(), &a - &b);
            prop_assert_eq!((&f * &g).eval(&x, &y).unwrap(), &a * &b);
            if b != q(0) {
                if let Ok(v) = f.checked_div(&g).unwrap().eval(&x, &y) {
                    prop_assert_eq!(v, &a / &b);
                }
            }
        }
    }

    #[test]
    fn euler_identity(d in 0u32..=4, f in homog_rf(3)) {
        prop_assert!(f.euler_residual(3).is_zero());
        let g = Rf::from_poly(homog(d, &[1, -2, 3, 0, 5][..(d + 1) as usize]));
        let lhs = &(&Rf::x() * &g.dx()) + &(&Rf::y() * &g.dy());
        prop_assert_eq!(lhs, g.scale(&q(d as i64)));
    }

    #[test]
    fn rehomogenize_round_trip(d in 0i64..=3, f in homog_rf(2)) {
        prop_assert_eq!(&Rf::rehomogenize(&f.dehomogenize(), 2), &f);
        let g = &f * &Rf::x().pow(d as i32 - 2).unwrap();
        prop_assert_eq!(&Rf::rehomogenize(&g.dehomogenize(), d), &g);
    }

    #[test]
    fn squarefree_product(a in coeffs(3), b in coeffs(2), k in 1u32..=3) {
        let (pa, pb) = (Poly1::from_i64s(&a), Poly1::from_i64s(&b));
        let p = &pa * &pb.pow(k);
        prop_assume!(!p.is_zero());
        let sf = squarefree_factor(&p).unwrap();
        prop_assert_eq!(sf.expand(), p);
        for (i, (f, _)) in sf.factors.iter().enumerate() {
            prop_assert!(f.gcd(&f.derivative()).is_constant());
            for (g, _) in &sf.factors[i + 1..] {
                prop_assert!(f.gcd(g).is_constant());
            }
        }
    }

    #[test]
    fn bracket_antisymmetry_and_jacobi(f in field(), g in poly_field(), h in poly_field()) {
        let (a, b) = lie_bracket(&f, &g);
        let (c, d) = lie_bracket(&g, &f);
        prop_assert_eq!(&a, &-&c);
        prop_assert_eq!(&b, &-&d);
        prop_assert_eq!((a, b), bracket(&pair(&f), &pair(&g)));
        let (f, g, h) = (pair(&f), pair(&g), pair(&h));
        let j1 = bracket(&f, &bracket(&g, &h));
        let j2 = bracket(&g, &bracket(&h, &f));
        let j3 = bracket(&h, &bracket(&f, &g));
        prop_assert!((&(&j1.0 + &j2.0) + &j3.0).is_zero());
        prop_assert!((&(&j1.1 + &j2.1) + &j3.1).is_zero());
    }

    #[test]
    fn conjugation_round_trip(f in field(), a in ratio()) {
        let g = conjugate_field(&a, &f).unwrap();
        prop_assert_eq!(conjugate_field(&a.recip().unwrap(), &g).unwrap(), f);
    }

    #[test]
    fn level0_composition_law(j in homog_rf(1), k in homog_rf(1)) {
        let (fj, fk) = (compose_level0(&j, &Rf::zero()), compose_level0(&k, &Rf::zero()));
        if let (Ok(fj), Ok(fk), Ok(jk)) = (fj, fk, compose_level0(&j, &k)) {
            let composed = compose_maps(&(fj.u().clone(), fj.v().clone()), &(fk.u().clone(), fk.v().clone())).unwrap();
            prop_assert_eq!(&composed, &(jk.u().clone(), jk.v().clone()));
        }
        let lin = VectorField::new(&Rf::x() * &j, &Rf::y() * &j).unwrap();
        prop_assert!(is_level0(&lin));
        prop_assert_eq!(orbit_function(&lin).unwrap().level, Level::Zero);
    }

    #[test]
    fn partner_fields_commute(v in homog_rf(1)) {
        prop_assume!(!v.dx().is_zero());
        let p = partner_fields_from_v(&v).unwrap();
        prop_assert!(commute_check(&p.phi, &p.psi).commute);
        prop_assert!(p.independent);
    }

    #[test]
    fn level1_check_agrees_with_orbit_function(v in homog_rf(1), a in ratio_up_to(1), f in field(), pick in any::<bool>()) {
        // Level-1 fields are conjugates of V²/V_x • 0; the others are arbitrary.
        let g = if pick && !v.dx().is_zero() {
            let phi = partner_fields_from_v(&v).unwrap().phi;
            conjugate_field(&a, &phi).unwrap()
        } else {
            f
        };
        prop_assume!(!is_level0(&g));
        let by_orbit = orbit_function(&g).map(|r| r.level == Level::Finite(1));
        if let (Ok(x), Ok(y)) = (level1_check(&g), by_orbit) {
            prop_assert_eq!(x, y);
        }
        if pick && !v.dx().is_zero() {
            prop_assert_eq!(level1_check(&g), Ok(true));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conjugation_scales_the_kernel(f in field(), a in ratio()) {
        let g = conjugate_field(&a, &f).unwrap();
        prop_assert_eq!(g.kernel(), &a * &f.kernel());
    }
}
