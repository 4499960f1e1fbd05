use isospec::expr::{parse_rational_expr, parse_trig, Frame, LinOp, Poly, QSqrt2, RationalExpr, TrigPoly, VarSet};
use isospec::iso3d_first::{build_axial, build_screw, build_translational, canonicalize_killing, killing_residual, verify_translational, KillingCase};
use isospec::iso3d_second::{build_family, build_metric, check_family, check_metric, solve_w, FamilyParams, MetricParams};
use isospec::pair::PairFile;
use isospec::susy1d::{build_order1, build_order2, classify_zero_modes, verify_products};
use proptest::prelude::*;

type Q = QSqrt2;
type R = RationalExpr<Q>;

fn ratio() -> impl Strategy<Value = Q> {
    (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Q::from_ratio(n, d))
}

fn line_poly(max_deg: u32) -> impl Strategy<Value = R> {
    prop::collection::vec(ratio(), (max_deg + 1) as usize)
        .prop_map(|cs| R::from_poly(Poly::from_terms(cs.into_iter().enumerate().map(|(k, c)| ([k as u32, 0, 0], c)))))
}

fn line(t: &str) -> R {
    parse_rational_expr(t, VarSet::Line).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn first_order_pairs_are_exact(w in line_poly(5), c in ratio()) {
        let report = verify_products(&build_order1(&w, &c).unwrap());
        prop_assert!(report.overall, "{:?}", report.first_failure());
    }

    #[test]
    fn second_order_pairs_are_exact(v in line_poly(3), c in ratio(), d in ratio()) {
        prop_assume!(!v.is_zero());
        let report = verify_products(&build_order2(&v, &c, &d).unwrap());
        prop_assert!(report.overall, "{:?}", report.first_failure());
    }

    #[test]
    fn negating_w_swaps_the_partners(w in line_poly(4), c in ratio()) {
        let p = build_order1(&w, &c).unwrap();
        let m = build_order1(&w.scale(&-Q::from(1)), &c).unwrap();
        prop_assert_eq!(&m.v, &p.vt);
        prop_assert_eq!(&m.vt, &p.v);
        // −w gives ∂ − w, the negated adjoint of ∂ + w.
        prop_assert_eq!(m.a, p.a.adjoint().unwrap().scale(&-Q::from(1)));
    }

    #[test]
    fn at_most_one_zero_mode_is_normalizable(w in line_poly(4)) {
        prop_assume!(w.as_poly().unwrap().total_degree() > 0);
        let r = classify_zero_modes(&w, &Q::from(0)).unwrap();
        prop_assert!(!(r.minus_normalizable && r.plus_normalizable));
    }

    #[test]
    fn killing_vectors_canonicalize(a in prop::array::uniform3(ratio()), b in prop::array::uniform3(ratio())) {
        prop_assert!(killing_residual(&a, &b));
        let k = canonicalize_killing(&a, &b);
        prop_assert!(k.round_trip_holds());
        let nonzero = a.iter().chain(&b).any(|x| !num_traits::Zero::is_zero(x));
        prop_assert_eq!(k.case_tag == KillingCase::Trivial, !nonzero);
    }

    #[test]
    fn translational_pairs_separate(w in line_poly(3), c in ratio(), ky in 0i64..3, kz in 0i64..3) {
        let v_yz: R = parse_rational_expr(&format!("{}*y^2 + {}*z^4", ky, kz), VarSet::Space).unwrap();
        let p = build_translational(&w, &v_yz, &c).unwrap();
        let report = verify_translational(&p);
        prop_assert!(report.overall, "{:?}", report.first_failure());
    }

    #[test]
    fn random_metrics_solve_the_cyclic_system(a in prop::array::uniform6(ratio()), b in prop::array::uniform8(ratio()), c in prop::array::uniform6(ratio())) {
        let p = MetricParams { a, b, c };
        let report = check_metric(&p, &build_metric(&p));
        prop_assert!(report.overall, "{:?}", report.first_failure());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// Random points of the constrained parameter space: either s = 0 with
    /// free h2, or h2 = q2 = 0 with s1 = s2 and q1 = 0.
    #[test]
    fn accepted_families_are_exact(
        c in (1i64..=2), d1 in -1i64..=1, d2 in -1i64..=1, h1 in -1i64..=1, h2 in -1i64..=1, m2 in -1i64..=1,
        s in -1i64..=1, a0 in -1i64..=1, g0 in -1i64..=1,
    ) {
        let q = Q::from;
        let mut p = FamilyParams { d1: q(d1), d2: q(d2), h1: q(h1), m2: q(m2), alpha0: q(a0), gamma0: q(g0), ..FamilyParams::with_c(q(c)) };
        if s == 0 {
            p.h2 = q(h2);
        } else {
            p.s1 = q(s);
            p.s2 = q(s);
        }
        let f = build_family(&p).unwrap();
        let report = check_family(&f);
        prop_assert!(report.overall, "{:?}", report.first_failure());
        prop_assert_eq!(solve_w(&f.v, &f.pot, &f.pot_t).unwrap(), f.w.clone());
        // No inverse-square terms without q and s.
        if s == 0 {
            prop_assert!(f.pot.is_polynomial() && f.pot_t.is_polynomial());
        }
    }
}

#[test]
fn second_order_oscillator_is_an_iterated_first_order_step() {
    let p = build_order2(&line("2*x"), &Q::from(0), &Q::from(1)).unwrap();
    let step = &LinOp::partial(Frame::Cartesian, 0) + &LinOp::mul_by(Frame::Cartesian, line("x"));
    assert_eq!(p.a, step.compose(&step).unwrap());
}

#[test]
fn constant_axial_w_gives_equal_partners() {
    let v_rhoz: R = parse_rational_expr("rho^2 + z^2", VarSet::Cylinder).unwrap();
    let pair = build_axial(&TrigPoly::constant(Q::from(3)), &v_rhoz).unwrap();
    assert!((&pair.vt - &pair.v).is_zero());
    let pair = build_axial(&parse_trig("sin(phi)").unwrap(), &v_rhoz).unwrap();
    let diff = &pair.vt - &pair.v;
    // Singular only through 1/rho^2.
    for (_, cos, sin) in diff.harmonics() {
        for r in [cos, sin] {
            assert!(r.den_factors().iter().all(|(f, _)| *f == Poly::var(0)), "{:?}", r);
        }
    }
}

#[test]
fn screw_partners_coincide() {
    let s = build_screw(&Q::from(2), &parse_trig("cos(2*phi) + rho^2").unwrap()).unwrap();
    let file = PairFile::from_screw(&s);
    assert_eq!(file.v, file.vt);
    assert!(file.verify().unwrap().overall);
}
