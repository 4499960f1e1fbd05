use isospec::expr::{parse_rational_expr, Frame, LinOp, Poly, QSqrt2, RationalExpr, VarNames, VarSet};
use proptest::prelude::*;

type Q = QSqrt2;
type R = RationalExpr<Q>;
type Op = LinOp<R>;

fn scalar() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=3, -1i64..=1).prop_map(|(n, d, s)| Q::from_ratio(n, d) + Q::sqrt2_times(num_rational::BigRational::from_integer(s.into())))
}

fn poly(max_deg: u32) -> impl Strategy<Value = Poly<Q>> {
    prop::collection::vec(((0..=max_deg), (0..=max_deg), (0..=1u32), scalar()), 0..5)
        .prop_map(move |terms| Poly::from_terms(terms.into_iter().filter(|(i, j, _, _)| i + j <= max_deg).map(|(i, j, k, c)| ([i, j, k], c))))
}

/// Polynomials, sometimes over one of a few shared linear factors so that
/// denominators combine and cancel.
fn rational() -> impl Strategy<Value = R> {
    (poly(2), 0usize..4).prop_map(|(p, den)| {
        let num = R::from_poly(p);
        let dens = ["1", "x + 1", "y - 2", "x - y + 3"];
        num.checked_div(&parse_rational_expr(dens[den], VarSet::Space).unwrap()).unwrap()
    })
}

fn operator() -> impl Strategy<Value = Op> {
    prop::collection::vec(((0u8..=2), (0u8..=2), rational()), 1..4).prop_map(|terms| {
        LinOp::from_terms(Frame::Cartesian, terms.into_iter().filter(|(i, j, _)| i + j <= 2).map(|(i, j, c)| ([i, j, 0], c)))
    })
}

fn poly_operator() -> impl Strategy<Value = Op> {
    prop::collection::vec(((0u8..=2), (0u8..=2), poly(2)), 1..4).prop_map(|terms| {
        LinOp::from_terms(Frame::Cartesian, terms.into_iter().filter(|(i, j, _)| i + j <= 2).map(|(i, j, c)| ([i, j, 0], R::from_poly(c))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compose_is_associative(a in operator(), b in operator(), c in operator()) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn adjoint_is_an_involution(a in operator()) {
        prop_assert_eq!(a.adjoint().unwrap().adjoint().unwrap(), a);
    }

    #[test]
    fn adjoint_reverses_products(a in poly_operator(), b in poly_operator()) {
        let lhs = a.compose(&b).unwrap().adjoint().unwrap();
        let rhs = b.adjoint().unwrap().compose(&a.adjoint().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mixed_partials_commute(e in rational(), i in 0usize..3, j in 0usize..3) {
        prop_assert_eq!(e.derive(i).derive(j), e.derive(j).derive(i));
    }

    #[test]
    fn equality_is_an_equivalence(a in rational(), f in rational(), g in rational()) {
        // Three spellings of the same function built through different factors.
        prop_assume!(!f.is_zero() && !g.is_zero());
        let b = (&a * &f).checked_div(&f).unwrap();
        let c = (&(&a * &g) * &f).checked_div(&(&f * &g)).unwrap();
        prop_assert_eq!(&a, &a);
        prop_assert_eq!(&a == &b, &b == &a);
        prop_assert!(a == b && b == c && a == c);
        let other = &a + &R::one();
        prop_assert!(a != other && other != a);
    }

    #[test]
    fn printed_text_parses_back(e in rational()) {
        let text = e.to_text(&VarNames::xyz());
        let back: R = parse_rational_expr(&text, VarSet::Space).unwrap();
        prop_assert_eq!(back, e, "text {}", text);
    }

    #[test]
    fn operators_print_and_apply_consistently(a in operator(), f in poly(3)) {
        // Applying the sum of the parts equals applying the whole.
        let f = R::from_poly(f);
        let whole = a.apply(&f);
        let parts = a.terms().fold(R::zero(), |acc, (alpha, c)| &acc + &LinOp::monomial(Frame::Cartesian, *alpha, c.clone()).apply(&f));
        prop_assert_eq!(whole, parts);
        prop_assert!(!a.to_text(&VarNames::xyz()).is_empty());
    }
}
