use isospec::expr::{parse_rational_expr, QSqrt2, RationalExpr, VarSet};
use isospec::spectra::{
    discretize, lowest_eigs, match_levels, pair_spectrum, schrodinger_matrix, BoxDomain, BoxFrame, Grid, NumericParams, SpectralPair,
    StencilOrder,
};
use isospec::susy1d::{build_order1, build_order2};
use proptest::prelude::*;

type Q = QSqrt2;

fn line(t: &str) -> RationalExpr<Q> {
    parse_rational_expr(t, VarSet::Line).unwrap()
}

fn lowest(v: &RationalExpr<Q>, n: usize, k: usize) -> Vec<f64> {
    let domain = BoxDomain::parse("-10:10", 1, BoxFrame::Standard, None).unwrap();
    let op = discretize(v, &domain, &[n], StencilOrder::Second).unwrap();
    lowest_eigs(&op.matrix, k).unwrap().values
}

/// With h halving (n + 1 doubling), successive changes shrink about fourfold.
#[test]
fn second_order_grids_converge_quadratically() {
    let pairs = [
        build_order1(&line("x"), &Q::from(0)).unwrap(),
        build_order2(&line("2*x"), &Q::from(0), &Q::from(1)).unwrap(),
        build_order1(&line("x^2"), &Q::from(0)).unwrap(),
    ];
    for pair in &pairs {
        for v in [&pair.v, &pair.vt] {
            let e: Vec<Vec<f64>> = [199, 399, 799].iter().map(|&n| lowest(v, n, 4)).collect();
            for level in 0..4 {
                let coarse = (e[1][level] - e[0][level]).abs();
                let fine = (e[2][level] - e[1][level]).abs();
                assert!(coarse >= 3.0 * fine, "V = {:?}, level {}: changes {:e} then {:e}", v, level, coarse, fine);
            }
        }
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let pair = build_order1(&line("x"), &Q::from(0)).unwrap();
    let sp = SpectralPair::from(&pair);
    let domain = BoxDomain::parse("-8:8", 1, BoxFrame::Standard, None).unwrap();
    let params = NumericParams { n: vec![1200], k: 5, match_tol: 5e-3, relative: false, stencil_order: StencilOrder::Fourth };
    let run = || serde_json::to_string(&pair_spectrum(&sp, &domain, &params).unwrap()).unwrap();
    let many = run();
    let again = run();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    assert_eq!(many, again);
    assert_eq!(many, single);
}

#[test]
fn three_dimensional_reports_are_bitwise_stable() {
    let v: RationalExpr<Q> = parse_rational_expr("x^2 + y^2 + z^2 + x*y/2", VarSet::Space).unwrap();
    let domain = BoxDomain::parse("-5:5", 3, BoxFrame::Standard, None).unwrap();
    let run = || {
        let op = discretize(&v, &domain, &[14], StencilOrder::Fourth).unwrap();
        let e = lowest_eigs(&op.matrix, 3).unwrap();
        (e.values.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), e.vectors[0].iter().map(|x| x.to_bits()).collect::<Vec<_>>())
    };
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    assert_eq!(run(), single);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn discretized_operators_are_exactly_symmetric(
        n in prop::collection::vec(3usize..9, 1..=3),
        pot in prop::collection::vec(-50.0f64..50.0, 729),
        lo in prop::collection::vec(-3.0f64..0.0, 3),
        h in prop::collection::vec(0.05f64..0.7, 3),
        fourth in any::<bool>(),
    ) {
        let d = n.len();
        let grid = Grid { n: n.clone(), lo: lo[..d].to_vec(), h: h[..d].to_vec() };
        let len: usize = n.iter().product();
        let order = if fourth { StencilOrder::Fourth } else { StencilOrder::Second };
        let m = schrodinger_matrix(&grid, &pot[..len], order);
        prop_assert!(m.is_symmetric());
    }

    #[test]
    fn matching_is_a_partial_bijection_within_tolerance(
        mut a in prop::collection::vec(-5.0f64..20.0, 1..10),
        mut b in prop::collection::vec(-5.0f64..20.0, 1..10),
        tol in 1e-3f64..1.0,
    ) {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let m = match_levels(&a, &b, |_, _| tol);
        let mut seen_a = vec![false; a.len()];
        let mut seen_b = vec![false; b.len()];
        for x in &m.matches {
            prop_assert!((a[x.index_h] - b[x.index_htilde]).abs() <= tol);
            prop_assert!(!seen_a[x.index_h] && !seen_b[x.index_htilde]);
            seen_a[x.index_h] = true;
            seen_b[x.index_htilde] = true;
        }
        for &i in m.unmatched_h.iter().chain(&m.beyond_window_h) {
            prop_assert!(!seen_a[i]);
            seen_a[i] = true;
        }
        for &j in m.unmatched_htilde.iter().chain(&m.beyond_window_htilde) {
            prop_assert!(!seen_b[j]);
            seen_b[j] = true;
        }
        prop_assert!(seen_a.iter().all(|&s| s) && seen_b.iter().all(|&s| s));
        prop_assert!(m.beyond_window_h.iter().all(|&i| a[i] > m.window));
        prop_assert!(m.unmatched_h.iter().all(|&i| a[i] <= m.window));
        // Swapping the roles gives the same number of pairs.
        prop_assert_eq!(match_levels(&b, &a, |_, _| tol).matches.len(), m.matches.len());
    }
}
