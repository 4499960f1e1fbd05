//! One-dimensional partner pairs with first- and second-order intertwiners.

use serde::{Deserialize, Serialize};

use crate::check::{CheckEntry, CheckReport, Job};
use crate::error::{Error, Result};
use crate::expr::{Field, Frame, LinOp, Poly, RationalExpr, VarNames};

type Op<F> = LinOp<RationalExpr<F>>;

const NAMES: VarNames = VarNames::one_dim();

/// A constructed `(V, Ṽ, A)` triple on the line.
#[derive(Clone, Debug, PartialEq)]
pub struct PartnerPair1D<F: Field> {
    pub order: u8,
    pub v: RationalExpr<F>,
    pub vt: RationalExpr<F>,
    pub a: Op<F>,
    /// `w` for order 1, `v` for order 2.
    pub seed: RationalExpr<F>,
    /// Factorization energy.
    pub c: F,
    /// Integration constant of the second-order construction.
    pub d: Option<F>,
}

fn require_line<F: Field>(e: &RationalExpr<F>, what: &str) -> Result<()> {
    if e.depends_on(1) || e.depends_on(2) {
        return Err(Error::Precondition(format!("{} must depend on x only", what)));
    }
    Ok(())
}

fn d1<F: Field>() -> Op<F> {
    LinOp::partial(Frame::Cartesian, 0)
}

/// `A = ∂ + w`, `V = w² − w′ + c`, `Ṽ = w² + w′ + c`.
pub fn build_order1<F: Field>(w: &RationalExpr<F>, c: &F) -> Result<PartnerPair1D<F>> {
    require_line(w, "w")?;
    let w2 = w * w;
    let wp = w.derive(0);
    let cc = RationalExpr::constant(c.clone());
    Ok(PartnerPair1D {
        order: 1,
        v: &(&w2 - &wp) + &cc,
        vt: &(&w2 + &wp) + &cc,
        a: &d1() + &LinOp::mul_by(Frame::Cartesian, w.clone()),
        seed: w.clone(),
        c: c.clone(),
        d: None,
    })
}

/// `A = ∂² + v∂ + w` with
/// `V = v²/4 + c − v′ + v″/2v − v′²/4v² + d/v²`, `Ṽ = V + 2v′`,
/// `w = (v² − v′)/2 + c − V`.
pub fn build_order2<F: Field>(v: &RationalExpr<F>, c: &F, d: &F) -> Result<PartnerPair1D<F>> {
    require_line(v, "v")?;
    let inv_v = v.recip().ok_or_else(|| Error::Precondition("v must not be identically zero".into()))?;
    let vp = v.derive(0);
    let vpp = vp.derive(0);
    let quarter = F::one() / F::from_i64(4);
    let half = F::one() / F::from_i64(2);
    let cc = RationalExpr::constant(c.clone());
    let inv_v2 = &inv_v * &inv_v;
    let common = &(&(&(v * v).scale(&quarter) + &cc) + &(&vpp * &inv_v).scale(&half))
        + &(&(&(&vp * &vp).scale(&quarter) * &inv_v2).scale(&-F::one()) + &inv_v2.scale(d));
    let pot = &common - &vp;
    let pot_t = &common + &vp;
    let w = &(&(&(v * v) - &vp).scale(&half) + &cc) - &pot;
    let a = Op::from_terms(Frame::Cartesian, [([2, 0, 0], RationalExpr::one()), ([1, 0, 0], v.clone()), ([0, 0, 0], w)]);
    Ok(PartnerPair1D { order: 2, v: pot, vt: pot_t, a, seed: v.clone(), c: c.clone(), d: Some(d.clone()) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ZeroModeClass {
    /// `e^{−W}` is normalizable: `H` has the ground state that `H̃` lacks.
    UnbrokenH,
    /// `e^{+W}` is normalizable: `H̃` has the extra ground state.
    UnbrokenHtilde,
    /// Neither zero mode is normalizable; the spectra coincide.
    Broken,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroModeReport<F: Field> {
    /// Antiderivative of `w` with `W(0) = 0`.
    pub big_w: Poly<F>,
    pub minus_normalizable: bool,
    pub plus_normalizable: bool,
    pub classification: ZeroModeClass,
    pub ground_energy: F,
}

/// Decides normalizability of `e^{∓W}` from the leading term of `W = ∫w`.
pub fn classify_zero_modes<F: Field>(w: &RationalExpr<F>, c: &F) -> Result<ZeroModeReport<F>> {
    require_line(w, "w")?;
    let w = w
        .as_poly()
        .ok_or_else(|| Error::Precondition("zero-mode classification needs a polynomial w".into()))?;
    if w.total_degree() == 0 {
        return Err(Error::Precondition("constant w is degenerate: neither zero mode is normalizable or decidable".into()));
    }
    let big_w = w.integrate(0);
    let deg = big_w.degree_in(0);
    let lc = big_w.coeff(&[deg, 0, 0]);
    let even = deg % 2 == 0;
    let minus = even && lc.sign() == std::cmp::Ordering::Greater;
    let plus = even && lc.sign() == std::cmp::Ordering::Less;
    let classification = match (minus, plus) {
        (true, _) => ZeroModeClass::UnbrokenH,
        (_, true) => ZeroModeClass::UnbrokenHtilde,
        _ => ZeroModeClass::Broken,
    };
    Ok(ZeroModeReport { big_w, minus_normalizable: minus, plus_normalizable: plus, classification, ground_energy: c.clone() })
}

/// Runs every product and superalgebra identity for a pair given by its
/// parts. Used both for freshly built pairs and for pairs read from files.
pub fn check_pair<F: Field>(order: u8, v: &RationalExpr<F>, vt: &RationalExpr<F>, a: &Op<F>, c: &F, d: Option<&F>) -> CheckReport {
    let lap: Op<F> = LinOp::laplacian(Frame::Cartesian, 1);
    let shift = RationalExpr::constant(c.clone());
    let h = LinOp::schrodinger(&lap, v.clone());
    let ht = LinOp::schrodinger(&lap, vt.clone());
    let h_c = LinOp::schrodinger(&lap, v - &shift);
    let ht_c = LinOp::schrodinger(&lap, vt - &shift);
    let d = d.cloned().unwrap_or_else(F::zero);

    let target = |m: &Op<F>| -> std::result::Result<Op<F>, crate::expr::ExprError> {
        if order == 1 {
            Ok(m.clone())
        } else {
            let sq = m.compose(m)?;
            sq.checked_sub(&LinOp::mul_by(Frame::Cartesian, RationalExpr::constant(d.clone())))
        }
    };
    let intertwine = || LinOp::residual_with(a, &h, &ht);
    let adjoint_intertwine = || {
        let ad = a.adjoint()?;
        LinOp::residual_with(&ad, &ht, &h)
    };
    let lower = || a.adjoint()?.compose(a)?.checked_sub(&target(&h_c)?);
    let upper = || a.compose(&a.adjoint()?)?.checked_sub(&target(&ht_c)?);

    let (p_low, p_up) = if order == 1 {
        ("product A†A = H − c", "product AA† = H̃ − c")
    } else {
        ("product A†A = (H − c)² − d", "product AA† = (H̃ − c)² − d")
    };
    let anti = if order == 1 { "superalgebra {Q, Q†} = H_s − c" } else { "superalgebra {Q, Q†} = (H_s − c)² − d" };

    let op_entry = |tag: &str, r: std::result::Result<Op<F>, crate::expr::ExprError>| match r {
        Ok(op) => CheckEntry::from_op(tag, &op, &NAMES),
        Err(e) => CheckEntry::failed(tag, &e),
    };
    let jobs: Vec<Job> = vec![
        Box::new(|| op_entry("intertwining A H = H̃ A", intertwine())),
        Box::new(|| op_entry("adjoint intertwining A† H̃ = H A†", adjoint_intertwine())),
        Box::new(|| op_entry(p_low, lower())),
        Box::new(|| op_entry(p_up, upper())),
    ];
    let mut report = CheckReport::run(jobs);
    // The superalgebra on the 2×2 superhamiltonian reduces componentwise to
    // the entries above.
    let both = |i: usize, j: usize| report.entries[i].is_zero && report.entries[j].is_zero;
    let commut = both(0, 1);
    let anticommut = both(2, 3);
    let summarize = |ok: bool, i: usize, j: usize| {
        if ok {
            "0".to_string()
        } else {
            format!("[{}] ; [{}]", report.entries[i].residual, report.entries[j].residual)
        }
    };
    let extra = vec![
        CheckEntry::new("superalgebra [H_s, Q] = 0", summarize(commut, 0, 1), commut),
        CheckEntry::structural("superalgebra Q² = 0"),
        CheckEntry::new(anti, summarize(anticommut, 2, 3), anticommut),
    ];
    report = report.merge(CheckReport::new(extra));
    report
}

/// Product, intertwining, and superalgebra identities for a built pair.
pub fn verify_products<F: Field>(pair: &PartnerPair1D<F>) -> CheckReport {
    check_pair(pair.order, &pair.v, &pair.vt, &pair.a, &pair.c, pair.d.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_rational_expr, QSqrt2, VarSet};
    use num_traits::Zero;

    fn p(s: &str) -> RationalExpr<QSqrt2> {
        parse_rational_expr(s, VarSet::Line).unwrap()
    }

    #[test]
    fn oscillator_pair() {
        let pair = build_order1(&p("x"), &QSqrt2::zero()).unwrap();
        assert_eq!(pair.v.to_text(&NAMES), "x^2 - 1");
        assert_eq!(pair.vt.to_text(&NAMES), "x^2 + 1");
        assert!(verify_products(&pair).overall);
    }

    #[test]
    fn free_particle() {
        let pair = build_order1(&p("0"), &QSqrt2::zero()).unwrap();
        assert!(pair.v.is_zero() && pair.vt.is_zero());
        assert_eq!(pair.a, d1());
    }

    #[test]
    fn second_order_examples() {
        let pair = build_order2(&p("2*x"), &QSqrt2::zero(), &QSqrt2::from(1)).unwrap();
        assert_eq!(pair.v, p("x^2 - 2"));
        assert_eq!(pair.vt, p("x^2 + 2"));
        assert_eq!(pair.a.coeff(&[0, 0, 0]), p("x^2 + 1"));
        let report = verify_products(&pair);
        assert!(report.overall, "{:?}", report.first_failure());

        let pair0 = build_order2(&p("2*x"), &QSqrt2::zero(), &QSqrt2::zero()).unwrap();
        assert_eq!(pair0.v, p("x^2 - 2 - 1/(4*x^2)"));
        assert!(build_order2(&p("0"), &QSqrt2::zero(), &QSqrt2::zero()).is_err());
    }

    #[test]
    fn corrupted_pair_fails() {
        let mut pair = build_order1(&p("x"), &QSqrt2::zero()).unwrap();
        pair.v = &pair.v + &p("1");
        let report = verify_products(&pair);
        assert!(!report.overall);
        assert!(!report.entries[0].is_zero);
        assert!(!report.entries[2].is_zero);
    }

    #[test]
    fn zero_mode_classes() {
        let c = QSqrt2::zero();
        assert_eq!(classify_zero_modes(&p("x"), &c).unwrap().classification, ZeroModeClass::UnbrokenH);
        assert_eq!(classify_zero_modes(&p("-x"), &c).unwrap().classification, ZeroModeClass::UnbrokenHtilde);
        let r = classify_zero_modes(&p("x^2"), &c).unwrap();
        assert_eq!(r.classification, ZeroModeClass::Broken);
        assert_eq!(r.big_w, p("x^3/3").as_poly().unwrap().clone());
        assert!(classify_zero_modes(&p("3"), &c).is_err());
        assert!(classify_zero_modes(&p("1/x"), &c).is_err());
    }
}
