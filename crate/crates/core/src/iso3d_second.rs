//! Second-order intertwiners in three dimensions.
//!
//! The second-order coefficients `g_ij` of `A = g_ij ∂i∂j + v·∇ + w` solve
//! the cyclic Killing-tensor condition, with a 20-parameter general
//! solution. Fixing `g = diag(1, −1, 0)` leaves a family of partner
//! potentials that are quartic in `x3`; everything the family claims is
//! certified here against the defining equations and the operator identity
//! `AH = H̃A` rather than trusted from closed forms.

use serde::{Deserialize, Serialize};

use crate::check::{CheckEntry, CheckReport, Job};
use crate::error::{Error, Result};
use crate::expr::{ExprError, Field, Frame, LinOp, Poly, RationalExpr, VarNames};

type R<F> = RationalExpr<F>;
type Op<F> = LinOp<R<F>>;

const NAMES: VarNames = VarNames::cartesian();

fn sqrt2<F: Field>() -> Result<F> {
    F::sqrt2().ok_or_else(|| Error::Precondition("the coefficient field must contain sqrt2".into()))
}

fn x<F: Field>(i: usize) -> R<F> {
    R::var(i)
}

fn k<F: Field>(c: &F) -> R<F> {
    R::constant(c.clone())
}

fn frac<F: Field>(p: i64, q: i64) -> F {
    F::from_i64(p) / F::from_i64(q)
}

fn op_entry(tag: impl Into<String>, r: std::result::Result<Op<impl Field>, ExprError>) -> CheckEntry {
    let tag = tag.into();
    match r {
        Ok(op) => CheckEntry::from_op(tag, &op, &NAMES),
        Err(e) => CheckEntry::failed(tag, &e),
    }
}

fn d2<F: Field>(i: usize, j: usize) -> Op<F> {
    let mut a = [0u8; 3];
    a[i] += 1;
    a[j] += 1;
    LinOp::monomial(Frame::Cartesian, a, R::one())
}

/// The 20 constants of the general metric: symmetric `a`, trace-free `b`
/// (with `b33 = −b11 − b22`), symmetric `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricParams<F> {
    /// `a11, a22, a33, a12, a23, a31`.
    pub a: [F; 6],
    /// `b11, b22, b12, b13, b21, b23, b31, b32`.
    pub b: [F; 8],
    /// `c11, c22, c33, c12, c23, c31`.
    pub c: [F; 6],
}

fn sym_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

impl<F: Field> MetricParams<F> {
    pub fn zero() -> Self {
        MetricParams { a: std::array::from_fn(|_| F::zero()), b: std::array::from_fn(|_| F::zero()), c: std::array::from_fn(|_| F::zero()) }
    }

    pub fn a_ij(&self, i: usize, j: usize) -> F {
        self.a[sym_index(i, j)].clone()
    }

    pub fn c_ij(&self, i: usize, j: usize) -> F {
        self.c[sym_index(i, j)].clone()
    }

    pub fn b_ij(&self, i: usize, j: usize) -> F {
        let b = &self.b;
        match (i, j) {
            (0, 0) => b[0].clone(),
            (1, 1) => b[1].clone(),
            (2, 2) => -(b[0].clone() + &b[1]),
            (0, 1) => b[2].clone(),
            (0, 2) => b[3].clone(),
            (1, 0) => b[4].clone(),
            (1, 2) => b[5].clone(),
            (2, 0) => b[6].clone(),
            _ => b[7].clone(),
        }
    }
}

/// Components `g11, g22, g33, g12, g23, g31`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor<F: Field> {
    pub g: [R<F>; 6],
}

impl<F: Field> MetricTensor<F> {
    pub fn get(&self, i: usize, j: usize) -> &R<F> {
        &self.g[sym_index(i, j)]
    }
}

/// General solution of the cyclic condition. The off-diagonal linear
/// `b` terms use the trace-free `b33` consistently.
pub fn build_metric<F: Field>(p: &MetricParams<F>) -> MetricTensor<F> {
    let (x1, x2, x3) = (x::<F>(0), x::<F>(1), x::<F>(2));
    let a = |i, j| k(&p.a_ij(i, j));
    let b = |i, j| k(&p.b_ij(i, j));
    let c = |i, j| k(&p.c_ij(i, j));
    let half = k(&frac(1, 2));
    let two = R::from_int(2);
    let g11 = &(&(&(&(&(&a(2, 2) * &x2.pow(2)) + &(&a(1, 1) * &x3.pow(2))) - &(&two * &(&a(1, 2) * &(&x2 * &x3))))
        - &(&b(2, 0) * &x2))
        + &(&b(1, 0) * &x3))
        + &c(0, 0);
    let g22 = &(&(&(&(&(&a(0, 0) * &x3.pow(2)) + &(&a(2, 2) * &x1.pow(2))) - &(&two * &(&a(2, 0) * &(&x3 * &x1))))
        - &(&b(0, 1) * &x3))
        + &(&b(2, 1) * &x1))
        + &c(1, 1);
    let g33 = &(&(&(&(&(&a(1, 1) * &x1.pow(2)) + &(&a(0, 0) * &x2.pow(2))) - &(&two * &(&a(0, 1) * &(&x1 * &x2))))
        - &(&b(1, 2) * &x1))
        + &(&b(0, 2) * &x2))
        + &c(2, 2);
    let quad12 = &(&(&(&a(1, 2) * &(&x3 * &x1)) + &(&a(2, 0) * &(&x2 * &x3))) - &(&a(2, 2) * &(&x1 * &x2))) - &(&a(0, 1) * &x3.pow(2));
    let lin12 = &(&(&(&b(2, 0) * &x1) - &(&b(2, 1) * &x2)) - &(&(&b(0, 0) - &b(1, 1)) * &x3)) * &half;
    let quad23 = &(&(&(&a(2, 0) * &(&x1 * &x2)) + &(&a(0, 1) * &(&x3 * &x1))) - &(&a(0, 0) * &(&x2 * &x3))) - &(&a(1, 2) * &x1.pow(2));
    let lin23 = &(&(&(&b(0, 1) * &x2) - &(&b(0, 2) * &x3)) - &(&(&b(1, 1) - &b(2, 2)) * &x1)) * &half;
    let quad31 = &(&(&(&a(0, 1) * &(&x2 * &x3)) + &(&a(1, 2) * &(&x1 * &x2))) - &(&a(1, 1) * &(&x3 * &x1))) - &(&a(2, 0) * &x2.pow(2));
    let lin31 = &(&(&(&b(1, 2) * &x3) - &(&b(1, 0) * &x1)) - &(&(&b(2, 2) - &b(0, 0)) * &x2)) * &half;
    MetricTensor {
        g: [
            g11,
            g22,
            g33,
            &(&quad12 + &lin12) + &c(0, 1),
            &(&quad23 + &lin23) + &c(1, 2),
            &(&quad31 + &lin31) + &c(2, 0),
        ],
    }
}

/// Cyclic condition for every index triple, and the rewriting of
/// `g_ij ∂i∂j` through the angular momenta `l_i = ε_ijk x_j ∂_k`.
pub fn check_metric<F: Field>(p: &MetricParams<F>, g: &MetricTensor<F>) -> CheckReport {
    let mut entries = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            for kk in j..3 {
                let r = &(&g.get(j, kk).derive(i) + &g.get(kk, i).derive(j)) + &g.get(i, j).derive(kk);
                entries.push(CheckEntry::from_expr(
                    format!("cyclic condition ∂{0} g{1}{2} + ∂{1} g{2}{0} + ∂{2} g{0}{1} = 0", i + 1, j + 1, kk + 1),
                    &r,
                    &NAMES,
                ));
            }
        }
    }
    entries.push(op_entry("angular-momentum form g_ij∂i∂j = a_ij l_i l_j + b_ij l_i ∂j + c_ij ∂i∂j + d_ij x_i ∂j", metric_operator_residual(p, g)));
    CheckReport::new(entries)
}

fn levi(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

fn metric_operator_residual<F: Field>(p: &MetricParams<F>, g: &MetricTensor<F>) -> std::result::Result<Op<F>, ExprError> {
    let l: Vec<Op<F>> = (0..3)
        .map(|i| {
            let mut op = Op::zero(Frame::Cartesian);
            for j in 0..3 {
                for kk in 0..3 {
                    let e = levi(i, j, kk);
                    if e != 0 {
                        let mut a = [0u8; 3];
                        a[kk] = 1;
                        op = &op + &LinOp::monomial(Frame::Cartesian, a, x::<F>(j).scale(&F::from_i64(e)));
                    }
                }
            }
            op
        })
        .collect();
    let trace = p.a_ij(0, 0) + p.a_ij(1, 1) + p.a_ij(2, 2);
    let mut lhs = Op::zero(Frame::Cartesian);
    let mut rhs = Op::zero(Frame::Cartesian);
    for i in 0..3 {
        for j in 0..3 {
            lhs = &lhs + &d2::<F>(i, j).premultiply(g.get(i, j));
            let aij = p.a_ij(i, j);
            if !aij.is_zero() {
                rhs = &rhs + &l[i].compose(&l[j])?.scale(&aij);
            }
            let bij = p.b_ij(i, j);
            if !bij.is_zero() {
                rhs = &rhs + &l[i].compose(&LinOp::partial(Frame::Cartesian, j))?.scale(&bij);
            }
            rhs = &rhs + &d2::<F>(i, j).scale(&p.c_ij(i, j));
            let dij = if i == j { trace.clone() - p.a_ij(i, j) } else { -p.a_ij(i, j) };
            if !dij.is_zero() {
                let mut a = [0u8; 3];
                a[j] = 1;
                rhs = &rhs + &LinOp::monomial(Frame::Cartesian, a, x::<F>(i).scale(&dij));
            }
        }
    }
    lhs.checked_sub(&rhs)
}

/// Free constants of the `diag(1, −1, 0)` family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams<F> {
    pub c: F,
    pub d1: F,
    pub d2: F,
    pub h1: F,
    pub h2: F,
    pub q1: F,
    pub q2: F,
    pub s1: F,
    pub s2: F,
    pub m2: F,
    pub alpha0: F,
    pub gamma0: F,
}

impl<F: Field> FamilyParams<F> {
    /// All constants zero except `c`.
    pub fn with_c(c: F) -> Self {
        let z = F::zero;
        FamilyParams { c, d1: z(), d2: z(), h1: z(), h2: z(), q1: z(), q2: z(), s1: z(), s2: z(), m2: z(), alpha0: z(), gamma0: z() }
    }

    /// `(u + v)/√2` and `(u − v)/√2`.
    fn pm(u: &F, v: &F) -> Result<(F, F)> {
        let r = sqrt2::<F>()?.inv();
        Ok(((u.clone() + v) * &r, (u.clone() - v) * &r))
    }

    pub fn derived(&self) -> Result<Derived<F>> {
        let (d_plus, d_minus) = Self::pm(&self.d1, &self.d2)?;
        let (h_plus, h_minus) = Self::pm(&self.h1, &self.h2)?;
        let (q_plus, q_minus) = Self::pm(&self.q1, &self.q2)?;
        let (s_plus, s_minus) = Self::pm(&self.s1, &self.s2)?;
        let s2 = sqrt2::<F>()?;
        let c2 = self.c.clone() * &self.c;
        let a = -(d_plus.clone() * &d_minus) / &self.c;
        let m4 = c2.clone() * F::from_i64(4);
        let m3 = c2.clone() * F::from_i64(6) * &s2 * &self.h1;
        let m1 = self.h1.clone() * (self.m2.clone() - c2 * F::from_i64(4) * &self.h1 * &self.h1) / &s2 - self.alpha0.clone();
        Ok(Derived { d_plus, d_minus, h_plus, h_minus, q_plus, q_minus, s_plus, s_minus, a, m4, m3, m1 })
    }

    /// The products that must vanish: `s±h2`, `s±q2`, `s−q1`.
    pub fn constraint_products(&self) -> Result<Vec<(&'static str, F)>> {
        let d = self.derived()?;
        Ok(vec![
            ("s+·h2", d.s_plus.clone() * &self.h2),
            ("s−·h2", d.s_minus.clone() * &self.h2),
            ("s+·q2", d.s_plus.clone() * &self.q2),
            ("s−·q2", d.s_minus.clone() * &self.q2),
            ("s−·q1", d.s_minus * &self.q1),
        ])
    }
}

/// Constants derived from [`FamilyParams`].
#[derive(Clone, Debug, PartialEq)]
pub struct Derived<F> {
    pub d_plus: F,
    pub d_minus: F,
    pub h_plus: F,
    pub h_minus: F,
    pub q_plus: F,
    pub q_minus: F,
    pub s_plus: F,
    pub s_minus: F,
    /// Constant term of `v3`, fixed by the quartic reduction equation.
    pub a: F,
    pub m4: F,
    pub m3: F,
    pub m1: F,
}

/// Lines where the potentials have inverse-square walls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularLines {
    /// `y+ = 0`, present when `q+ ≠ 0`.
    pub y_plus: bool,
    /// `y− = 0`, present when `q− ≠ 0`.
    pub y_minus: bool,
    /// `y1 = 0`, present when `s1 ≠ 0`.
    pub y1: bool,
    /// `y2 = 0`, present when `s2 ≠ 0`.
    pub y2: bool,
}

impl SingularLines {
    pub fn any(&self) -> bool {
        self.y_plus || self.y_minus || self.y1 || self.y2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Family3D<F: Field> {
    pub params: FamilyParams<F>,
    pub derived: Derived<F>,
    /// `y1, y2, y+, y−` as functions of `x`.
    pub y: [R<F>; 4],
    pub v: [R<F>; 3],
    pub beta_plus: R<F>,
    pub beta_minus: R<F>,
    /// `β′±`: derivatives with respect to `x±`.
    pub beta_plus_prime: R<F>,
    pub beta_minus_prime: R<F>,
    pub alpha1: R<F>,
    pub alpha2: R<F>,
    pub gamma1: R<F>,
    pub gamma2: R<F>,
    pub v3_poly: R<F>,
    pub w: R<F>,
    pub pot: R<F>,
    pub pot_t: R<F>,
    pub a: Op<F>,
    pub singular: SingularLines,
}

/// Builds the family under the convention `y_i = c x_i + d_i`.
pub fn build_family<F: Field>(p: &FamilyParams<F>) -> Result<Family3D<F>> {
    if p.c.is_zero() {
        return Err(Error::Precondition("c must be nonzero".into()));
    }
    let violated: Vec<String> = p
        .constraint_products()?
        .into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(name, v)| format!("{} = {}", name, v))
        .collect();
    if !violated.is_empty() {
        return Err(Error::Constraint(format!("s±h2 = s±q2 = s−q1 = 0 fails: {}", violated.join(", "))));
    }
    let d = p.derived()?;
    let r2 = sqrt2::<F>()?;
    let inv_r2 = k(&r2.inv());
    let c = k(&p.c);
    let (x1, x2, x3) = (x::<F>(0), x::<F>(1), x::<F>(2));
    let y1 = &(&c * &x1) + &k(&p.d1);
    let y2 = &(&c * &x2) + &k(&p.d2);
    let yp = &(&y1 + &y2) * &inv_r2;
    let ym = &(&y1 - &y2) * &inv_r2;

    let beta = |h: &F, q: &F, y: &R<F>| -> R<F> { &(&k(h) * y) + &k(q).checked_div(y).expect("y± is a nonzero polynomial") };
    let beta_prime = |h: &F, q: &F, y: &R<F>| -> R<F> { &c * &(&k(h) - &k(q).checked_div(&y.pow(2)).expect("nonzero")) };
    let bp = beta(&d.h_plus, &d.q_plus, &yp);
    let bm = beta(&d.h_minus, &d.q_minus, &ym);
    let bpp = beta_prime(&d.h_plus, &d.q_plus, &yp);
    let bmp = beta_prime(&d.h_minus, &d.q_minus, &ym);

    let half = k(&frac(1, 2));
    let v1 = &(&x3 * &y1) + &(&(&bp + &bm) * &inv_r2);
    let v2 = &(-&(&x3 * &y2)) - &(&(&bp - &bm) * &inv_r2);
    let v3 = &(&(&k(&d.a) - &(&(&(&c * &half) * &x1.pow(2)) + &(&k(&p.d1) * &x1))) + &(&(&c * &half) * &x2.pow(2)))
        + &(&k(&p.d2) * &x2);
    if v3.is_zero() {
        return Err(Error::Precondition("v3 vanishes: the two-dimensional reduction is excluded".into()));
    }

    let sqrt2_h1 = k(&(r2.clone() * &p.h1));
    let alpha1 = -&(&(&sqrt2_h1 * &y1.pow(2)) + &k(&p.alpha0));
    let alpha2 = &(&sqrt2_h1 * &y2.pow(2)) + &k(&p.alpha0);
    let c2 = p.c.clone() * &p.c;
    let inner = p.m2.clone() - c2.clone() * F::from_i64(4) * &p.h1 * &p.h1;
    let gamma_core = |y: &R<F>, s: &F| -> R<F> {
        &(&(&y.pow(4) + &(&k(&inner) * &y.pow(2))) + &k(&p.gamma0)) + &k(s).checked_div(&y.pow(2)).expect("nonzero")
    };
    let inv_4c2 = k(&(c2 * F::from_i64(4)).inv());
    let gamma1 = -&(&gamma_core(&y1, &p.s1) * &inv_4c2);
    let gamma2 = &gamma_core(&y2, &p.s2) * &inv_4c2;

    let v3_poly = &(&(&(&k(&(d.m4.clone() * frac::<F>(1, 4))) * &x3.pow(4)) + &(&k(&(d.m3.clone() * frac::<F>(1, 3))) * &x3.pow(3)))
        + &(&k(&(p.m2.clone() * frac::<F>(1, 2))) * &x3.pow(2)))
        + &(&k(&d.m1) * &x3);

    let diff = &(&(&c * &x3).scale(&F::from_i64(2)) + &bpp) + &bmp;
    let sum = v3_poly.scale(&F::from_i64(2))
        + (&x3.pow(2) * &(&yp.pow(2) + &ym.pow(2))).scale(&frac(3, 2))
        + &x3 * &(&(&(&(&yp * &bp) + &(&ym * &bm)) + &alpha2) - &alpha1)
        + &(&bp.pow(2) + &bm.pow(2)) * &half
        + gamma2.clone()
        - gamma1.clone();
    let w = &(&(&(&(&(&c * &v3) * &x3.pow(2)) + &(&(&v3 * &(&bpp + &bmp)) * &x3)) + &(&bp * &bm)) + &(&gamma1 + &gamma2)) * &half;
    let pot = &(&sum - &diff) * &half;
    let pot_t = &(&sum + &diff) * &half;

    let a = family_operator(&[v1.clone(), v2.clone(), v3.clone()], &w);
    let singular = SingularLines {
        y_plus: !d.q_plus.is_zero(),
        y_minus: !d.q_minus.is_zero(),
        y1: !p.s1.is_zero(),
        y2: !p.s2.is_zero(),
    };
    Ok(Family3D {
        params: p.clone(),
        derived: d,
        y: [y1, y2, yp, ym],
        v: [v1, v2, v3],
        beta_plus: bp,
        beta_minus: bm,
        beta_plus_prime: bpp,
        beta_minus_prime: bmp,
        alpha1,
        alpha2,
        gamma1,
        gamma2,
        v3_poly,
        w,
        pot,
        pot_t,
        a,
        singular,
    })
}

/// `A = ∂1² − ∂2² + v·∇ + w`.
pub fn family_operator<F: Field>(v: &[R<F>; 3], w: &R<F>) -> Op<F> {
    let mut a = &d2::<F>(0, 0) - &d2::<F>(1, 1);
    for (i, vi) in v.iter().enumerate() {
        let mut alpha = [0u8; 3];
        alpha[i] = 1;
        a = &a + &LinOp::monomial(Frame::Cartesian, alpha, vi.clone());
    }
    &a + &LinOp::mul_by(Frame::Cartesian, w.clone())
}

const METRIC_DIAG: [i64; 3] = [1, -1, 0];

/// `∂±f = (∂1 f ± ∂2 f)/√2`.
fn d_pm<F: Field>(f: &R<F>, sign: i64) -> R<F> {
    let r = F::sqrt2().expect("checked by the caller").inv();
    (&f.derive(0) + &f.derive(1).scale(&F::from_i64(sign))).scale(&r)
}

/// One entry per defining equation, then the symmetry operators, then the
/// full intertwining relation last.
pub fn check_family<F: Field>(f: &Family3D<F>) -> CheckReport {
    let names = &NAMES;
    let diff = &f.pot_t - &f.pot;
    let sum = &f.pot_t + &f.pot;
    let v = &f.v;
    let w = &f.w;
    let d = &f.derived;
    let p = &f.params;
    let [_, _, yp, ym] = &f.y;
    let bsum = &f.beta_plus_prime + &f.beta_minus_prime;
    let alpha = &f.alpha1 + &f.alpha2;
    let gamma = &f.gamma1 + &f.gamma2;
    let ca_dd = p.c.clone() * &d.a + d.d_plus.clone() * &d.d_minus;
    let expr = |tag: String, r: R<F>| CheckEntry::from_expr(tag, &r, names);

    let mut jobs: Vec<Job> = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            let (diff, v) = (&diff, v);
            jobs.push(Box::new(move || {
                let cij = if i == j { METRIC_DIAG[i] } else { 0 };
                let r = &(&v[j].derive(i) + &v[i].derive(j)) - &diff.scale(&F::from_i64(cij));
                expr(format!("first-order symmetric condition ∂{0}v{1} + ∂{1}v{0} = (Ṽ − V)c{0}{1}", i + 1, j + 1), r)
            }));
        }
    }
    for i in 0..3 {
        let (diff, sum) = (&diff, &sum);
        jobs.push(Box::new(move || {
            let r = &(&sum.derive(i).scale(&F::from_i64(METRIC_DIAG[i])) + &w.derive(i).scale(&F::from_i64(2))) - &(diff * &v[i]);
            expr(format!("gradient condition c{0}{0}∂{0}(Ṽ + V) + 2∂{0}w = (Ṽ − V)v{0}", i + 1), r)
        }));
    }
    jobs.push(Box::new(|| {
        let lhs = (0..3).fold(R::zero(), |acc, i| &acc + &(&v[i] * &sum.derive(i)));
        expr("scalar condition v·∇(Ṽ + V) = 2(Ṽ − V)w".into(), &lhs - &(&diff * w).scale(&F::from_i64(2)))
    }));
    jobs.push(Box::new(|| {
        let rhs = &(&(&v[2] * &bsum) - &(yp * &f.beta_minus)) - &(ym * &f.beta_plus);
        expr("α condition α1 + α2 = v3(β′+ + β′−) − y+β− − y−β+".into(), &alpha - &rhs)
    }));
    jobs.push(Box::new(|| {
        let expect = &R::<F>::var(2).scale(&(p.c.clone() * F::from_i64(2))) + &bsum;
        expr("potential difference Ṽ − V = 2c x3 + β′+ + β′−".into(), &diff - &expect)
    }));
    jobs.push(Box::new(|| {
        let lhs = (&v[2].scale(&(p.c.clone() * F::from_i64(4))) - &R::constant(ca_dd.clone() * F::from_i64(3))).scale(&(p.c.clone() * F::from_i64(2)));
        expr("quartic reduction 2c{4c v3 − 3(ca + d+d−)} = 2m4 v3".into(), &lhs - &v[2].scale(&(d.m4.clone() * F::from_i64(2))))
    }));
    jobs.push(Box::new(|| {
        let lhs = &(&(&alpha.scale(&(p.c.clone() * F::from_i64(4))) + &(yp * &d_pm(&alpha, 1))) + &(ym * &d_pm(&alpha, -1))) - &bsum.scale(&ca_dd);
        expr("cubic reduction (4c + y+∂+ + y−∂−)α − (ca + d+d−)(β′+ + β′−) = 2m3 v3".into(), &lhs - &v[2].scale(&(d.m3.clone() * F::from_i64(2))))
    }));
    jobs.push(Box::new(|| {
        let lhs = &d_pm(&(&(&f.beta_plus * &alpha) + &(yp * &gamma)), 1) + &d_pm(&(&(&f.beta_minus * &alpha) + &(ym * &gamma)), -1);
        let rhs = &v[2] * &(&R::constant(p.m2.clone() * F::from_i64(2)) + &(&yp.pow(2) + &ym.pow(2)).scale(&F::from_i64(3)));
        expr("quadratic reduction ∂+(β+α + y+γ) + ∂−(β−α + y−γ) = v3{2m2 + 3(y+² + y−²)}".into(), &lhs - &rhs)
    }));
    jobs.push(Box::new(|| {
        let lhs = &d_pm(&(&f.beta_plus * &gamma), 1) + &d_pm(&(&f.beta_minus * &gamma), -1);
        let inner = &(&(&(&R::constant(d.m1.clone() * F::from_i64(2)) + &(yp * &f.beta_plus)) + &(ym * &f.beta_minus)) + &f.alpha2) - &f.alpha1;
        expr("linear reduction ∂+(β+γ) + ∂−(β−γ) = v3(2m1 + y+β+ + y−β− + α2 − α1)".into(), &lhs - &(&v[2] * &inner))
    }));
    jobs.push(Box::new(|| op_entry("factorized form of A", factorized_residual(f))));
    jobs.push(Box::new(|| {
        let r = (|| {
            let h = hamiltonian(&f.pot);
            let ad = f.a.adjoint()?;
            LinOp::commutator(&h, &ad.compose(&f.a)?)
        })();
        op_entry("symmetry operator [H, A†A] = 0", r)
    }));
    jobs.push(Box::new(|| {
        let r = (|| {
            let ht = hamiltonian(&f.pot_t);
            let ad = f.a.adjoint()?;
            LinOp::commutator(&ht, &f.a.compose(&ad)?)
        })();
        op_entry("symmetry operator [H̃, AA†] = 0", r)
    }));
    jobs.push(Box::new(|| op_entry("intertwining A H = H̃ A (3D)", Op::intertwining_residual(&f.a, &f.pot, &f.pot_t, 3))));
    CheckReport::run(jobs)
}

fn hamiltonian<F: Field>(v: &R<F>) -> Op<F> {
    LinOp::schrodinger(&LinOp::laplacian(Frame::Cartesian, 3), v.clone())
}

/// `A − [2(∂+ + (x3y+ + β+)/2)(∂− + (x3y− + β−)/2) + v3∂3
///  + (2cv3 − ca − d+d−)/2 x3² + (v3(β′+ + β′−) − y+β− − y−β+)/2 x3 + (γ1 + γ2)/2]`.
fn factorized_residual<F: Field>(f: &Family3D<F>) -> std::result::Result<Op<F>, ExprError> {
    let r = F::sqrt2().expect("family fields contain sqrt2").inv();
    let p = &f.params;
    let d = &f.derived;
    let x3 = R::<F>::var(2);
    let half = frac::<F>(1, 2);
    let [_, _, yp, ym] = &f.y;
    let partial = |sign: i64| -> Op<F> {
        Op::from_terms(Frame::Cartesian, [([1, 0, 0], R::constant(r.clone())), ([0, 1, 0], R::constant(r.clone() * F::from_i64(sign)))])
    };
    let factor = |sign: i64, y: &R<F>, beta: &R<F>| &partial(sign) + &LinOp::mul_by(Frame::Cartesian, (&(&x3 * y) + beta).scale(&half));
    let prod = factor(1, yp, &f.beta_plus).compose(&factor(-1, ym, &f.beta_minus))?.scale(&F::from_i64(2));
    let ca_dd = p.c.clone() * &d.a + d.d_plus.clone() * &d.d_minus;
    let quad = (&f.v[2].scale(&(p.c.clone() * F::from_i64(2))) - &R::constant(ca_dd)).scale(&half);
    let lin = (&(&(&f.v[2] * &(&f.beta_plus_prime + &f.beta_minus_prime)) - &(yp * &f.beta_minus)) - &(ym * &f.beta_plus)).scale(&half);
    let zeroth = &(&(&quad * &x3.pow(2)) + &(&lin * &x3)) + &(&f.gamma1 + &f.gamma2).scale(&half);
    let rebuilt = &(&prod + &LinOp::monomial(Frame::Cartesian, [0, 0, 1], f.v[2].clone())) + &LinOp::mul_by(Frame::Cartesian, zeroth);
    f.a.checked_sub(&rebuilt)
}

/// `w = v·∇(Ṽ + V) / (2(Ṽ − V))`, returned only if the gradient
/// conditions `c_ii ∂i(Ṽ + V) + 2∂i w = (Ṽ − V)v_i` also hold.
pub fn solve_w<F: Field>(v: &[R<F>; 3], pot: &R<F>, pot_t: &R<F>) -> Result<R<F>> {
    let diff = pot_t - pot;
    let sum = pot_t + pot;
    let denom = diff.scale(&F::from_i64(2));
    let inv = denom.recip().ok_or_else(|| Error::Precondition("Ṽ = V: w cannot be solved for".into()))?;
    let w = &(0..3).fold(R::zero(), |acc, i| &acc + &(&v[i] * &sum.derive(i))) * &inv;
    let residuals: Vec<String> = (0..3)
        .filter_map(|i| {
            let r = &(&sum.derive(i).scale(&F::from_i64(METRIC_DIAG[i])) + &w.derive(i).scale(&F::from_i64(2))) - &(&diff * &v[i]);
            (!r.is_zero()).then(|| format!("axis {}: {}", i + 1, r.to_text(&NAMES)))
        })
        .collect();
    if residuals.is_empty() {
        Ok(w)
    } else {
        Err(Error::Inconsistent(format!("gradient condition fails: {}", residuals.join("; "))))
    }
}

/// The closed standard form of `V` (sign `−1`) or `Ṽ` (sign `+1`), with
/// `y = c x + d` and additive constants kept as printed.
pub fn standard_form<F: Field>(f: &Family3D<F>, sign: i64) -> Result<R<F>> {
    let p = &f.params;
    let d = &f.derived;
    let r2 = sqrt2::<F>()?;
    let [y1, y2, yp, ym] = &f.y;
    let x3 = R::<F>::var(2);
    let c = p.c.clone();
    let c2 = c.clone() * &c;
    let ysq = &yp.pow(2) + &ym.pow(2);
    let quad = &ysq.scale(&frac::<F>(3, 4)) + &R::constant(p.m2.clone() * frac::<F>(1, 2) - c2.clone() * F::from_i64(3) * &p.h1 * &p.h1);
    let lin = &(&(&yp.pow(2) - &ym.pow(2)).scale(&(p.h2.clone() / (r2.clone() * F::from_i64(2)))) + &R::constant(p.q1.clone() / &r2))
        + &R::constant(c.clone() * F::from_i64(sign));
    let inv_8c2 = (c2.clone() * F::from_i64(8)).inv();
    let quartic = (&y1.pow(4) + &y2.pow(4)).scale(&inv_8c2);
    let qcoef = p.m2.clone() * &inv_8c2 - frac::<F>(3, 4) * &p.h1 * &p.h1 + frac::<F>(1, 8) * &p.h2 * &p.h2;
    let square = (&y1.pow(2) + &y2.pow(2)).scale(&qcoef);
    let inv = |s: &F, y: &R<F>| R::constant(s.clone()).checked_div(&y.pow(2)).expect("nonzero");
    let walls = (&inv(&p.s1, y1) + &inv(&p.s2, y2)).scale(&inv_8c2);
    let two_c = c.clone() * F::from_i64(-2 * sign);
    let pm_walls = &inv(&(d.q_plus.clone() * (d.q_plus.clone() + &two_c) * frac::<F>(1, 4)), yp)
        + &inv(&(d.q_minus.clone() * (d.q_minus.clone() + &two_c) * frac::<F>(1, 4)), ym);
    let konst = R::constant(c * &p.h1 / &r2);
    Ok(&(&(&(&(&(&(&x3.pow(4).scale(&c2) + &(&quad * &x3.pow(2))) + &(&lin * &x3)) + &quartic) + &square) + &walls) + &pm_walls) + &konst)
}

/// Shift `δ = −m3/(3 m4)` that removes the cubic `x3` term.
pub fn standard_shift<F: Field>(f: &Family3D<F>) -> F {
    -(f.derived.m3.clone() / (f.derived.m4.clone() * F::from_i64(3)))
}

/// Compares the constructed potentials, shifted by `x3 → x3 + δ`, with the
/// closed standard form. Passes iff each difference is a constant.
pub fn standard_form_compare<F: Field>(f: &Family3D<F>) -> Result<CheckReport> {
    standard_form_compare_with(f, &standard_shift(f))
}

pub fn standard_form_compare_with<F: Field>(f: &Family3D<F>, delta: &F) -> Result<CheckReport> {
    let offsets = [F::zero(), F::zero(), delta.clone()];
    let mut entries = Vec::new();
    for (name, pot, sign) in [("V", &f.pot, -1), ("Ṽ", &f.pot_t, 1)] {
        let diff = &pot.shift_vars(&offsets) - &standard_form(f, sign)?;
        let tag = format!("standard form of {} after x3 → x3 + {}: difference is constant", name, delta);
        entries.push(match diff.as_constant() {
            Some(k) => CheckEntry::new(tag, format!("constant {}", k), true),
            None => {
                let moving = match diff.as_poly() {
                    Some(poly) => Poly::from_terms(poly.terms().filter(|(e, _)| **e != [0, 0, 0]).map(|(e, c)| (*e, c.clone()))).to_text(&NAMES),
                    None => diff.to_text(&NAMES),
                };
                CheckEntry::new(tag, format!("non-constant part: {}", moving), false)
            }
        });
    }
    Ok(CheckReport::new(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_rational_expr, QSqrt2, VarSet};

    type Q = QSqrt2;

    fn p(s: &str) -> R<Q> {
        parse_rational_expr(s, VarSet::Space).unwrap()
    }

    #[test]
    fn metric_examples() {
        let mut mp = MetricParams::<Q>::zero();
        mp.c[0] = Q::from(1);
        mp.c[1] = Q::from(-1);
        let g = build_metric(&mp);
        assert_eq!(g.g[0], p("1"));
        assert_eq!(g.g[1], p("-1"));
        assert!(g.g[2..].iter().all(|c| c.is_zero()));

        let mut mp = MetricParams::<Q>::zero();
        mp.a[2] = Q::from(1);
        let g = build_metric(&mp);
        assert_eq!(g.g[0], p("y^2"));
        assert_eq!(g.g[1], p("x^2"));
        assert_eq!(g.g[3], p("-x*y"));
        assert!(check_metric(&mp, &g).overall);
    }

    #[test]
    fn simple_family() {
        let f = build_family(&FamilyParams::with_c(Q::from(1))).unwrap();
        assert_eq!(f.pot, p("z^4 + 3/4*(x^2 + y^2)*z^2 - z + (x^4 + y^4)/8"));
        assert_eq!(f.pot_t, p("z^4 + 3/4*(x^2 + y^2)*z^2 + z + (x^4 + y^4)/8"));
        assert_eq!(f.v[2], p("-(x^2 - y^2)/2"));
        assert_eq!(f.w, p("-(x^2 - y^2)*z^2/4 + (y^4 - x^4)/8"));
        let report = check_family(&f);
        assert!(report.overall, "{:?}", report.first_failure());
        assert_eq!(solve_w(&f.v, &f.pot, &f.pot_t).unwrap(), f.w);
        let std = standard_form_compare(&f).unwrap();
        assert!(std.overall, "{:?}", std);
        assert!(!standard_form_compare_with(&f, &Q::from(1)).unwrap().overall);
    }

    #[test]
    fn constraint_violation() {
        let mut fp = FamilyParams::with_c(Q::from(1));
        fp.s1 = Q::from(1);
        fp.h2 = Q::from(1);
        assert!(matches!(build_family(&fp), Err(Error::Constraint(_))));
    }

    #[test]
    fn inverse_square_terms() {
        let mut fp = FamilyParams::with_c(Q::from(1));
        fp.q1 = Q::from(1);
        let f = build_family(&fp).unwrap();
        assert!(f.singular.y_plus && f.singular.y_minus && !f.singular.y1);
        let report = check_family(&f);
        assert!(report.overall, "{:?}", report.first_failure());
        assert!(standard_form_compare(&f).unwrap().overall);
    }

    #[test]
    fn corrupted_family_fails() {
        let mut f = build_family(&FamilyParams::with_c(Q::from(1))).unwrap();
        f.pot = &f.pot + &p("x");
        let report = check_family(&f);
        assert!(!report.overall);
        assert!(!report.entries.last().unwrap().is_zero);
        assert!(report.entries.iter().any(|e| e.tag.starts_with("gradient condition") && !e.is_zero));
        assert!(matches!(solve_w(&f.v, &f.pot, &f.pot_t), Err(Error::Inconsistent(_))));
        assert!(solve_w(&f.v, &f.pot, &f.pot).is_err());
    }

    #[test]
    fn parameter_sets_close() {
        let sets: Vec<Box<dyn Fn(&mut FamilyParams<Q>)>> = vec![
            Box::new(|f| f.h1 = Q::from(1)),
            Box::new(|f| {
                f.c = Q::from(2);
                f.d1 = Q::from(1);
                f.d2 = Q::from(-1);
            }),
            Box::new(|f| {
                f.s1 = Q::from(1);
                f.s2 = Q::from(1);
            }),
            Box::new(|f| {
                f.m2 = Q::from(3);
                f.alpha0 = Q::from(2);
                f.gamma0 = Q::from(5);
            }),
            Box::new(|f| {
                f.h1 = Q::from(1);
                f.h2 = Q::from(1);
                f.q1 = Q::from(1);
                f.q2 = Q::from(1);
                f.m2 = Q::from(1);
            }),
        ];
        for set in sets {
            let mut fp = FamilyParams::with_c(Q::from(1));
            set(&mut fp);
            let f = build_family(&fp).unwrap();
            let report = check_family(&f);
            assert!(report.overall, "{:?}: {:?}", fp, report.first_failure());
            assert!(standard_form_compare(&f).unwrap().overall, "{:?}", fp);
        }
    }

    #[test]
    fn general_metric_satisfies_both_forms() {
        let mp = MetricParams::<Q> {
            a: [1, 2, -1, 3, 1, -2].map(Q::from),
            b: [1, -2, 3, 1, -1, 2, 1, 1].map(Q::from),
            c: [2, 1, 1, -1, 3, 1].map(Q::from),
        };
        let g = build_metric(&mp);
        let report = check_metric(&mp, &g);
        assert!(report.overall, "{:?}", report.first_failure());
    }
}
