//! First-order intertwiners in three dimensions.
//!
//! The first-order coefficients form a Killing vector `v = a×r + b`. After a
//! rotation and an origin shift it is one of: a screw motion (`a ≠ 0`,
//! `a·b ≠ 0`), a rotation about an axis (`a ≠ 0`, `a·b = 0`), or a
//! translation (`a = 0`). Every pair built here decomposes into a 1D pair
//! plus a spectator, and the decomposition is certified as exact identities.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::check::{CheckEntry, CheckReport, Job};
use crate::error::{Error, Result};
use crate::expr::{Coefficient, ExprError, Field, Frame, LinOp, Poly, RationalExpr, TrigPoly, VarNames};

pub type Vec3<F> = [F; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KillingCase {
    Screw,
    Axial,
    Translation,
    Trivial,
}

fn dot<F: Field>(x: &Vec3<F>, y: &Vec3<F>) -> F {
    x[0].clone() * &y[0] + x[1].clone() * &y[1] + x[2].clone() * &y[2]
}

fn cross<F: Field>(x: &Vec3<F>, y: &Vec3<F>) -> Vec3<F> {
    [
        x[1].clone() * &y[2] - x[2].clone() * &y[1],
        x[2].clone() * &y[0] - x[0].clone() * &y[2],
        x[0].clone() * &y[1] - x[1].clone() * &y[0],
    ]
}

fn is_null<F: Field>(x: &Vec3<F>) -> bool {
    x.iter().all(|c| c.is_zero())
}

/// Proper rotation stored as mutually orthogonal unnormalized rows `u_i`
/// with squared norms `n_i`; the rotation itself is `R = diag(n)^{-1/2} U`.
/// Keeping it unnormalized avoids square roots that leave the field.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation<F: Field> {
    pub rows: [Vec3<F>; 3],
    pub norms2: Vec3<F>,
}

impl<F: Field> Rotation<F> {
    fn from_rows(rows: [Vec3<F>; 3]) -> Self {
        let norms2 = [dot(&rows[0], &rows[0]), dot(&rows[1], &rows[1]), dot(&rows[2], &rows[2])];
        Rotation { rows, norms2 }
    }

    pub fn identity() -> Self {
        let e = |i: usize| {
            let mut v = [F::zero(), F::zero(), F::zero()];
            v[i] = F::one();
            v
        };
        Self::from_rows([e(0), e(1), e(2)])
    }

    /// Rows pairwise orthogonal and `det U > 0`.
    pub fn is_proper(&self) -> bool {
        let [u1, u2, u3] = &self.rows;
        dot(u1, u2).is_zero()
            && dot(u2, u3).is_zero()
            && dot(u1, u3).is_zero()
            && dot(u1, &cross(u2, u3)).sign() == Ordering::Greater
    }

    /// The normalized matrix in floating point.
    pub fn to_f64(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            let n = self.norms2[i].to_f64().sqrt();
            for j in 0..3 {
                m[i][j] = self.rows[i][j].to_f64() / n;
            }
        }
        m
    }
}

/// A classified Killing vector `v = a×r + b` with its canonical form.
///
/// Canonical coordinates are `r' = R (r + s)`. For `a ≠ 0` they give
/// `v = |a| Rᵀ (e_z × r' + b_z e_z)`; for `a = 0` they give `v = |b| Rᵀ e_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct KillingVector<F: Field> {
    pub a: Vec3<F>,
    pub b: Vec3<F>,
    pub case_tag: KillingCase,
    /// `(a·b)/|a|²` for a screw motion.
    pub b_z: Option<F>,
    pub rotation: Rotation<F>,
    /// Origin shift `s`, in input coordinates.
    pub shift: Vec3<F>,
}

/// Rotates `a` (or `b` when `a = 0`) onto its canonical axis and removes
/// the transverse part of `b` by an origin shift.
pub fn canonicalize_killing<F: Field>(a: &Vec3<F>, b: &Vec3<F>) -> KillingVector<F> {
    let zero = [F::zero(), F::zero(), F::zero()];
    if !is_null(a) {
        let n = dot(a, a);
        let ab = dot(a, b);
        let s = cross(b, a).map(|c| c / &n);
        let u1 = if a[0].is_zero() && a[2].is_zero() {
            [F::one(), F::zero(), F::zero()]
        } else {
            [a[2].clone(), F::zero(), -a[0].clone()]
        };
        let u2 = cross(a, &u1);
        let rotation = Rotation::from_rows([u1, u2, a.clone()]);
        let (case_tag, b_z) = if ab.is_zero() { (KillingCase::Axial, None) } else { (KillingCase::Screw, Some(ab / &n)) };
        return KillingVector { a: a.clone(), b: b.clone(), case_tag, b_z, rotation, shift: s };
    }
    if !is_null(b) {
        let u2 = if b[0].is_zero() && b[1].is_zero() {
            [F::zero(), F::one(), F::zero()]
        } else {
            [-b[1].clone(), b[0].clone(), F::zero()]
        };
        let u3 = cross(b, &u2);
        let rotation = Rotation::from_rows([b.clone(), u2, u3]);
        return KillingVector { a: a.clone(), b: b.clone(), case_tag: KillingCase::Translation, b_z: None, rotation, shift: zero };
    }
    KillingVector { a: a.clone(), b: b.clone(), case_tag: KillingCase::Trivial, b_z: None, rotation: Rotation::identity(), shift: zero }
}

fn killing_field<F: Field>(a: &Vec3<F>, b: &Vec3<F>) -> [Poly<F>; 3] {
    let r = [Poly::var(0), Poly::var(1), Poly::var(2)];
    let c = |i: usize, j: usize, k: usize| &(&r[k].scale(&a[j]) - &r[j].scale(&a[k])) + &Poly::constant(b[i].clone());
    [c(0, 1, 2), c(1, 2, 0), c(2, 0, 1)]
}

/// `∂i v_j + ∂j v_i = 0` for all index pairs of `v = a×r + b`.
pub fn killing_residual<F: Field>(a: &Vec3<F>, b: &Vec3<F>) -> bool {
    let v = killing_field(a, b);
    (0..3).all(|i| (i..3).all(|j| (&v[j].derive(i) + &v[i].derive(j)).is_zero()))
}

impl<F: Field> KillingVector<F> {
    /// Checks exactly that the recorded rotation is proper and that the
    /// canonical field mapped back reproduces the input field.
    pub fn round_trip_holds(&self) -> bool {
        match self.case_tag {
            KillingCase::Trivial => is_null(&self.a) && is_null(&self.b),
            KillingCase::Translation => {
                let [u1, u2, u3] = &self.rotation.rows;
                // R b = |b| e_x and the field is constant.
                self.rotation.is_proper() && *u1 == self.b && dot(u2, &self.b).is_zero() && dot(u3, &self.b).is_zero()
            }
            KillingCase::Axial | KillingCase::Screw => {
                if !self.rotation.is_proper() || self.rotation.rows[2] != self.a {
                    return false;
                }
                let [u1, u2, _] = &self.rotation.rows;
                let b_z = self.b_z.clone().unwrap_or_else(F::zero);
                // y = r + s as linear polynomials.
                let y: [Poly<F>; 3] = std::array::from_fn(|i| &Poly::var(i) + &Poly::constant(self.shift[i].clone()));
                let proj = |u: &Vec3<F>| (0..3).fold(Poly::zero(), |acc, i| &acc + &y[i].scale(&u[i]));
                let (p1, p2) = (proj(u1), proj(u2));
                let inv_n1 = self.rotation.norms2[0].inv();
                let input = killing_field(&self.a, &self.b);
                (0..3).all(|i| {
                    let back = &(&p1.scale(&u2[i]) - &p2.scale(&u1[i])).scale(&inv_n1) + &Poly::constant(b_z.clone() * &self.a[i]);
                    back == input[i]
                })
            }
        }
    }
}

type ROp<F> = LinOp<RationalExpr<F>>;
type TOp<F> = LinOp<TrigPoly<F>>;

fn op_entry<C: Coefficient>(tag: &str, r: std::result::Result<LinOp<C>, ExprError>, names: &VarNames) -> CheckEntry {
    match r {
        Ok(op) => CheckEntry::from_op(tag, &op, names),
        Err(e) => CheckEntry::failed(tag, &e),
    }
}

/// Translational case `A = ∂x + w(x)` with a spectator `V_yz(y, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationalPair<F: Field> {
    pub w: RationalExpr<F>,
    pub v_yz: RationalExpr<F>,
    pub c: F,
    pub v: RationalExpr<F>,
    pub vt: RationalExpr<F>,
    pub a: ROp<F>,
}

pub fn build_translational<F: Field>(w: &RationalExpr<F>, v_yz: &RationalExpr<F>, c: &F) -> Result<TranslationalPair<F>> {
    if w.depends_on(1) || w.depends_on(2) {
        return Err(Error::Precondition("w must depend on x only".into()));
    }
    if v_yz.depends_on(0) {
        return Err(Error::Precondition("V_yz must not depend on x".into()));
    }
    let w2 = w * w;
    let wp = w.derive(0);
    let base = v_yz + &RationalExpr::constant(c.clone());
    Ok(TranslationalPair {
        w: w.clone(),
        v_yz: v_yz.clone(),
        c: c.clone(),
        v: &(&w2 - &wp) + &base,
        vt: &(&w2 + &wp) + &base,
        a: &LinOp::partial(Frame::Cartesian, 0) + &LinOp::mul_by(Frame::Cartesian, w.clone()),
    })
}

fn partial_sq<F: Field>(axis: usize) -> ROp<F> {
    let mut alpha = [0; 3];
    alpha[axis] = 2;
    LinOp::monomial(Frame::Cartesian, alpha, RationalExpr::one())
}

/// Full 3D intertwining plus the separated identities for the `x` factor
/// and the `(y, z)` spectator.
pub fn check_translational<F: Field>(
    a: &ROp<F>,
    v: &RationalExpr<F>,
    vt: &RationalExpr<F>,
    w: &RationalExpr<F>,
    v_yz: &RationalExpr<F>,
    c: &F,
) -> CheckReport {
    let names = VarNames::xyz();
    let cc = RationalExpr::constant(c.clone());
    let h_yz = LinOp::schrodinger(&(&partial_sq::<F>(1) + &partial_sq(2)), v_yz + &cc);
    let w2 = w * w;
    let wp = w.derive(0);
    let h_x = LinOp::schrodinger(&partial_sq::<F>(0), &w2 - &wp);
    let ht_x = LinOp::schrodinger(&partial_sq::<F>(0), &w2 + &wp);
    let jobs: Vec<Job> = vec![
        Box::new(|| op_entry("intertwining A H = H̃ A (3D)", ROp::intertwining_residual(a, v, vt, 3), &names)),
        Box::new(|| op_entry("spectator commutes: A H_yz = H_yz A", LinOp::commutator(a, &h_yz), &names)),
        Box::new(|| op_entry("x factor: A H_x = H̃_x A", LinOp::residual_with(a, &h_x, &ht_x), &names)),
        Box::new(|| op_entry("sum: A (H_x + H_yz) = (H̃_x + H_yz) A", LinOp::residual_with(a, &(&h_x + &h_yz), &(&ht_x + &h_yz)), &names)),
        Box::new(|| {
            let lap = LinOp::laplacian(Frame::Cartesian, 3);
            let sum = &h_x + &h_yz;
            op_entry("potential splits: H = H_x + H_yz", LinOp::schrodinger(&lap, v.clone()).checked_sub(&sum), &names)
        }),
    ];
    CheckReport::run(jobs)
}

pub fn verify_translational<F: Field>(p: &TranslationalPair<F>) -> CheckReport {
    check_translational(&p.a, &p.v, &p.vt, &p.w, &p.v_yz, &p.c)
}

/// Axial case `A = ∂φ + w(φ)` in cylindrical coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct AxialPair<F: Field> {
    pub w: TrigPoly<F>,
    pub v_rhoz: RationalExpr<F>,
    pub v: TrigPoly<F>,
    pub vt: TrigPoly<F>,
    pub a: TOp<F>,
}

fn inv_rho2<F: Field>() -> RationalExpr<F> {
    RationalExpr::one().checked_div(&RationalExpr::var(0).pow(2)).expect("rho is nonzero")
}

pub fn build_axial<F: Field>(w: &TrigPoly<F>, v_rhoz: &RationalExpr<F>) -> Result<AxialPair<F>> {
    if !w.has_constant_coefficients() {
        return Err(Error::Precondition("w must depend on phi only".into()));
    }
    let w2 = w * w;
    let wp = w.derive_angle();
    let spect = TrigPoly::from_rational(v_rhoz.clone());
    let r2 = inv_rho2();
    Ok(AxialPair {
        w: w.clone(),
        v_rhoz: v_rhoz.clone(),
        v: &(&w2 - &wp).scale_by(&r2) + &spect,
        vt: &(&w2 + &wp).scale_by(&r2) + &spect,
        a: &LinOp::partial(Frame::Cylindrical, 1) + &LinOp::mul_by(Frame::Cylindrical, w.clone()),
    })
}

pub fn check_axial<F: Field>(a: &TOp<F>, v: &TrigPoly<F>, vt: &TrigPoly<F>, w: &TrigPoly<F>, v_rhoz: &RationalExpr<F>) -> CheckReport {
    let names = VarNames::cylindrical();
    let r2 = inv_rho2::<F>();
    let wp = w.derive_angle();
    let wpp = wp.derive_angle();
    let diff = vt - v;
    let lap = TOp::<F>::laplacian(Frame::Cylindrical, 3);
    let trig_entry = |tag: &str, t: TrigPoly<F>| CheckEntry::new(tag, t.to_text(&names), t.is_zero());
    // H_ρz = −∂ρ² − ρ⁻¹∂ρ − ∂z² + V_ρz and H_φ = −∂φ² + w² ∓ w′.
    let rho_z_lap = TOp::<F>::from_terms(
        Frame::Cylindrical,
        [
            ([2, 0, 0], TrigPoly::constant(F::one())),
            ([1, 0, 0], TrigPoly::from_rational(RationalExpr::one().checked_div(&RationalExpr::var(0)).expect("rho"))),
            ([0, 0, 2], TrigPoly::constant(F::one())),
        ],
    );
    let h_rz = LinOp::schrodinger(&rho_z_lap, TrigPoly::from_rational(v_rhoz.clone()));
    let phi_lap = TOp::<F>::monomial(Frame::Cylindrical, [0, 2, 0], TrigPoly::constant(F::one()));
    let w2 = w * w;
    let h_phi = LinOp::schrodinger(&phi_lap, &w2 - &wp);
    let ht_phi = LinOp::schrodinger(&phi_lap, &w2 + &wp);
    let scaled = |h: &TOp<F>| h.premultiply(&TrigPoly::from_rational(r2.clone()));
    let full_h = &scaled(&h_phi) + &h_rz;
    let full_ht = &scaled(&ht_phi) + &h_rz;
    let jobs: Vec<Job> = vec![
        Box::new(|| trig_entry("potential difference Ṽ − V = 2w′(φ)/ρ²", &diff - &wp.scale_by(&r2.scale(&F::from_i64(2))))),
        Box::new(|| {
            let lhs = &v.derive_angle() + &wpp.scale_by(&r2);
            trig_entry("angular identity ∂φV + w″/ρ² = 2ww′/ρ²", &lhs - &(w * &wp).scale_by(&r2.scale(&F::from_i64(2))))
        }),
        Box::new(|| trig_entry("radial equation 2∂ρw = 0", w.derive_coeffs(0))),
        Box::new(|| trig_entry("axial equation 2∂z w = 0", w.derive_coeffs(2))),
        Box::new(|| {
            let rho2 = RationalExpr::var(0).pow(2);
            trig_entry("angular equation 2∂φw = (Ṽ − V)ρ²", &wp.scale_by(&RationalExpr::from_int(2)) - &diff.scale_by(&rho2))
        }),
        Box::new(|| {
            let lhs = &v.derive_angle() + &lap.apply(w);
            trig_entry("zeroth-order equation ∂φV + Δw = (Ṽ − V)w", &lhs - &(&diff * w))
        }),
        Box::new(|| op_entry("radial-axial part commutes: A H_ρz = H_ρz A", LinOp::commutator(a, &h_rz), &names)),
        Box::new(|| op_entry("angular part: A H_φ = H̃_φ A", LinOp::residual_with(a, &h_phi, &ht_phi), &names)),
        Box::new(|| op_entry("decomposition: A (H_φ/ρ² + H_ρz) = (H̃_φ/ρ² + H_ρz) A", LinOp::residual_with(a, &full_h, &full_ht), &names)),
        Box::new(|| {
            let h = LinOp::schrodinger(&lap, v.clone());
            op_entry("decomposed H has potential V", h.checked_sub(&full_h), &names)
        }),
        Box::new(|| {
            let h = LinOp::schrodinger(&lap, v.clone());
            let ht = LinOp::schrodinger(&lap, vt.clone());
            op_entry("intertwining A H = H̃ A (cylindrical)", LinOp::residual_with(a, &h, &ht), &names)
        }),
    ];
    CheckReport::run(jobs)
}

pub fn verify_axial<F: Field>(p: &AxialPair<F>) -> CheckReport {
    check_axial(&p.a, &p.v, &p.vt, &p.w, &p.v_rhoz)
}

/// Screw case: `Ṽ = V = V(ρ, ξ)` with `ξ = b_z φ − z` and the symmetry
/// `A = ∂φ + b_z ∂z`. The potential is a Fourier series in `θ = ξ/b_z`,
/// which makes it `2π b_z`-periodic in `ξ` by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ScrewSystem<F: Field> {
    pub b_z: F,
    /// Series in `θ` with coefficients in `ρ`.
    pub v: TrigPoly<F>,
    /// `A` in `(ρ, φ, z)`.
    pub a: ROp<F>,
}

pub fn build_screw<F: Field>(b_z: &F, v: &TrigPoly<F>) -> Result<ScrewSystem<F>> {
    if b_z.is_zero() {
        return Err(Error::Precondition("b_z must be nonzero for a screw symmetry".into()));
    }
    if v.depends_on(2) {
        return Err(Error::Precondition("screw potential coefficients may depend on rho only".into()));
    }
    let a = ROp::from_terms(Frame::Cylindrical, [([0, 1, 0], RationalExpr::one()), ([0, 0, 1], RationalExpr::constant(b_z.clone()))]);
    Ok(ScrewSystem { b_z: b_z.clone(), v: v.clone(), a })
}

/// Rewrites a first-order constant-coefficient cylindrical operator in
/// screw coordinates: `∂φ → ∂θ`, `∂z → ∂ζ − b_z⁻¹ ∂θ`.
pub fn to_helical<F: Field>(a: &ROp<F>, b_z: &F) -> std::result::Result<TOp<F>, String> {
    if a.frame() != Frame::Cylindrical || a.order() > 1 {
        return Err("expected a first-order cylindrical operator".into());
    }
    let mut out = TOp::zero(Frame::Helical);
    for (alpha, c) in a.terms() {
        let k = c.as_constant().ok_or("screw operator coefficients must be constants")?;
        let piece: TOp<F> = match alpha {
            [0, 0, 0] => LinOp::mul_by(Frame::Helical, TrigPoly::constant(k)),
            [1, 0, 0] => LinOp::monomial(Frame::Helical, [1, 0, 0], TrigPoly::constant(k)),
            [0, 1, 0] => LinOp::monomial(Frame::Helical, [0, 1, 0], TrigPoly::constant(k)),
            _ => TOp::from_terms(
                Frame::Helical,
                [([0, 0, 1], TrigPoly::constant(k.clone())), ([0, 1, 0], TrigPoly::constant(-(k / b_z)))],
            ),
        };
        out = &out + &piece;
    }
    Ok(out)
}

/// `[H, A]` for `H = −Δ + V` with `V` given in `(ρ, φ, z)`; nonzero unless `V`
/// is a function of `ξ` alone, which a series in plain `φ` is not.
pub fn screw_commutator_cylindrical<F: Field>(b_z: &F, v: &TrigPoly<F>) -> TOp<F> {
    let a = TOp::from_terms(Frame::Cylindrical, [([0, 1, 0], TrigPoly::constant(F::one())), ([0, 0, 1], TrigPoly::constant(b_z.clone()))]);
    let h = LinOp::schrodinger(&TOp::laplacian(Frame::Cylindrical, 3), v.clone());
    LinOp::commutator(&h, &a).expect("same frame")
}

pub fn check_screw<F: Field>(b_z: &F, v: &TrigPoly<F>, a: &ROp<F>) -> CheckReport {
    let names = VarNames { names: ["rho", "theta", "zeta"], angle: "theta" };
    let mut entries = Vec::new();
    // A ξ from the first-order coefficients: ∂φξ = b_z, ∂zξ = −1.
    let grad = |alpha: &[u8; 3]| -> Option<RationalExpr<F>> {
        match alpha {
            [0, 1, 0] => Some(RationalExpr::constant(b_z.clone())),
            [0, 0, 1] => Some(RationalExpr::from_int(-1)),
            [1, 0, 0] | [0, 0, 0] => Some(RationalExpr::zero()),
            _ => None,
        }
    };
    let mut a_xi = RationalExpr::zero();
    let mut first_order = a.order() <= 1;
    for (alpha, c) in a.terms() {
        match grad(alpha) {
            Some(g) => a_xi = &a_xi + &(c * &g),
            None => first_order = false,
        }
    }
    let a_xi_ok = first_order && a_xi.is_zero();
    entries.push(CheckEntry::new("A annihilates ξ = b_z φ − z", if a_xi_ok { "0".into() } else { a_xi.to_text(&VarNames::cylindrical()) }, a_xi_ok));
    entries.push(match to_helical(a, b_z) {
        Ok(ah) => {
            let h = LinOp::schrodinger(&TOp::helical_laplacian(b_z), v.clone());
            op_entry("symmetry [H, A] = 0 (screw coordinates)", LinOp::commutator(&h, &ah), &names)
        }
        Err(msg) => CheckEntry::new("symmetry [H, A] = 0 (screw coordinates)", format!("error: {}", msg), false),
    });
    let v_ok = !v.depends_on(2);
    entries.push(CheckEntry::new("V depends on (ρ, ξ) only", if v_ok { "0".into() } else { v.to_text(&names) }, v_ok));
    entries.push(CheckEntry::structural("partner coincides: Ṽ = V"));
    CheckReport::new(entries)
}

pub fn verify_screw<F: Field>(s: &ScrewSystem<F>) -> CheckReport {
    check_screw(&s.b_z, &s.v, &s.a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_rational_expr, parse_trig, QSqrt2, VarSet};

    type Q = QSqrt2;

    fn v3(x: i64, y: i64, z: i64) -> Vec3<Q> {
        [Q::from(x), Q::from(y), Q::from(z)]
    }

    #[test]
    fn canonical_examples() {
        let k = canonicalize_killing(&v3(0, 0, 1), &v3(1, 0, 0));
        assert_eq!(k.case_tag, KillingCase::Axial);
        assert_eq!(k.rotation, Rotation::identity());
        assert!(k.round_trip_holds());

        let k = canonicalize_killing(&v3(0, 0, 0), &v3(0, 1, 0));
        assert_eq!(k.case_tag, KillingCase::Translation);
        assert!(k.round_trip_holds());

        let k = canonicalize_killing(&v3(0, 0, 1), &v3(0, 0, 3));
        assert_eq!(k.case_tag, KillingCase::Screw);
        assert_eq!(k.b_z, Some(Q::from(3)));
        assert!(k.round_trip_holds());

        let k = canonicalize_killing(&v3(0, 0, 0), &v3(0, 0, 0));
        assert_eq!(k.case_tag, KillingCase::Trivial);
    }

    #[test]
    fn translational_examples() {
        let p = |s: &str| parse_rational_expr::<Q>(s, VarSet::Space).unwrap();
        let pair = build_translational(&p("x"), &p("y^2 + z^2"), &Q::from(0)).unwrap();
        assert_eq!(pair.v, p("x^2 + y^2 + z^2 - 1"));
        assert!(verify_translational(&pair).overall);
        let pair = build_translational(&p("x^3"), &p("1/y^2"), &Q::from(0)).unwrap();
        let report = verify_translational(&pair);
        assert!(report.overall, "{:?}", report.first_failure());
        assert!(build_translational(&p("y"), &p("0"), &Q::from(0)).is_err());
    }

    #[test]
    fn axial_examples() {
        let zero = RationalExpr::zero();
        for w in ["sin(phi)", "cos(2*phi)", "3"] {
            let pair = build_axial(&parse_trig::<Q>(w).unwrap(), &zero).unwrap();
            let report = verify_axial(&pair);
            assert!(report.overall, "{}: {:?}", w, report.first_failure());
        }
        let pair = build_axial(&TrigPoly::constant(Q::from(2)), &parse_rational_expr("rho^2 + z", VarSet::Cylinder).unwrap()).unwrap();
        assert_eq!(pair.v, pair.vt);
        assert!(build_axial(&parse_trig::<Q>("rho*sin(phi)").unwrap(), &zero).is_err());
    }

    #[test]
    fn screw_examples() {
        let s = build_screw(&Q::from(1), &parse_trig("rho^2 + cos(phi)").unwrap()).unwrap();
        assert!(verify_screw(&s).overall);
        let s = build_screw(&Q::from(2), &parse_trig("rho^2").unwrap()).unwrap();
        assert!(verify_screw(&s).overall);
        assert!(!screw_commutator_cylindrical(&Q::from(1), &parse_trig("cos(phi)").unwrap()).is_zero());
        assert!(build_screw(&Q::from(0), &TrigPoly::zero()).is_err());
    }
}
