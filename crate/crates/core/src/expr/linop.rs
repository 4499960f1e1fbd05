//! Linear differential operators `Σ_α c_α ∂^α`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::rational::RationalExpr;
use super::scalar::Field;
use super::trig::TrigPoly;
use super::vars::VarNames;
use super::ExprError;

/// Derivative orders along the three coordinate slots.
pub type MultiIndex = [u8; 3];

/// Coordinate frame of an operator's slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// `(x1, x2, x3)`.
    Cartesian,
    /// `(ρ, φ, z)`.
    Cylindrical,
    /// Screw coordinates `(ρ, θ, ζ)` with `θ = φ − z/b_z`, `ζ = z`.
    Helical,
}

/// Operator coefficient ring. The methods are named rather than operator
/// traits so generic code needs no higher-ranked bounds.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Scalar: Field;

    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: RationalExpr<Self::Scalar>) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, k: &Self::Scalar) -> Self;
    /// Partial derivative along slot `axis`.
    fn derive(&self, axis: usize) -> Self;
    fn to_text(&self, names: &VarNames) -> String;
}

impl<F: Field> Coefficient for RationalExpr<F> {
    type Scalar = F;

    fn zero() -> Self {
        RationalExpr::zero()
    }
    fn is_zero(&self) -> bool {
        RationalExpr::is_zero(self)
    }
    fn from_rational(r: RationalExpr<F>) -> Self {
        r
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, k: &F) -> Self {
        self.scale(k)
    }
    fn derive(&self, axis: usize) -> Self {
        RationalExpr::derive(self, axis)
    }
    fn to_text(&self, names: &VarNames) -> String {
        RationalExpr::to_text(self, names)
    }
}

/// Slot 1 is the angle; the others act on the coefficients.
impl<F: Field> Coefficient for TrigPoly<F> {
    type Scalar = F;

    fn zero() -> Self {
        TrigPoly::zero()
    }
    fn is_zero(&self) -> bool {
        TrigPoly::is_zero(self)
    }
    fn from_rational(r: RationalExpr<F>) -> Self {
        TrigPoly::from_rational(r)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, k: &F) -> Self {
        self.scale_by(&RationalExpr::constant(k.clone()))
    }
    fn derive(&self, axis: usize) -> Self {
        if axis == 1 {
            self.derive_angle()
        } else {
            self.derive_coeffs(axis)
        }
    }
    fn to_text(&self, names: &VarNames) -> String {
        TrigPoly::to_text(self, names)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinOp<C> {
    frame: Frame,
    terms: BTreeMap<MultiIndex, C>,
}

fn binom(n: u8, k: u8) -> i64 {
    (0..k as i64).fold(1, |acc, i| acc * (n as i64 - i) / (i + 1))
}

fn sub_indices(alpha: &MultiIndex) -> impl Iterator<Item = MultiIndex> + '_ {
    (0..=alpha[0]).flat_map(move |a| (0..=alpha[1]).flat_map(move |b| (0..=alpha[2]).map(move |c| [a, b, c])))
}

fn order_of(alpha: &MultiIndex) -> u32 {
    alpha.iter().map(|&a| a as u32).sum()
}

fn derive_multi<C: Coefficient>(c: &C, alpha: &MultiIndex) -> C {
    let mut out = c.clone();
    for (axis, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            if out.is_zero() {
                return out;
            }
            out = out.derive(axis);
        }
    }
    out
}

impl<C: Coefficient> LinOp<C> {
    pub fn zero(frame: Frame) -> Self {
        LinOp { frame, terms: BTreeMap::new() }
    }

    /// Multiplication by `c`.
    pub fn mul_by(frame: Frame, c: C) -> Self {
        Self::monomial(frame, [0, 0, 0], c)
    }

    pub fn identity(frame: Frame) -> Self {
        Self::mul_by(frame, C::from_rational(RationalExpr::one()))
    }

    pub fn monomial(frame: Frame, alpha: MultiIndex, c: C) -> Self {
        let mut op = Self::zero(frame);
        op.add_term(alpha, &c);
        op
    }

    /// `∂` along `axis`.
    pub fn partial(frame: Frame, axis: usize) -> Self {
        let mut alpha = [0; 3];
        alpha[axis] = 1;
        Self::monomial(frame, alpha, C::from_rational(RationalExpr::one()))
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, C)>>(frame: Frame, terms: I) -> Self {
        let mut op = Self::zero(frame);
        for (alpha, c) in terms {
            op.add_term(alpha, &c);
        }
        op
    }

    fn add_term(&mut self, alpha: MultiIndex, c: &C) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.get(&alpha) {
            Some(v) => v.plus(c),
            None => c.clone(),
        };
        if merged.is_zero() {
            self.terms.remove(&alpha);
        } else {
            self.terms.insert(alpha, merged);
        }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C {
        self.terms.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(order_of).max().unwrap_or(0)
    }

    /// True iff every coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    fn same_frame(&self, other: &Self) -> Result<(), ExprError> {
        if self.frame == other.frame {
            Ok(())
        } else {
            Err(ExprError::FrameMismatch { left: self.frame, right: other.frame })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExprError> {
        self.same_frame(other)?;
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(*alpha, c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExprError> {
        self.checked_add(&-other)
    }

    /// Left multiplication of every coefficient by `c`.
    pub fn premultiply(&self, c: &C) -> Self {
        Self::from_terms(self.frame, self.terms.iter().map(|(a, v)| (*a, c.times(v))))
    }

    pub fn scale(&self, k: &C::Scalar) -> Self {
        Self::from_terms(self.frame, self.terms.iter().map(|(a, v)| (*a, v.scaled(k))))
    }

    /// `self ∘ other` by the generalized Leibniz rule.
    pub fn compose(&self, other: &Self) -> Result<Self, ExprError> {
        self.same_frame(other)?;
        let mut out = Self::zero(self.frame);
        // ∂^γ d is shared across all α in `self`.
        let mut cache: HashMap<(MultiIndex, MultiIndex), C> = HashMap::new();
        for (alpha, c) in &self.terms {
            for gamma in sub_indices(alpha) {
                let b = (0..3).map(|i| binom(alpha[i], gamma[i])).product::<i64>();
                let k = C::Scalar::from_i64(b);
                let rest = [alpha[0] - gamma[0], alpha[1] - gamma[1], alpha[2] - gamma[2]];
                for (beta, d) in &other.terms {
                    let dd = cache.entry((*beta, gamma)).or_insert_with(|| derive_multi(d, &gamma));
                    if dd.is_zero() {
                        continue;
                    }
                    let idx = [rest[0] + beta[0], rest[1] + beta[1], rest[2] + beta[2]];
                    out.add_term(idx, &c.times(dd).scaled(&k));
                }
            }
        }
        Ok(out)
    }

    /// Formal adjoint `(c∂^α)† = (−1)^{|α|} ∂^α ∘ c`, Cartesian frame only.
    pub fn adjoint(&self) -> Result<Self, ExprError> {
        if self.frame != Frame::Cartesian {
            return Err(ExprError::Unsupported("formal adjoint is defined for Cartesian operators only".into()));
        }
        let mut out = Self::zero(self.frame);
        for (alpha, c) in &self.terms {
            let sign = if order_of(alpha) % 2 == 0 { 1 } else { -1 };
            for gamma in sub_indices(alpha) {
                let b = sign * (0..3).map(|i| binom(alpha[i], gamma[i])).product::<i64>();
                let dc = derive_multi(c, &gamma);
                let idx = [alpha[0] - gamma[0], alpha[1] - gamma[1], alpha[2] - gamma[2]];
                out.add_term(idx, &dc.scaled(&C::Scalar::from_i64(b)));
            }
        }
        Ok(out)
    }

    /// `Σ c_α ∂^α f`.
    pub fn apply(&self, f: &C) -> C {
        self.terms.iter().fold(C::zero(), |acc, (alpha, c)| acc.plus(&c.times(&derive_multi(f, alpha))))
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> LinOp<D> {
        LinOp::from_terms(self.frame, self.terms.iter().map(|(a, c)| (*a, f(c))))
    }

    /// Flat Laplacian over the first `dim` Cartesian axes, or the
    /// cylindrical Laplacian `∂ρ² + ρ⁻¹∂ρ + ρ⁻²∂φ² + ∂z²`.
    pub fn laplacian(frame: Frame, dim: usize) -> Self {
        let one = || C::from_rational(RationalExpr::one());
        match frame {
            Frame::Cartesian => Self::from_terms(
                frame,
                (0..dim).map(|i| {
                    let mut a = [0; 3];
                    a[i] = 2;
                    (a, one())
                }),
            ),
            Frame::Cylindrical => {
                let rho = RationalExpr::<C::Scalar>::var(0);
                let inv_rho = RationalExpr::one().checked_div(&rho).expect("rho is nonzero");
                Self::from_terms(
                    frame,
                    [
                        ([2, 0, 0], one()),
                        ([1, 0, 0], C::from_rational(inv_rho.clone())),
                        ([0, 2, 0], C::from_rational(&inv_rho * &inv_rho)),
                        ([0, 0, 2], one()),
                    ],
                )
            }
            Frame::Helical => panic!("the screw-frame Laplacian needs the pitch; use LinOp::helical_laplacian"),
        }
    }

    /// Laplacian in screw coordinates `θ = φ − z/b_z`, `ζ = z`:
    /// `∂ρ² + ρ⁻¹∂ρ + (ρ⁻² + b_z⁻²)∂θ² − 2b_z⁻¹∂θ∂ζ + ∂ζ²`.
    pub fn helical_laplacian(b_z: &C::Scalar) -> Self {
        let rho = RationalExpr::<C::Scalar>::var(0);
        let inv_rho = RationalExpr::one().checked_div(&rho).expect("rho is nonzero");
        let inv_b = b_z.inv();
        let theta2 = &(&inv_rho * &inv_rho) + &RationalExpr::constant(inv_b.clone() * &inv_b);
        Self::from_terms(
            Frame::Helical,
            [
                ([2, 0, 0], C::from_rational(RationalExpr::one())),
                ([1, 0, 0], C::from_rational(inv_rho)),
                ([0, 2, 0], C::from_rational(theta2)),
                ([0, 1, 1], C::from_rational(RationalExpr::constant(-(inv_b * C::Scalar::from_i64(2))))),
                ([0, 0, 2], C::from_rational(RationalExpr::one())),
            ],
        )
    }

    /// `−Δ + V` with the given Laplacian.
    pub fn schrodinger(lap: &Self, v: C) -> Self {
        let mut h = -lap;
        h.add_term([0, 0, 0], &v);
        h
    }

    /// `A∘H − H̃∘A`.
    pub fn residual_with(a: &Self, h: &Self, ht: &Self) -> Result<Self, ExprError> {
        a.compose(h)?.checked_sub(&ht.compose(a)?)
    }

    /// `[X, Y] = X∘Y − Y∘X`.
    pub fn commutator(x: &Self, y: &Self) -> Result<Self, ExprError> {
        Self::residual_with(x, y, y)
    }

    pub fn to_text(&self, names: &VarNames) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (alpha, c) in self.terms.iter().rev() {
            let mut d = Vec::new();
            for (axis, &k) in alpha.iter().enumerate() {
                let name = names.names[axis];
                match k {
                    0 => {}
                    1 => d.push(format!("d_{}", name)),
                    _ => d.push(format!("d_{}^{}", name, k)),
                }
            }
            let coef = c.to_text(names);
            if d.is_empty() {
                parts.push(format!("({})", coef));
            } else {
                parts.push(format!("({})*{}", coef, d.join("*")));
            }
        }
        parts.join(" + ")
    }
}

impl<F: Field> LinOp<RationalExpr<F>> {
    /// `A∘H − H̃∘A` with `H = −Δ + V`, `H̃ = −Δ + Ṽ` over the first `dim`
    /// Cartesian axes.
    pub fn intertwining_residual(a: &Self, v: &RationalExpr<F>, vt: &RationalExpr<F>, dim: usize) -> Result<Self, ExprError> {
        let lap = Self::laplacian(Frame::Cartesian, dim);
        let h = Self::schrodinger(&lap, v.clone());
        let ht = Self::schrodinger(&lap, vt.clone());
        Self::residual_with(a, &h, &ht)
    }

    /// The same operator with trigonometric coefficients.
    pub fn to_trig(&self) -> LinOp<TrigPoly<F>> {
        self.map_coeffs(|c| TrigPoly::from_rational(c.clone()))
    }
}

impl<C: Coefficient> Neg for &LinOp<C> {
    type Output = LinOp<C>;
    fn neg(self) -> LinOp<C> {
        LinOp { frame: self.frame, terms: self.terms.iter().map(|(a, c)| (*a, c.negated())).collect() }
    }
}

/// Panics when the frames differ; use `checked_add` to get an error instead.
impl<C: Coefficient> Add for &LinOp<C> {
    type Output = LinOp<C>;
    fn add(self, rhs: &LinOp<C>) -> LinOp<C> {
        self.checked_add(rhs).expect("operators in the same frame")
    }
}

impl<C: Coefficient> Sub for &LinOp<C> {
    type Output = LinOp<C>;
    fn sub(self, rhs: &LinOp<C>) -> LinOp<C> {
        self.checked_sub(rhs).expect("operators in the same frame")
    }
}
