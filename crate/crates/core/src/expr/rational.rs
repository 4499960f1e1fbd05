//! Rational functions with factored denominators.
//!
//! No multivariate gcd is computed. The denominator is kept as a list of
//! monic factors with multiplicities, which makes the common denominator of
//! a sum a matter of matching identical factors. After every operation each
//! factor is trial-divided out of the numerator as far as it goes. Equality
//! and zero tests never depend on how far that cancellation got: a quotient
//! is zero exactly when its numerator is.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::poly::{owned_ops, Exponent, Poly};
use super::scalar::Field;
use super::vars::VarNames;
use super::{point_text, ExprError, Point};

#[derive(Clone, Debug)]
pub struct RationalExpr<F> {
    num: Poly<F>,
    /// Distinct monic non-constant factors with positive multiplicities.
    den: Vec<(Poly<F>, u32)>,
}

/// Splits `p` into a scalar and monic non-constant factors. Monomial content
/// becomes one factor per variable.
fn normalize<F: Field>(p: &Poly<F>) -> (F, Vec<(Poly<F>, u32)>) {
    let content = p.monomial_content();
    let mut factors = Vec::new();
    for (axis, &k) in content.iter().enumerate() {
        if k > 0 {
            factors.push((Poly::var(axis), k));
        }
    }
    let mut rest = p.clone();
    if content != [0, 0, 0] {
        rest = Poly::from_terms(rest.terms().map(|(e, c)| ([e[0] - content[0], e[1] - content[1], e[2] - content[2]], c.clone())));
    }
    if let Some(c) = rest.as_constant() {
        return (c, factors);
    }
    let lc = rest.leading().map(|(_, c)| c.clone()).expect("nonzero");
    factors.push((rest.scale(&lc.inv()), 1));
    (lc, factors)
}

fn merge<F: Field>(into: &mut Vec<(Poly<F>, u32)>, f: &Poly<F>, e: u32) {
    match into.iter_mut().find(|(g, _)| g == f) {
        Some((_, k)) => *k += e,
        None => into.push((f.clone(), e)),
    }
}

impl<F: Field> RationalExpr<F> {
    pub fn zero() -> Self {
        RationalExpr { num: Poly::zero(), den: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(F::from_i64(n))
    }

    pub fn var(axis: usize) -> Self {
        Self::from_poly(Poly::var(axis))
    }

    pub fn from_poly(num: Poly<F>) -> Self {
        RationalExpr { num, den: Vec::new() }
    }

    /// `num / den`, failing when `den` is the zero polynomial.
    pub fn new(num: Poly<F>, den: &Poly<F>) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero { pos: 0 });
        }
        let (lc, factors) = normalize(den);
        let mut out = RationalExpr { num: num.scale(&lc.inv()), den: factors };
        out.cancel();
        Ok(out)
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (f, e) in self.den.iter_mut() {
            while *e > 0 {
                match self.num.div_exact(f) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
    }

    pub fn numerator(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den_factors(&self) -> &[(Poly<F>, u32)] {
        &self.den
    }

    /// The denominator multiplied out.
    pub fn denominator(&self) -> Poly<F> {
        self.den.iter().fold(Poly::one(), |acc, (f, e)| &acc * &f.pow(*e))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_poly(&self) -> Option<&Poly<F>> {
        self.den.is_empty().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<F> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn depends_on(&self, axis: usize) -> bool {
        self.num.depends_on(axis) || self.den.iter().any(|(f, _)| f.depends_on(axis))
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        let (lc, factors) = normalize(&self.num);
        let num = self.denominator().scale(&lc.inv());
        let mut out = RationalExpr { num, den: factors };
        out.cancel();
        Some(out)
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.recip().map(|r| self * &r)
    }

    /// Exact partial derivative by the quotient rule on the factored form.
    pub fn derive(&self, axis: usize) -> Self {
        if self.den.is_empty() {
            return Self::from_poly(self.num.derive(axis));
        }
        // d(n / Π f^e) = (n' P − n Σ e f' P/f) / (Π f^e · P), P = Π f over
        // the factors that depend on the variable.
        let moving: Vec<usize> = (0..self.den.len()).filter(|&i| self.den[i].0.depends_on(axis)).collect();
        if moving.is_empty() {
            return RationalExpr { num: self.num.derive(axis), den: self.den.clone() }.canceled();
        }
        let p = moving.iter().fold(Poly::one(), |acc, &i| &acc * &self.den[i].0);
        let mut sum = Poly::zero();
        for &i in &moving {
            let (f, e) = &self.den[i];
            let others = moving.iter().filter(|&&j| j != i).fold(Poly::one(), |acc, &j| &acc * &self.den[j].0);
            sum = &sum + &(&f.derive(axis) * &others).scale(&F::from_i64(*e as i64));
        }
        let num = &(&self.num.derive(axis) * &p) - &(&self.num * &sum);
        let mut den = self.den.clone();
        for &i in &moving {
            den[i].1 += 1;
        }
        RationalExpr { num, den }.canceled()
    }

    fn canceled(mut self) -> Self {
        self.cancel();
        self
    }

    pub fn eval(&self, p: &Point<F>) -> Result<F, ExprError> {
        let mut den = F::one();
        for (f, e) in &self.den {
            let v = f.eval(p);
            if v.is_zero() {
                return Err(ExprError::Pole { point: point_text(p) });
            }
            for _ in 0..*e {
                den *= &v;
            }
        }
        Ok(self.num.eval(p) / den)
    }

    /// Numerator and denominator factors with coefficients mapped to `G`,
    /// for fast repeated evaluation.
    pub fn map_parts<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> (Poly<G>, Vec<(Poly<G>, u32)>) {
        (self.num.map_coeffs(f), self.den.iter().map(|(p, e)| (p.map_coeffs(f), *e)).collect())
    }

    /// Substitution `x_i → x_i + offsets[i]`.
    pub fn shift_vars(&self, offsets: &[F; 3]) -> Self {
        let id = [
            [F::one(), F::zero(), F::zero()],
            [F::zero(), F::one(), F::zero()],
            [F::zero(), F::zero(), F::one()],
        ];
        self.substitute_affine(&id, offsets)
    }

    /// Substitution `x_i → Σ_j m[i][j] x_j + t[i]`.
    pub fn substitute_affine(&self, m: &[[F; 3]; 3], t: &[F; 3]) -> Self {
        let mut out = Self::from_poly(self.num.substitute_affine(m, t));
        let mut den = Vec::new();
        for (f, e) in &self.den {
            let (lc, factors) = normalize(&f.substitute_affine(m, t));
            out.num = out.num.scale(&lc.inv().pow_i(*e));
            for (g, k) in factors {
                merge(&mut den, &g, k * e);
            }
        }
        out.den = den;
        out.canceled()
    }

    pub fn to_text(&self, names: &VarNames) -> String {
        if self.den.is_empty() {
            return self.num.to_text(names);
        }
        // Clear rational denominators in the numerator for readability.
        let k = self.num.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(&c.common_denominator()));
        let kf = F::from_rational(&num_rational::BigRational::from_integer(k.clone()));
        let num = self.num.scale(&kf);
        let num_text = if num.len() > 1 { format!("({})", num.to_text(names)) } else { num.to_text(names) };
        let mut factors: Vec<&(Poly<F>, u32)> = self.den.iter().collect();
        factors.sort_by_cached_key(|(f, _)| f.sort_key());
        let mut parts = Vec::new();
        if !k.is_one() {
            parts.push(k.to_string());
        }
        for (f, e) in factors {
            let base = if f.len() > 1 { format!("({})", f.to_text(names)) } else { f.to_text(names) };
            parts.push(if *e == 1 { base } else { format!("{}^{}", base, e) });
        }
        let single_power = parts.len() == 1 && self.den[0].0.len() == 1;
        let den_text = if single_power { parts.remove(0) } else { format!("({})", parts.join("*")) };
        format!("{}/{}", num_text, den_text)
    }

    /// `(negative, magnitude, compound)` split used when this expression is a
    /// coefficient inside a larger sum.
    pub fn text_parts(&self, names: &VarNames) -> (bool, String, bool) {
        if self.num.len() == 1 {
            let neg = self.num.leading().map(|(_, c)| c.sign() == std::cmp::Ordering::Less).unwrap_or(false);
            let mag = if neg { (-self).to_text(names) } else { self.to_text(names) };
            // A lone compound scalar prints already parenthesized.
            return (neg, mag, false);
        }
        (false, self.to_text(names), true)
    }

    /// Monomials of the numerator when the expression is a polynomial.
    pub fn monomials(&self) -> Vec<Exponent> {
        self.num.terms().map(|(e, _)| *e).collect()
    }
}

trait PowI {
    fn pow_i(&self, n: u32) -> Self;
}

impl<F: Field> PowI for F {
    fn pow_i(&self, n: u32) -> Self {
        (0..n).fold(F::one(), |acc, _| acc * self)
    }
}

impl<F: Field> Default for RationalExpr<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Field> From<Poly<F>> for RationalExpr<F> {
    fn from(p: Poly<F>) -> Self {
        Self::from_poly(p)
    }
}

/// Semantic equality: `a/b = c/d` iff `a·d − c·b = 0`.
impl<F: Field> PartialEq for RationalExpr<F> {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        (self - other).is_zero()
    }
}

impl<F: Field> Add for &RationalExpr<F> {
    type Output = RationalExpr<F>;
    fn add(self, rhs: &RationalExpr<F>) -> RationalExpr<F> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalExpr { num: &self.num + &rhs.num, den: self.den.clone() }.canceled();
        }
        let mut lcm = self.den.clone();
        for (f, e) in &rhs.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*e),
                None => lcm.push((f.clone(), *e)),
            }
        }
        let cofactor = |den: &[(Poly<F>, u32)]| {
            lcm.iter().fold(Poly::one(), |acc, (f, e)| {
                let have = den.iter().find(|(g, _)| g == f).map(|(_, k)| *k).unwrap_or(0);
                if *e > have {
                    &acc * &f.pow(e - have)
                } else {
                    acc
                }
            })
        };
        let num = &(&self.num * &cofactor(&self.den)) + &(&rhs.num * &cofactor(&rhs.den));
        RationalExpr { num, den: lcm }.canceled()
    }
}

impl<F: Field> Sub for &RationalExpr<F> {
    type Output = RationalExpr<F>;
    fn sub(self, rhs: &RationalExpr<F>) -> RationalExpr<F> {
        self + &(-rhs)
    }
}

impl<F: Field> Mul for &RationalExpr<F> {
    type Output = RationalExpr<F>;
    fn mul(self, rhs: &RationalExpr<F>) -> RationalExpr<F> {
        if self.is_zero() || rhs.is_zero() {
            return RationalExpr::zero();
        }
        let mut den = self.den.clone();
        for (f, e) in &rhs.den {
            merge(&mut den, f, *e);
        }
        RationalExpr { num: &self.num * &rhs.num, den }.canceled()
    }
}

impl<F: Field> Neg for &RationalExpr<F> {
    type Output = RationalExpr<F>;
    fn neg(self) -> RationalExpr<F> {
        RationalExpr { num: -&self.num, den: self.den.clone() }
    }
}

owned_ops!(RationalExpr);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::QSqrt2;
    use num_traits::{One, Zero};

    type R = RationalExpr<QSqrt2>;

    fn x() -> R {
        R::var(0)
    }
    fn n(k: i64) -> R {
        R::from_int(k)
    }

    #[test]
    fn reciprocal_derivative() {
        let inv_x = n(1).checked_div(&x()).unwrap();
        let expect = -(n(1).checked_div(&(&x() * &x())).unwrap());
        assert_eq!(inv_x.derive(0), expect);
    }

    #[test]
    fn cancellation_clears_denominator() {
        let a = &(&x() * &x()) - &n(1);
        let b = &x() - &n(1);
        let q = a.checked_div(&b).unwrap();
        assert!(q.is_polynomial());
        assert_eq!(q, &x() + &n(1));
    }

    #[test]
    fn pole_is_reported() {
        let inv_x = n(1).checked_div(&x()).unwrap();
        let zero = [QSqrt2::zero(), QSqrt2::zero(), QSqrt2::zero()];
        assert!(matches!(inv_x.eval(&zero), Err(ExprError::Pole { .. })));
    }

    #[test]
    fn printed_form_clears_fractions() {
        let s2 = R::constant(QSqrt2::sqrt2().unwrap());
        let e = &n(1).checked_div(&(&n(2) * &(&x() * &x()))).unwrap() + &(&s2 * &x());
        assert_eq!(e.to_text(&VarNames::one_dim()), "(2*sqrt2*x^3 + 1)/(2*x^2)");
    }

    #[test]
    fn shift_completes_the_quartic() {
        // x^4 + (8/3) x^3 shifted by -2/3 has no cubic term.
        let p = &x().pow(4) + &x().pow(3).scale(&QSqrt2::from_ratio(8, 3));
        let s = p.shift_vars(&[QSqrt2::from_ratio(-2, 3), QSqrt2::zero(), QSqrt2::zero()]);
        assert!(s.numerator().coeff(&[3, 0, 0]).is_zero());
        assert_eq!(s.numerator().coeff(&[4, 0, 0]), QSqrt2::one());
    }
}
