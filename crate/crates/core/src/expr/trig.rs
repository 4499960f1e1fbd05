//! Finite Fourier series in an angle with rational-function coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::owned_ops;
use super::rational::RationalExpr;
use super::scalar::Field;
use super::vars::VarNames;

/// `Σ_k a_k cos(kθ) + b_k sin(kθ)` with `a_k`, `b_k` rational in the other
/// variables.
#[derive(Clone, Debug)]
pub struct TrigPoly<F> {
    harmonics: BTreeMap<u32, (RationalExpr<F>, RationalExpr<F>)>,
}

impl<F: Field> TrigPoly<F> {
    pub fn zero() -> Self {
        TrigPoly { harmonics: BTreeMap::new() }
    }

    pub fn from_rational(r: RationalExpr<F>) -> Self {
        Self::harmonic(0, r, RationalExpr::zero())
    }

    pub fn constant(c: F) -> Self {
        Self::from_rational(RationalExpr::constant(c))
    }

    pub fn cos(k: u32) -> Self {
        Self::harmonic(k, RationalExpr::one(), RationalExpr::zero())
    }

    pub fn sin(k: u32) -> Self {
        Self::harmonic(k, RationalExpr::zero(), RationalExpr::one())
    }

    pub fn harmonic(k: u32, cos: RationalExpr<F>, sin: RationalExpr<F>) -> Self {
        let mut t = Self::zero();
        t.add_harmonic(k, &cos, &sin);
        t
    }

    fn add_harmonic(&mut self, k: u32, cos: &RationalExpr<F>, sin: &RationalExpr<F>) {
        let sin = if k == 0 { RationalExpr::zero() } else { sin.clone() };
        if cos.is_zero() && sin.is_zero() {
            return;
        }
        let entry = self.harmonics.entry(k).or_insert_with(|| (RationalExpr::zero(), RationalExpr::zero()));
        entry.0 = &entry.0 + cos;
        entry.1 = &entry.1 + &sin;
        if entry.0.is_zero() && entry.1.is_zero() {
            self.harmonics.remove(&k);
        }
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (u32, &RationalExpr<F>, &RationalExpr<F>)> {
        self.harmonics.iter().map(|(k, (c, s))| (*k, c, s))
    }

    pub fn is_zero(&self) -> bool {
        self.harmonics.is_empty()
    }

    /// The angle-independent part when nothing else is present.
    pub fn as_rational(&self) -> Option<RationalExpr<F>> {
        match self.harmonics.len() {
            0 => Some(RationalExpr::zero()),
            1 => self.harmonics.get(&0).map(|(c, _)| c.clone()),
            _ => None,
        }
    }

    /// True when every coefficient is a constant, i.e. the series depends on
    /// the angle alone.
    pub fn has_constant_coefficients(&self) -> bool {
        self.harmonics.values().all(|(c, s)| c.as_constant().is_some() && s.as_constant().is_some())
    }

    pub fn depends_on(&self, axis: usize) -> bool {
        self.harmonics.values().any(|(c, s)| c.depends_on(axis) || s.depends_on(axis))
    }

    pub fn scale_by(&self, r: &RationalExpr<F>) -> Self {
        let mut out = Self::zero();
        for (k, (c, s)) in &self.harmonics {
            out.add_harmonic(*k, &(c * r), &(s * r));
        }
        out
    }

    /// Derivative with respect to the angle.
    pub fn derive_angle(&self) -> Self {
        let mut out = Self::zero();
        for (k, (c, s)) in &self.harmonics {
            let kf = F::from_i64(*k as i64);
            out.add_harmonic(*k, &s.scale(&kf), &(-c).scale(&kf));
        }
        out
    }

    /// Derivative of the coefficients with respect to variable slot `axis`.
    pub fn derive_coeffs(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (k, (c, s)) in &self.harmonics {
            out.add_harmonic(*k, &c.derive(axis), &s.derive(axis));
        }
        out
    }

    /// Evaluates at angle `theta` with the coefficients evaluated at `p`.
    pub fn eval_f64(&self, p: &[f64; 3], theta: f64) -> Option<f64> {
        let mut acc = 0.0;
        for (k, (c, s)) in &self.harmonics {
            let ev = |r: &RationalExpr<F>| -> Option<f64> {
                let (num, den) = r.map_parts(|v| v.to_f64());
                let mut d = 1.0;
                for (f, e) in &den {
                    d *= f.eval(p).powi(*e as i32);
                }
                (d != 0.0).then(|| num.eval(p) / d)
            };
            let kt = *k as f64 * theta;
            acc += ev(c)? * kt.cos() + ev(s)? * kt.sin();
        }
        Some(acc)
    }

    pub fn to_text(&self, names: &VarNames) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let mut first = true;
        for (k, (c, s)) in &self.harmonics {
            for (coef, func) in [(c, "cos"), (s, "sin")] {
                if coef.is_zero() {
                    continue;
                }
                let (neg, mag, compound) = coef.text_parts(names);
                if first {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                first = false;
                if *k == 0 {
                    out.push_str(&if compound { format!("({})", mag) } else { mag });
                    continue;
                }
                let angle = if *k == 1 { names.angle.to_string() } else { format!("{}*{}", k, names.angle) };
                let trig = format!("{}({})", func, angle);
                match (mag.as_str(), compound) {
                    ("1", _) => out.push_str(&trig),
                    (_, true) => out.push_str(&format!("({})*{}", mag, trig)),
                    (_, false) => out.push_str(&format!("{}*{}", mag, trig)),
                }
            }
        }
        out
    }
}

impl<F: Field> Default for TrigPoly<F> {
    fn default() -> Self {
        Self::zero()
    }
}

/// Semantic equality, coefficient by coefficient.
impl<F: Field> PartialEq for TrigPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl<F: Field> Add for &TrigPoly<F> {
    type Output = TrigPoly<F>;
    fn add(self, rhs: &TrigPoly<F>) -> TrigPoly<F> {
        let mut out = self.clone();
        for (k, (c, s)) in &rhs.harmonics {
            out.add_harmonic(*k, c, s);
        }
        out
    }
}

impl<F: Field> Sub for &TrigPoly<F> {
    type Output = TrigPoly<F>;
    fn sub(self, rhs: &TrigPoly<F>) -> TrigPoly<F> {
        self + &(-rhs)
    }
}

impl<F: Field> Neg for &TrigPoly<F> {
    type Output = TrigPoly<F>;
    fn neg(self) -> TrigPoly<F> {
        TrigPoly { harmonics: self.harmonics.iter().map(|(k, (c, s))| (*k, (-c, -s))).collect() }
    }
}

impl<F: Field> Mul for &TrigPoly<F> {
    type Output = TrigPoly<F>;
    fn mul(self, rhs: &TrigPoly<F>) -> TrigPoly<F> {
        let half = F::one() / F::from_i64(2);
        let mut out = TrigPoly::zero();
        for (&j, (a1, b1)) in &self.harmonics {
            for (&k, (a2, b2)) in &rhs.harmonics {
                let (sum, diff) = (j + k, j.abs_diff(k));
                // sin((j−k)θ) flips sign when j < k.
                let dsign = if j >= k { half.clone() } else { -half.clone() };
                // cos·cos = ½[cos(j−k) + cos(j+k)]
                let cc = a1 * a2;
                // sin·sin = ½[cos(j−k) − cos(j+k)]
                let ss = b1 * b2;
                // sin_j·cos_k = ½[sin(j+k) + sin(j−k)]
                let sc = b1 * a2;
                // cos_j·sin_k = ½[sin(j+k) − sin(j−k)]
                let cs = a1 * b2;
                let cos_diff = (&cc + &ss).scale(&half);
                let cos_sum = (&cc - &ss).scale(&half);
                let sin_sum = (&sc + &cs).scale(&half);
                let sin_diff = (&sc - &cs).scale(&dsign);
                out.add_harmonic(diff, &cos_diff, &sin_diff);
                out.add_harmonic(sum, &cos_sum, &sin_sum);
            }
        }
        out
    }
}

owned_ops!(TrigPoly);
