//! Sparse polynomials in three variables.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::Field;
use super::vars::VarNames;

/// Exponent triple over the three axes. Lexicographic `Ord` is the canonical
/// term order.
pub type Exponent = [u32; 3];

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F> {
    terms: BTreeMap<Exponent, F>,
}

impl<F: Field> Default for Poly<F> {
    fn default() -> Self {
        Poly::zero()
    }
}

fn divides(a: &Exponent, b: &Exponent) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Poly::monomial([0, 0, 0], c)
    }

    pub fn monomial(exp: Exponent, c: F) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { terms }
    }

    /// The coordinate function of `axis`.
    pub fn var(axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Poly::monomial(e, F::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, F)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Exponent) -> F {
        self.terms.get(exp).cloned().unwrap_or_else(F::zero)
    }

    /// `Some(c)` if the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<F> {
        match self.terms.len() {
            0 => Some(F::zero()),
            1 => self.terms.get(&[0, 0, 0]).cloned(),
            _ => None,
        }
    }

    /// Leading term in lexicographic order.
    pub fn leading(&self) -> Option<(&Exponent, &F)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, axis: usize) -> u32 {
        self.terms.keys().map(|e| e[axis]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn depends_on(&self, axis: usize) -> bool {
        self.terms.keys().any(|e| e[axis] > 0)
    }

    /// Componentwise minimum exponent over all terms: the largest monomial
    /// dividing the polynomial.
    pub fn monomial_content(&self) -> Exponent {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return [0; 3] };
        it.fold(*first, |acc, e| [acc[0].min(e[0]), acc[1].min(e[1]), acc[2].min(e[2])])
    }

    fn add_term(&mut self, exp: Exponent, c: &F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, v)| (*e, v.clone() * c)).collect() }
    }

    /// Multiplies by the monomial `x^exp`.
    pub fn shift(&self, exp: &Exponent) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| ([e[0] + exp[0], e[1] + exp[1], e[2] + exp[2]], v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = &out * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn derive(&self, axis: usize) -> Self {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let mut d = *e;
            d[axis] -= 1;
            out.add_term(d, &(c.clone() * F::from_i64(e[axis] as i64)));
        }
        out
    }

    /// Antiderivative along `axis` vanishing on the plane `x_axis = 0`.
    pub fn integrate(&self, axis: usize) -> Self {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut d = *e;
            d[axis] += 1;
            out.add_term(d, &(c.clone() / F::from_i64(d[axis] as i64)));
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// For a single divisor the lexicographic division algorithm leaves a zero
    /// remainder exactly when the division is exact, and it can stop at the
    /// first leading term not divisible by the divisor's leading term.
    pub fn div_exact(&self, d: &Poly<F>) -> Option<Self> {
        let (de, dc) = d.leading()?;
        let (de, dc_inv) = (*de, dc.inv());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((re, rc)) = rem.leading() {
            if !divides(&de, re) {
                return None;
            }
            let qe = [re[0] - de[0], re[1] - de[1], re[2] - de[2]];
            let qc = rc.clone() * &dc_inv;
            for (e, c) in &d.terms {
                let te = [e[0] + qe[0], e[1] + qe[1], e[2] + qe[2]];
                rem.add_term(te, &-(c.clone() * &qc));
            }
            quot.add_term(qe, &qc);
        }
        Some(quot)
    }

    pub fn eval(&self, point: &[F; 3]) -> F {
        let mut acc = F::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (axis, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= &point[axis];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }

    /// Affine change of variables `x_i → Σ_j m[i][j]·x_j + t[i]`.
    pub fn substitute_affine(&self, m: &[[F; 3]; 3], t: &[F; 3]) -> Self {
        let images: Vec<Poly<F>> = (0..3)
            .map(|i| {
                let mut p = Poly::constant(t[i].clone());
                for (j, mij) in m[i].iter().enumerate() {
                    p = &p + &Poly::var(j).scale(mij);
                }
                p
            })
            .collect();
        // Powers of each image are reused across terms.
        let mut powers: Vec<Vec<Poly<F>>> = vec![vec![Poly::one()]; 3];
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for axis in 0..3 {
                let k = e[axis] as usize;
                while powers[axis].len() <= k {
                    let next = &powers[axis][powers[axis].len() - 1] * &images[axis];
                    powers[axis].push(next);
                }
                if k > 0 {
                    t = &t * &powers[axis][k];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Canonical text, highest lexicographic term first.
    pub fn to_text(&self, names: &VarNames) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag, compound) = c.text_parts();
            let mono = names.monomial(e);
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let unit = mag == "1";
            match (mono.is_empty(), unit, compound) {
                (true, _, true) => out.push_str(&format!("({})", mag)),
                (true, _, false) => out.push_str(&mag),
                (false, true, _) => out.push_str(&mono),
                (false, false, true) => out.push_str(&format!("({})*{}", mag, mono)),
                (false, false, false) => out.push_str(&format!("{}*{}", mag, mono)),
            }
        }
        out
    }

    /// Key used to order denominator factors canonically.
    pub(crate) fn sort_key(&self) -> (u32, Vec<Exponent>, String) {
        (self.total_degree(), self.terms.keys().rev().copied().collect(), self.to_text(&VarNames::cartesian()))
    }
}

impl<F: Field> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: &Poly<F>) -> Poly<F> {
        let (mut big, small) = if self.len() >= rhs.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for (e, c) in &small.terms {
            big.add_term(*e, c);
        }
        big
    }
}

impl<F: Field> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: &Poly<F>) -> Poly<F> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c.clone());
        }
        out
    }
}

impl<F: Field> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: &Poly<F>) -> Poly<F> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut acc: BTreeMap<Exponent, F> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                let prod = ca.clone() * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Poly { terms: acc }
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

macro_rules! owned_ops {
    ($t:ident) => {
        impl<F: Field> Add for $t<F> {
            type Output = $t<F>;
            fn add(self, rhs: $t<F>) -> $t<F> {
                &self + &rhs
            }
        }
        impl<F: Field> Sub for $t<F> {
            type Output = $t<F>;
            fn sub(self, rhs: $t<F>) -> $t<F> {
                &self - &rhs
            }
        }
        impl<F: Field> Mul for $t<F> {
            type Output = $t<F>;
            fn mul(self, rhs: $t<F>) -> $t<F> {
                &self * &rhs
            }
        }
        impl<F: Field> Neg for $t<F> {
            type Output = $t<F>;
            fn neg(self) -> $t<F> {
                -&self
            }
        }
    };
}
pub(crate) use owned_ops;

owned_ops!(Poly);
