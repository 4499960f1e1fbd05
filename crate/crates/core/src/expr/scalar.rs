//! Coefficient fields.
//!
//! Everything symbolic in this crate is generic over [`Field`]. The exact
//! workhorse is [`QSqrt2`], the quadratic field ℚ(√2); plain [`BigRational`]
//! works wherever no √2 is needed, and `f64`/`f32` implement the trait so the
//! same polynomial code can be evaluated in floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A commutative field usable as a polynomial coefficient.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    fn from_i64(n: i64) -> Self;

    fn from_rational(r: &BigRational) -> Self;

    /// `Some(√2)` when the field contains it.
    fn sqrt2() -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Sign of the element. Exact for the exact fields.
    fn sign(&self) -> Ordering;

    /// Splits the element into `(negative, magnitude text, compound)` for the
    /// expression printer. `compound` means the magnitude needs parentheses
    /// when it multiplies something.
    fn text_parts(&self) -> (bool, String, bool);

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }

    /// Smallest positive integer that clears the rational denominators.
    fn common_denominator(&self) -> BigInt {
        BigInt::one()
    }
}

fn rational_text(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact element `rat + sqrt2 * √2` of ℚ(√2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    rat: BigRational,
    sqrt2: BigRational,
}

impl QSqrt2 {
    pub fn new(rat: BigRational, sqrt2: BigRational) -> Self {
        QSqrt2 { rat, sqrt2 }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        QSqrt2::from(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The element `q·√2`.
    pub fn sqrt2_times(q: BigRational) -> Self {
        QSqrt2 { rat: BigRational::zero(), sqrt2: q }
    }

    pub fn rat_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.sqrt2
    }

    pub fn is_rational(&self) -> bool {
        self.sqrt2.is_zero()
    }

    /// Galois conjugate `rat − sqrt2·√2`.
    pub fn conjugate(&self) -> Self {
        QSqrt2 { rat: self.rat.clone(), sqrt2: -self.sqrt2.clone() }
    }

    /// Field norm `rat² − 2·sqrt2²`; nonzero for every nonzero element.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat - BigRational::from_integer(BigInt::from(2)) * &self.sqrt2 * &self.sqrt2
    }
}

impl From<BigRational> for QSqrt2 {
    fn from(rat: BigRational) -> Self {
        QSqrt2 { rat, sqrt2: BigRational::zero() }
    }
}

impl From<i64> for QSqrt2 {
    fn from(n: i64) -> Self {
        QSqrt2::from(BigRational::from_integer(BigInt::from(n)))
    }
}

impl fmt::Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSqrt2({})", self)
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (neg, mag, compound) = self.text_parts();
        match (neg, compound) {
            (false, _) => write!(f, "{}", mag),
            (true, false) => write!(f, "-{}", mag),
            (true, true) => write!(f, "-({})", mag),
        }
    }
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        QSqrt2 { rat: BigRational::zero(), sqrt2: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.sqrt2.is_zero()
    }
}

impl One for QSqrt2 {
    fn one() -> Self {
        QSqrt2 { rat: BigRational::one(), sqrt2: BigRational::zero() }
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { rat: -self.rat, sqrt2: -self.sqrt2 }
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { rat: -self.rat.clone(), sqrt2: -self.sqrt2.clone() }
    }
}

impl<'a> AddAssign<&'a QSqrt2> for QSqrt2 {
    fn add_assign(&mut self, rhs: &'a QSqrt2) {
        self.rat += &rhs.rat;
        if !rhs.sqrt2.is_zero() {
            self.sqrt2 += &rhs.sqrt2;
        }
    }
}

impl<'a> SubAssign<&'a QSqrt2> for QSqrt2 {
    fn sub_assign(&mut self, rhs: &'a QSqrt2) {
        self.rat -= &rhs.rat;
        if !rhs.sqrt2.is_zero() {
            self.sqrt2 -= &rhs.sqrt2;
        }
    }
}

impl<'a> MulAssign<&'a QSqrt2> for QSqrt2 {
    fn mul_assign(&mut self, rhs: &'a QSqrt2) {
        *self = &*self * rhs;
    }
}

impl<'a> Mul<&'a QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: &'a QSqrt2) -> QSqrt2 {
        // (a + b√2)(c + d√2) = (ac + 2bd) + (ad + bc)√2
        match (self.sqrt2.is_zero(), rhs.sqrt2.is_zero()) {
            (true, true) => QSqrt2::from(&self.rat * &rhs.rat),
            (true, false) => QSqrt2 { rat: &self.rat * &rhs.rat, sqrt2: &self.rat * &rhs.sqrt2 },
            (false, true) => QSqrt2 { rat: &self.rat * &rhs.rat, sqrt2: &self.sqrt2 * &rhs.rat },
            (false, false) => {
                let two = BigRational::from_integer(BigInt::from(2));
                QSqrt2 {
                    rat: &self.rat * &rhs.rat + two * &self.sqrt2 * &rhs.sqrt2,
                    sqrt2: &self.rat * &rhs.sqrt2 + &self.sqrt2 * &rhs.rat,
                }
            }
        }
    }
}

impl<'a> Div<&'a QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn div(self, rhs: &'a QSqrt2) -> QSqrt2 {
        assert!(!rhs.is_zero(), "division by zero in QSqrt2");
        if rhs.sqrt2.is_zero() {
            return QSqrt2 { rat: &self.rat / &rhs.rat, sqrt2: &self.sqrt2 / &rhs.rat };
        }
        let n = rhs.norm();
        let num = self * &rhs.conjugate();
        QSqrt2 { rat: num.rat / &n, sqrt2: num.sqrt2 / n }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl $tr<QSqrt2> for QSqrt2 {
            type Output = QSqrt2;
            fn $method(self, rhs: QSqrt2) -> QSqrt2 {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QSqrt2> for QSqrt2 {
            type Output = QSqrt2;
            fn $method(self, rhs: &'a QSqrt2) -> QSqrt2 {
                (&self).$method(rhs)
            }
        }
        impl $tr<QSqrt2> for &QSqrt2 {
            type Output = QSqrt2;
            fn $method(self, rhs: QSqrt2) -> QSqrt2 {
                self.$method(&rhs)
            }
        }
        impl $assign_tr<QSqrt2> for QSqrt2 {
            fn $assign(&mut self, rhs: QSqrt2) {
                self.$assign(&rhs)
            }
        }
    };
}

impl<'a> Add<&'a QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: &'a QSqrt2) -> QSqrt2 {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: &'a QSqrt2) -> QSqrt2 {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

impl Div<QSqrt2> for QSqrt2 {
    type Output = QSqrt2;
    fn div(self, rhs: QSqrt2) -> QSqrt2 {
        &self / &rhs
    }
}

impl<'a> Div<&'a QSqrt2> for QSqrt2 {
    type Output = QSqrt2;
    fn div(self, rhs: &'a QSqrt2) -> QSqrt2 {
        &self / rhs
    }
}

impl Field for QSqrt2 {
    fn from_i64(n: i64) -> Self {
        QSqrt2::from(n)
    }

    fn from_rational(r: &BigRational) -> Self {
        QSqrt2::from(r.clone())
    }

    fn sqrt2() -> Option<Self> {
        Some(QSqrt2::sqrt2_times(BigRational::one()))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(&self.rat).unwrap_or(f64::NAN)
            + ToPrimitive::to_f64(&self.sqrt2).unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    fn sign(&self) -> Ordering {
        let sr = self.rat.cmp(&BigRational::zero());
        let ss = self.sqrt2.cmp(&BigRational::zero());
        match (sr, ss) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (a, b) if a == b => a,
            // Opposite signs: the part with larger magnitude wins.
            (a, _) => {
                let rat_sq = &self.rat * &self.rat;
                let s2_sq = BigRational::from_integer(BigInt::from(2)) * &self.sqrt2 * &self.sqrt2;
                if rat_sq > s2_sq {
                    a
                } else {
                    a.reverse()
                }
            }
        }
    }

    fn common_denominator(&self) -> BigInt {
        self.rat.denom().lcm(self.sqrt2.denom())
    }

    fn text_parts(&self) -> (bool, String, bool) {
        let two_part = |q: &BigRational| -> String {
            if q.abs().is_one() {
                "sqrt2".to_string()
            } else {
                format!("{}*sqrt2", rational_text(&q.abs()))
            }
        };
        match (self.rat.is_zero(), self.sqrt2.is_zero()) {
            (_, true) => (self.rat.is_negative(), rational_text(&self.rat.abs()), false),
            (true, false) => (self.sqrt2.is_negative(), two_part(&self.sqrt2), false),
            (false, false) => {
                // Factor the sign of the rational part out front.
                let neg = self.rat.is_negative();
                let (r, s) = if neg { (-self.rat.clone(), -self.sqrt2.clone()) } else { (self.rat.clone(), self.sqrt2.clone()) };
                let op = if s.is_negative() { "-" } else { "+" };
                (neg, format!("{} {} {}", rational_text(&r), op, two_part(&s)), true)
            }
        }
    }
}

impl FromStr for QSqrt2 {
    type Err = crate::expr::ExprError;

    /// Parses a constant expression such as `3/4`, `-2`, or `1 + sqrt2/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::expr::parse::parse_constant(s)
    }
}

impl Serialize for QSqrt2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QSqrt2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Field for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn sqrt2() -> Option<Self> {
        None
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn sign(&self) -> Ordering {
        self.cmp(&BigRational::zero())
    }
    fn common_denominator(&self) -> BigInt {
        self.denom().clone()
    }
    fn text_parts(&self) -> (bool, String, bool) {
        (self.is_negative(), rational_text(&self.abs()), false)
    }
}

macro_rules! float_field {
    ($t:ty, $sqrt2:expr) => {
        impl Field for $t {
            fn from_i64(n: i64) -> Self {
                n as $t
            }
            fn from_rational(r: &BigRational) -> Self {
                ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $t
            }
            fn sqrt2() -> Option<Self> {
                Some($sqrt2)
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn sign(&self) -> Ordering {
                self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
            }
            fn text_parts(&self) -> (bool, String, bool) {
                (*self < 0.0, format!("{}", self.abs()), false)
            }
        }
    };
}

float_field!(f64, std::f64::consts::SQRT_2);
float_field!(f32, std::f32::consts::SQRT_2);

/// Parses `p`, `p/q`, or a decimal like `-0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let mut n: BigInt = digits.parse().ok()?;
        if neg {
            n = -n;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(n, den));
    }
    t.parse::<BigInt>().ok().map(BigRational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, s: i64) -> QSqrt2 {
        QSqrt2::new(BigRational::from_integer(p.into()), BigRational::from_integer(s.into()))
    }

    #[test]
    fn inverse_and_products_stay_in_field() {
        let a = q(3, -2);
        let b = q(1, 1);
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&a * &a.inv(), QSqrt2::one());
        // √2·√2 = 2
        let s = QSqrt2::sqrt2().unwrap();
        assert_eq!(&s * &s, QSqrt2::from(2));
    }

    #[test]
    fn exact_sign() {
        assert_eq!(q(3, -2).sign(), Ordering::Greater); // 3 − 2√2 ≈ 0.17
        assert_eq!(q(-3, 2).sign(), Ordering::Less);
        assert_eq!(q(1, -1).sign(), Ordering::Less);
        assert_eq!(q(0, 0).sign(), Ordering::Equal);
        assert_eq!(q(-1, 1).sign(), Ordering::Greater);
    }

    #[test]
    fn display_forms() {
        assert_eq!(QSqrt2::from_ratio(-3, 2).to_string(), "-3/2");
        assert_eq!(q(0, 1).to_string(), "sqrt2");
        assert_eq!(q(1, -2).to_string(), "1 - 2*sqrt2");
        assert_eq!(q(-1, -2).to_string(), "-(1 + 2*sqrt2)");
    }

    #[test]
    fn rational_text_forms() {
        assert_eq!(parse_rational("-3/4"), Some(BigRational::new((-3).into(), 4.into())));
        assert_eq!(parse_rational("-0.25"), Some(BigRational::new((-1).into(), 4.into())));
        assert_eq!(parse_rational("7"), Some(BigRational::from_integer(7.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }
}
