//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   = ["-"] term {("+"|"-") term}
//! term   = factor {("*"|"/") factor}
//! factor = base ["^" uint]
//! base   = number | "sqrt2" | var | trig | "(" expr ")"
//! trig   = ("sin"|"cos") "(" [uint "*"] "phi" ")"
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;

use super::rational::RationalExpr;
use super::scalar::Field;
use super::trig::TrigPoly;
use super::vars::VarSet;
use super::ExprError;

/// Result of parsing: a rational function, or a Fourier series in `phi`.
#[derive(Clone, Debug)]
pub enum Parsed<F> {
    Rational(RationalExpr<F>),
    Trig(TrigPoly<F>),
}

impl<F: Field> PartialEq for Parsed<F> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Parsed::Rational(a), Parsed::Rational(b)) => a == b,
            (Parsed::Trig(a), Parsed::Trig(b)) => a == b,
            _ => false,
        }
    }
}

impl<F: Field> Parsed<F> {
    pub fn into_trig(self) -> TrigPoly<F> {
        match self {
            Parsed::Rational(r) => TrigPoly::from_rational(r),
            Parsed::Trig(t) => t,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(text[start..i].parse().expect("digits")), start));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or(c);
            return Err(ExprError::Syntax { pos: i, msg: format!("unexpected character `{}`", ch) });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

#[derive(Clone)]
enum Val<F> {
    Rat(RationalExpr<F>),
    Trig(TrigPoly<F>),
}

impl<F: Field> Val<F> {
    fn trig(self) -> TrigPoly<F> {
        match self {
            Val::Rat(r) => TrigPoly::from_rational(r),
            Val::Trig(t) => t,
        }
    }

    fn combine(self, rhs: Val<F>, op: char) -> Val<F> {
        match (self, rhs) {
            (Val::Rat(a), Val::Rat(b)) => Val::Rat(match op {
                '+' => &a + &b,
                '-' => &a - &b,
                _ => &a * &b,
            }),
            (a, b) => {
                let (a, b) = (a.trig(), b.trig());
                Val::Trig(match op {
                    '+' => &a + &b,
                    '-' => &a - &b,
                    _ => &a * &b,
                })
            }
        }
    }
}

struct Parser<'a, F> {
    toks: &'a [(Tok, usize)],
    at: usize,
    vars: VarSet,
    _f: std::marker::PhantomData<F>,
}

/// Largest accepted exponent after `^`.
const MAX_POWER: u32 = 64;

impl<'a, F: Field> Parser<'a, F> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{}`", c))
        }
    }

    fn uint(&mut self) -> Result<BigInt, ExprError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.err("expected an unsigned integer"),
        }
    }

    fn expr(&mut self) -> Result<Val<F>, ExprError> {
        let negate = *self.peek() == Tok::Op('-');
        if negate {
            self.bump();
        }
        let mut acc = self.term()?;
        if negate {
            acc = Val::Rat(RationalExpr::from_int(-1)).combine(acc, '*');
        }
        while let Tok::Op(op @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            acc = acc.combine(rhs, op);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Val<F>, ExprError> {
        let mut acc = self.factor()?;
        loop {
            match *self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.combine(rhs, '*');
                }
                Tok::Op('/') => {
                    self.bump();
                    let pos = self.pos();
                    let inv = match self.factor()? {
                        Val::Rat(r) => r.recip().ok_or(ExprError::DivisionByZero { pos })?,
                        Val::Trig(t) => match t.as_rational() {
                            Some(r) => r.recip().ok_or(ExprError::DivisionByZero { pos })?,
                            None => {
                                return Err(ExprError::Syntax { pos, msg: "cannot divide by a trigonometric expression".into() })
                            }
                        },
                    };
                    acc = acc.combine(Val::Rat(inv), '*');
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Val<F>, ExprError> {
        let base = self.base()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let n = self.uint()?;
        let n: u32 = match u32::try_from(&n) {
            Ok(n) if n <= MAX_POWER => n,
            _ => return Err(ExprError::Syntax { pos, msg: format!("exponent larger than {}", MAX_POWER) }),
        };
        Ok(match base {
            Val::Rat(r) => Val::Rat(r.pow(n)),
            Val::Trig(t) => Val::Trig((0..n).fold(TrigPoly::constant(F::one()), |acc, _| &acc * &t)),
        })
    }

    fn base(&mut self) -> Result<Val<F>, ExprError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(n) => Ok(Val::Rat(RationalExpr::constant(F::from_rational(&BigRational::from_integer(n))))),
            Tok::Op('(') => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Ident(name) => self.ident(&name, pos),
            Tok::End => Err(ExprError::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Op(c) => Err(ExprError::Syntax { pos, msg: format!("unexpected `{}`", c) }),
        }
    }

    fn ident(&mut self, name: &str, pos: usize) -> Result<Val<F>, ExprError> {
        match name {
            "sqrt2" => match F::sqrt2() {
                Some(s) => Ok(Val::Rat(RationalExpr::constant(s))),
                None => Err(ExprError::Syntax { pos, msg: "sqrt2 is not in the coefficient field".into() }),
            },
            "sin" | "cos" => {
                if self.vars != VarSet::Cylinder {
                    return Err(ExprError::UnknownVariable { name: "phi".into(), pos });
                }
                self.expect('(')?;
                let mut k = BigInt::from(1);
                if let Tok::Num(_) = self.peek() {
                    k = self.uint()?;
                    self.expect('*')?;
                }
                match self.peek() {
                    Tok::Ident(v) if v == "phi" => {
                        self.bump();
                    }
                    _ => return self.err("expected `phi`"),
                }
                self.expect(')')?;
                let k = u32::try_from(&k).map_err(|_| ExprError::Syntax { pos, msg: "harmonic too large".into() })?;
                Ok(Val::Trig(if name == "sin" { TrigPoly::sin(k) } else { TrigPoly::cos(k) }))
            }
            "phi" if self.vars == VarSet::Cylinder => {
                Err(ExprError::Syntax { pos, msg: "phi may only appear inside sin(...) or cos(...)".into() })
            }
            _ => match self.vars.slot(name) {
                Some(axis) => Ok(Val::Rat(RationalExpr::var(axis))),
                None => Err(ExprError::UnknownVariable { name: name.to_string(), pos }),
            },
        }
    }
}

/// Parses `text` over the variables of `vars`.
pub fn parse_expr<F: Field>(text: &str, vars: VarSet) -> Result<Parsed<F>, ExprError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks: &toks, at: 0, vars, _f: std::marker::PhantomData };
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(match v {
        Val::Rat(r) => Parsed::Rational(r),
        Val::Trig(t) => match t.as_rational() {
            Some(r) => Parsed::Rational(r),
            None => Parsed::Trig(t),
        },
    })
}

pub fn parse_rational_expr<F: Field>(text: &str, vars: VarSet) -> Result<RationalExpr<F>, ExprError> {
    match parse_expr(text, vars)? {
        Parsed::Rational(r) => Ok(r),
        Parsed::Trig(_) => Err(ExprError::NotRational),
    }
}

pub fn parse_trig<F: Field>(text: &str) -> Result<TrigPoly<F>, ExprError> {
    parse_expr(text, VarSet::Cylinder).map(Parsed::into_trig)
}

/// Parses a variable-free expression such as `-3/4` or `1 - sqrt2/2`.
pub fn parse_constant<F: Field>(text: &str) -> Result<F, ExprError> {
    let r = parse_rational_expr::<F>(text, VarSet::Line)?;
    r.as_constant().ok_or(ExprError::Syntax { pos: 0, msg: format!("`{}` is not a constant", text.trim()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{QSqrt2, VarNames};

    fn rat(text: &str, vars: VarSet) -> RationalExpr<QSqrt2> {
        parse_rational_expr(text, vars).unwrap()
    }

    #[test]
    fn polynomial_text() {
        let p = rat("x^2 - 1", VarSet::Line);
        assert_eq!(p, rat("x1*x1 - 1", VarSet::Line));
        assert_eq!(p.to_text(&VarNames::one_dim()), "x^2 - 1");
    }

    #[test]
    fn rational_normalization() {
        let e = rat("1/(2*x^2) + sqrt2*x", VarSet::Line);
        assert_eq!(e.to_text(&VarNames::one_dim()), "(2*sqrt2*x^3 + 1)/(2*x^2)");
    }

    #[test]
    fn trig_harmonics() {
        let t = parse_trig::<QSqrt2>("sin(phi) - 2*cos(3*phi)/rho^2").unwrap();
        let ks: Vec<u32> = t.harmonics().map(|(k, _, _)| k).collect();
        assert_eq!(ks, vec![1, 3]);
        let again = parse_trig::<QSqrt2>(&t.to_text(&VarNames::cylindrical())).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_expr::<QSqrt2>("x + * 2", VarSet::Line).unwrap_err(),
            ExprError::Syntax { pos: 4, msg: "unexpected `*`".into() }
        );
        assert_eq!(
            parse_expr::<QSqrt2>("x + y", VarSet::Line).unwrap_err(),
            ExprError::UnknownVariable { name: "y".into(), pos: 4 }
        );
        assert_eq!(parse_expr::<QSqrt2>("1/(x - x)", VarSet::Line).unwrap_err(), ExprError::DivisionByZero { pos: 2 });
        assert!(matches!(parse_expr::<QSqrt2>("phi + 1", VarSet::Cylinder), Err(ExprError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_expr::<QSqrt2>("(x + 1", VarSet::Line), Err(ExprError::Syntax { pos: 6, .. })));
    }

    #[test]
    fn constants() {
        assert_eq!(parse_constant::<QSqrt2>("-3/4").unwrap(), QSqrt2::from_ratio(-3, 4));
        let s: QSqrt2 = "1 - sqrt2/2".parse().unwrap();
        assert_eq!(s.to_string(), "1 - 1/2*sqrt2");
        assert!(parse_constant::<QSqrt2>("x").is_err());
    }
}
