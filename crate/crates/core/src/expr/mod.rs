//! Exact expression and differential-operator algebra.

pub mod linop;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod scalar;
pub mod trig;
mod vars;

pub use linop::{Coefficient, Frame, LinOp, MultiIndex};
pub use parse::{parse_constant, parse_expr, parse_rational_expr, parse_trig, Parsed};
pub use poly::{Exponent, Poly};
pub use rational::RationalExpr;
pub use scalar::{parse_rational, Field, QSqrt2};
pub use trig::TrigPoly;
pub use vars::{VarNames, VarSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("division by the zero polynomial at position {pos}")]
    DivisionByZero { pos: usize },
    #[error("pole at point {point}")]
    Pole { point: String },
    #[error("operators live in different coordinate frames ({left:?} vs {right:?})")]
    FrameMismatch { left: Frame, right: Frame },
    #[error("expected a rational expression, found a trigonometric one")]
    NotRational,
    #[error("{0}")]
    Unsupported(String),
}

/// Evaluation point with exact coordinates. Unused axes are zero.
pub type Point<F> = [F; 3];

/// Builds a point from up to three coordinates.
pub fn point<F: Field>(coords: &[F]) -> Point<F> {
    let mut p = [F::zero(), F::zero(), F::zero()];
    for (slot, c) in p.iter_mut().zip(coords) {
        *slot = c.clone();
    }
    p
}

pub(crate) fn point_text<F: Field>(p: &Point<F>) -> String {
    format!("({}, {}, {})", p[0], p[1], p[2])
}
