//! Isospectral partner Hamiltonians from supersymmetric intertwining.
//!
//! Builds potentials `V`, `Ṽ` and an operator `A` with `AH = H̃A` for
//! `H = −Δ + V`, checks that relation and its consequences as exact operator
//! identities over ℚ(√2), and cross-checks the spectra with finite
//! differences.
//!
//! The symbolic core is generic over [`expr::Field`]; the aliases below fix
//! the exact field used throughout the command-line tool.

pub mod check;
pub mod error;
pub mod expr;
pub mod iso3d_first;
pub mod iso3d_second;
pub mod pair;
pub mod spectra;
pub mod susy1d;

pub use check::{CheckEntry, CheckReport};
pub use error::{Error, Result};

pub type Scalar = expr::QSqrt2;
pub type Poly = expr::Poly<Scalar>;
pub type Rational = expr::RationalExpr<Scalar>;
pub type Trig = expr::TrigPoly<Scalar>;
pub type Operator = expr::LinOp<Rational>;
pub type TrigOperator = expr::LinOp<Trig>;
