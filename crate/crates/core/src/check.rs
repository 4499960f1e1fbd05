//! Exact identity reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::expr::{Coefficient, ExprError, LinOp, RationalExpr, VarNames};
use crate::expr::Field;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    /// What identity was checked, in words.
    pub tag: String,
    /// Canonical text of the residual; `0` when the identity holds.
    pub residual: String,
    pub is_zero: bool,
}

impl CheckEntry {
    pub fn new(tag: impl Into<String>, residual: String, is_zero: bool) -> Self {
        CheckEntry { tag: tag.into(), residual, is_zero }
    }

    pub fn from_op<C: Coefficient>(tag: impl Into<String>, op: &LinOp<C>, names: &VarNames) -> Self {
        let z = op.is_zero();
        CheckEntry::new(tag, if z { "0".into() } else { op.to_text(names) }, z)
    }

    pub fn from_expr<F: Field>(tag: impl Into<String>, r: &RationalExpr<F>, names: &VarNames) -> Self {
        CheckEntry::new(tag, r.to_text(names), r.is_zero())
    }

    /// An identity that holds by construction and is recorded as passed.
    pub fn structural(tag: impl Into<String>) -> Self {
        CheckEntry::new(tag, "0 (holds by construction)".into(), true)
    }

    pub fn failed(tag: impl Into<String>, err: &ExprError) -> Self {
        CheckEntry::new(tag, format!("error: {}", err), false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
    /// True iff every entry is zero.
    pub overall: bool,
}

/// A deferred check; evaluated by [`CheckReport::run`].
pub type Job<'a> = Box<dyn Fn() -> CheckEntry + Send + Sync + 'a>;

impl CheckReport {
    pub fn new(entries: Vec<CheckEntry>) -> Self {
        let overall = entries.iter().all(|e| e.is_zero);
        CheckReport { entries, overall }
    }

    /// Evaluates independent checks in parallel. Entry order follows `jobs`.
    pub fn run(jobs: Vec<Job<'_>>) -> Self {
        Self::new(jobs.par_iter().map(|job| job()).collect())
    }

    pub fn first_failure(&self) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| !e.is_zero)
    }

    pub fn entry(&self, tag: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.tag == tag)
    }

    pub fn merge(mut self, other: CheckReport) -> Self {
        self.entries.extend(other.entries);
        self.overall = self.entries.iter().all(|e| e.is_zero);
        self
    }
}
