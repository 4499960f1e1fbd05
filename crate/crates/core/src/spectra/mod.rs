//! Finite-difference cross-validation of partner spectra.
//!
//! Both Hamiltonians are discretized on the same Dirichlet box, their lowest
//! levels computed, and the two lists matched greedily. Each eigenvector of
//! `H` is pushed through the discretized intertwiner to measure how well
//! `H̃(Aψ) = E(Aψ)` survives on the grid.

mod csv_io;
pub mod eigen;
pub mod grid;

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use csv_io::{compare_csv, read_csv, write_csv, CompareReport, CsvRow};
pub use eigen::{lowest_eigs, EigenPairs};
pub use grid::{schrodinger_matrix, CsrMatrix, Grid, StencilOrder};

use crate::error::{Error, Result};
use crate::expr::{Field, Frame, LinOp, MultiIndex, Poly, RationalExpr};
use crate::iso3d_first::TranslationalPair;
use crate::iso3d_second::Family3D;
use crate::susy1d::PartnerPair1D;

type R<F> = RationalExpr<F>;
type Op<F> = LinOp<R<F>>;

/// `‖Aψ‖/‖ψ‖` below this marks `ψ` as annihilated by `A`.
pub const ZERO_MODE_RATIO: f64 = 1e-6;

/// Orientation of the grid axes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoxFrame {
    /// Axes along `x1, x2, x3`.
    #[default]
    #[serde(rename = "standard")]
    Standard,
    /// Axes along `x+ = (x1 + x2)/√2`, `x− = (x1 − x2)/√2`, `x3`.
    #[serde(rename = "rot45")]
    Rotated45,
}

impl std::str::FromStr for BoxFrame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(BoxFrame::Standard),
            "rot45" => Ok(BoxFrame::Rotated45),
            _ => Err(Error::InvalidRequest(format!("unknown frame '{}': expected standard or rot45", s))),
        }
    }
}

impl fmt::Display for BoxFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoxFrame::Standard => "standard",
            BoxFrame::Rotated45 => "rot45",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

/// A product of intervals in the chosen frame.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    pub intervals: Vec<Interval>,
    pub frame: BoxFrame,
    /// Minimum distance from singular lines; one grid spacing when absent.
    pub margin: Option<BigRational>,
}

impl BoxDomain {
    pub fn new(intervals: Vec<Interval>, frame: BoxFrame, margin: Option<BigRational>) -> Result<Self> {
        if intervals.is_empty() || intervals.len() > 3 {
            return Err(Error::InvalidRequest("a box needs one to three intervals".into()));
        }
        for iv in &intervals {
            if iv.lo >= iv.hi {
                return Err(Error::InvalidRequest(format!("empty interval {}:{}", iv.lo, iv.hi)));
            }
        }
        if margin.as_ref().is_some_and(|m| m.is_negative()) {
            return Err(Error::InvalidRequest("the exclusion margin must be nonnegative".into()));
        }
        Ok(BoxDomain { intervals, frame, margin })
    }

    /// Parses `lo:hi[,lo:hi...]` with exact rational bounds. A single
    /// interval is repeated on every axis.
    pub fn parse(text: &str, dim: usize, frame: BoxFrame, margin: Option<BigRational>) -> Result<Self> {
        let bad = || Error::InvalidRequest(format!("cannot read box '{}': expected lo:hi per axis", text));
        let mut intervals = text
            .split(',')
            .map(|part| {
                let (lo, hi) = part.split_once(':').ok_or_else(bad)?;
                let lo = crate::expr::parse_rational(lo).ok_or_else(bad)?;
                let hi = crate::expr::parse_rational(hi).ok_or_else(bad)?;
                Ok(Interval { lo, hi })
            })
            .collect::<Result<Vec<_>>>()?;
        if intervals.len() == 1 && dim > 1 {
            intervals = vec![intervals[0].clone(); dim];
        }
        if intervals.len() != dim {
            return Err(Error::InvalidRequest(format!("box has {} intervals but the pair lives in {} dimensions", intervals.len(), dim)));
        }
        Self::new(intervals, frame, margin)
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn to_text(&self) -> String {
        self.intervals.iter().map(|iv| format!("{}:{}", iv.lo, iv.hi)).collect::<Vec<_>>().join(",")
    }

    /// Interior grid with `n[i]` points on axis `i`.
    pub fn grid(&self, n: &[usize]) -> Result<Grid> {
        let n = broadcast(n, self.dim())?;
        let lo: Vec<f64> = self.intervals.iter().map(|iv| ToPrimitive::to_f64(&iv.lo).unwrap_or(f64::NAN)).collect();
        let h = self
            .intervals
            .iter()
            .zip(&n)
            .map(|(iv, &k)| ToPrimitive::to_f64(&((&iv.hi - &iv.lo) / BigRational::from_integer((k + 1).into()))).unwrap_or(f64::NAN))
            .collect();
        Ok(Grid { n, lo, h })
    }
}

fn broadcast(n: &[usize], dim: usize) -> Result<Vec<usize>> {
    let n = if n.len() == 1 { vec![n[0]; dim] } else { n.to_vec() };
    if n.len() != dim || n.contains(&0) {
        return Err(Error::InvalidRequest(format!("need one positive point count or one per axis ({} axes)", dim)));
    }
    Ok(n)
}

/// A rational function with floating-point coefficients, kept factored so
/// poles can be located.
#[derive(Clone, Debug)]
pub struct NumExpr {
    num: Poly<f64>,
    den: Vec<(Poly<f64>, u32)>,
}

impl NumExpr {
    pub fn new<F: Field>(r: &R<F>) -> Self {
        let (num, den) = r.map_parts(|c| c.to_f64());
        NumExpr { num, den }
    }

    pub fn eval(&self, p: &[f64; 3]) -> f64 {
        let d: f64 = self.den.iter().map(|(f, e)| f.eval(p).powi(*e as i32)).product();
        self.num.eval(p) / d
    }

    /// Every denominator factor must keep one sign over the grid and stay at
    /// least `eps` (to first order) away from its zero set.
    pub fn check_poles(&self, points: &[[f64; 3]], eps: f64, frame: BoxFrame) -> Result<()> {
        for (f, _) in &self.den {
            let grad: Vec<Poly<f64>> = (0..3).map(|a| f.derive(a)).collect();
            let sign0 = f.eval(&points[0]).signum();
            let bad = points.par_iter().position_first(|p| {
                let v = f.eval(p);
                let g = grad.iter().map(|d| d.eval(p).powi(2)).sum::<f64>().sqrt();
                v == 0.0 || v.signum() != sign0 || !v.is_finite() || v.abs() < eps * g
            });
            if let Some(i) = bad {
                let p = points[i];
                return Err(Error::PoleInBox(format!("({}, {}, {}) in the {} frame", p[0], p[1], p[2], frame)));
            }
        }
        Ok(())
    }

    pub fn sample(&self, points: &[[f64; 3]]) -> Vec<f64> {
        points.par_iter().map(|p| self.eval(p)).collect()
    }
}

/// What the numerics need from any Cartesian pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPair<F: Field> {
    pub dim: usize,
    pub v: R<F>,
    pub vt: R<F>,
    pub a: Op<F>,
}

impl<F: Field> SpectralPair<F> {
    pub fn new(dim: usize, v: R<F>, vt: R<F>, a: Op<F>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidRequest("dimension must be 1, 2 or 3".into()));
        }
        if a.frame() != Frame::Cartesian {
            return Err(Error::InvalidRequest("numeric spectra need a Cartesian intertwiner".into()));
        }
        for axis in dim..3 {
            if v.depends_on(axis) || vt.depends_on(axis) || a.terms().any(|(al, c)| al[axis] > 0 || c.depends_on(axis)) {
                return Err(Error::InvalidRequest(format!("the pair depends on axis {} beyond dimension {}", axis + 1, dim)));
            }
        }
        Ok(SpectralPair { dim, v, vt, a })
    }

    /// Rewrites the pair in the coordinates `(x+, x−, x3)`.
    pub fn rotated45(&self) -> Result<Self> {
        if self.dim < 2 {
            return Err(Error::InvalidRequest("the rot45 frame needs at least two dimensions".into()));
        }
        let r = F::sqrt2().ok_or_else(|| Error::Precondition("the rot45 frame needs sqrt2 in the coefficient field".into()))?.inv();
        let (o, z) = (F::one(), F::zero());
        let m = [[r.clone(), r.clone(), z.clone()], [r.clone(), -r.clone(), z.clone()], [z.clone(), z.clone(), o]];
        let t = [F::zero(), F::zero(), F::zero()];
        let sub = |e: &R<F>| e.substitute_affine(&m, &t);
        let d = |signs: [i64; 2]| -> Op<F> {
            LinOp::from_terms(
                Frame::Cartesian,
                [([1, 0, 0], R::constant(r.clone() * F::from_i64(signs[0]))), ([0, 1, 0], R::constant(r.clone() * F::from_i64(signs[1])))],
            )
        };
        let new_partials = [d([1, 1]), d([1, -1]), LinOp::partial(Frame::Cartesian, 2)];
        let mut a = Op::zero(Frame::Cartesian);
        for (alpha, c) in self.a.terms() {
            let mut term = LinOp::mul_by(Frame::Cartesian, sub(c));
            for (axis, dp) in new_partials.iter().enumerate() {
                for _ in 0..alpha[axis] {
                    term = term.compose(dp)?;
                }
            }
            a = &a + &term;
        }
        Ok(SpectralPair { dim: self.dim, v: sub(&self.v), vt: sub(&self.vt), a })
    }
}

impl<F: Field> From<&PartnerPair1D<F>> for SpectralPair<F> {
    fn from(p: &PartnerPair1D<F>) -> Self {
        SpectralPair { dim: 1, v: p.v.clone(), vt: p.vt.clone(), a: p.a.clone() }
    }
}

impl<F: Field> From<&TranslationalPair<F>> for SpectralPair<F> {
    fn from(p: &TranslationalPair<F>) -> Self {
        SpectralPair { dim: 3, v: p.v.clone(), vt: p.vt.clone(), a: p.a.clone() }
    }
}

impl<F: Field> From<&Family3D<F>> for SpectralPair<F> {
    fn from(f: &Family3D<F>) -> Self {
        SpectralPair { dim: 3, v: f.pot.clone(), vt: f.pot_t.clone(), a: f.a.clone() }
    }
}

/// `−Δ + V` on a grid.
#[derive(Clone, Debug)]
pub struct GridOperator {
    pub grid: Grid,
    pub matrix: CsrMatrix,
    pub order: StencilOrder,
}

fn margin(domain: &BoxDomain, grid: &Grid) -> f64 {
    domain.margin.as_ref().and_then(ToPrimitive::to_f64).unwrap_or_else(|| grid.h.iter().cloned().fold(f64::INFINITY, f64::min))
}

fn frame_points<F: Field>(domain: &BoxDomain, n: &[usize]) -> Result<(Grid, Vec<[f64; 3]>)> {
    if domain.frame == BoxFrame::Rotated45 && F::sqrt2().is_none() {
        return Err(Error::Precondition("the rot45 frame needs sqrt2 in the coefficient field".into()));
    }
    let grid = domain.grid(n)?;
    let points = grid.points();
    Ok((grid, points))
}

fn to_grid_coords<F: Field>(v: &R<F>, domain: &BoxDomain) -> Result<R<F>> {
    match domain.frame {
        BoxFrame::Standard => Ok(v.clone()),
        BoxFrame::Rotated45 => {
            let dummy = SpectralPair { dim: domain.dim(), v: v.clone(), vt: R::zero(), a: Op::zero(Frame::Cartesian) };
            Ok(dummy.rotated45()?.v)
        }
    }
}

/// Central-difference `−Δ + V` with Dirichlet walls. `V` is given in
/// Cartesian coordinates and rewritten for the box frame.
pub fn discretize<F: Field>(v: &R<F>, domain: &BoxDomain, n: &[usize], order: StencilOrder) -> Result<GridOperator> {
    let (grid, points) = frame_points::<F>(domain, n)?;
    let ev = NumExpr::new(&to_grid_coords(v, domain)?);
    ev.check_poles(&points, margin(domain, &grid), domain.frame)?;
    Ok(assemble(grid, &ev.sample(&points), order))
}

fn assemble(grid: Grid, pot: &[f64], order: StencilOrder) -> GridOperator {
    let matrix = grid::schrodinger_matrix(&grid, pot, order);
    GridOperator { grid, matrix, order }
}

/// Both Hamiltonians and the intertwiner on one grid.
#[derive(Clone, Debug)]
pub struct DiscretePair {
    pub h: GridOperator,
    pub ht: GridOperator,
    a_terms: Vec<(MultiIndex, Vec<f64>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntertwineResult {
    /// `‖(H̃ − E)Aψ‖ / ‖Aψ‖`.
    pub residual: f64,
    /// `‖Aψ‖ / ‖ψ‖`.
    pub a_norm_ratio: f64,
    pub zero_mode: bool,
}

pub fn discretize_pair<F: Field>(pair: &SpectralPair<F>, domain: &BoxDomain, n: &[usize], order: StencilOrder) -> Result<DiscretePair> {
    if domain.dim() != pair.dim {
        return Err(Error::InvalidRequest(format!("box has {} axes but the pair lives in {} dimensions", domain.dim(), pair.dim)));
    }
    let (grid, points) = frame_points::<F>(domain, n)?;
    let pair = match domain.frame {
        BoxFrame::Standard => pair.clone(),
        BoxFrame::Rotated45 => pair.rotated45()?,
    };
    let eps = margin(domain, &grid);
    let v = NumExpr::new(&pair.v);
    let vt = NumExpr::new(&pair.vt);
    v.check_poles(&points, eps, domain.frame)?;
    vt.check_poles(&points, eps, domain.frame)?;
    let mut a_terms = Vec::new();
    for (alpha, c) in pair.a.terms() {
        let ce = NumExpr::new(c);
        ce.check_poles(&points, eps, domain.frame)?;
        a_terms.push((*alpha, ce.sample(&points)));
    }
    let (h, ht) = rayon::join(|| assemble(grid.clone(), &v.sample(&points), order), || assemble(grid.clone(), &vt.sample(&points), order));
    Ok(DiscretePair { h, ht, a_terms })
}

impl DiscretePair {
    pub fn grid(&self) -> &Grid {
        &self.h.grid
    }

    /// `Aψ` with the same stencils as the Hamiltonians; mixed derivatives are
    /// products of one-dimensional stencils.
    pub fn apply_a(&self, psi: &[f64]) -> Vec<f64> {
        let grid = self.grid();
        let mut out = vec![0.0; psi.len()];
        for (alpha, coeff) in &self.a_terms {
            let mut d = psi.to_vec();
            for axis in 0..grid.dim() {
                if alpha[axis] > 0 {
                    d = grid.derivative(&d, axis, alpha[axis], self.h.order);
                }
            }
            out.par_iter_mut().zip(d.par_iter().zip(coeff.par_iter())).for_each(|(o, (di, ci))| *o += ci * di);
        }
        out
    }

    pub fn intertwine(&self, e: f64, psi: &[f64]) -> IntertwineResult {
        let a_psi = self.apply_a(psi);
        let a_norm = grid::norm(&a_psi);
        let ratio = a_norm / grid::norm(psi);
        let h_a = self.ht.matrix.mul(&a_psi);
        let r: Vec<f64> = h_a.iter().zip(&a_psi).map(|(x, y)| x - e * y).collect();
        let residual = if a_norm > 0.0 { grid::norm(&r) / a_norm } else { f64::INFINITY };
        IntertwineResult { residual, a_norm_ratio: ratio, zero_mode: ratio < ZERO_MODE_RATIO }
    }
}

/// One discretization-and-residual call for a single eigenpair of `H`.
pub fn intertwine_numeric<F: Field>(
    pair: &SpectralPair<F>,
    e: f64,
    psi: &[f64],
    domain: &BoxDomain,
    n: &[usize],
    order: StencilOrder,
) -> Result<IntertwineResult> {
    let d = discretize_pair(pair, domain, n, order)?;
    if psi.len() != d.grid().len() {
        return Err(Error::InvalidRequest("eigenvector does not come from this grid".into()));
    }
    Ok(d.intertwine(e, psi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericParams {
    /// Interior points per axis; one value is used on every axis.
    pub n: Vec<usize>,
    pub k: usize,
    pub match_tol: f64,
    /// Compare `|E − Ẽ|` against `match_tol·max(|E|, |Ẽ|)` instead of `match_tol`.
    #[serde(default)]
    pub relative: bool,
    pub stencil_order: StencilOrder,
}

impl NumericParams {
    pub fn tolerance(&self, a: f64, b: f64) -> f64 {
        if self.relative {
            self.match_tol * a.abs().max(b.abs())
        } else {
            self.match_tol
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelMatch {
    pub index_h: usize,
    pub index_htilde: usize,
    pub abs_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Matching {
    pub matches: Vec<LevelMatch>,
    pub unmatched_h: Vec<usize>,
    pub unmatched_htilde: Vec<usize>,
    /// Unpaired levels above the window where both lists were computed;
    /// their partners may simply lie beyond the last computed level.
    pub beyond_window_h: Vec<usize>,
    pub beyond_window_htilde: Vec<usize>,
    pub window: f64,
}

/// Greedy two-pointer matching of ascending lists. Unpaired levels above
/// `min(max E_H, max E_H̃)` plus tolerance are set aside, not called missing.
pub fn match_levels(eh: &[f64], eht: &[f64], tol: impl Fn(f64, f64) -> f64) -> Matching {
    let top = eh.last().cloned().unwrap_or(f64::NEG_INFINITY).min(eht.last().cloned().unwrap_or(f64::NEG_INFINITY));
    let window = top + tol(top, top);
    let mut m = Matching { window, ..Default::default() };
    let (mut i, mut j) = (0, 0);
    let miss_h = |i: usize, m: &mut Matching| if eh[i] > window { m.beyond_window_h.push(i) } else { m.unmatched_h.push(i) };
    let miss_ht = |j: usize, m: &mut Matching| if eht[j] > window { m.beyond_window_htilde.push(j) } else { m.unmatched_htilde.push(j) };
    while i < eh.len() && j < eht.len() {
        let d = (eh[i] - eht[j]).abs();
        if d <= tol(eh[i], eht[j]) {
            m.matches.push(LevelMatch { index_h: i, index_htilde: j, abs_diff: d });
            i += 1;
            j += 1;
        } else if eh[i] < eht[j] {
            miss_h(i, &mut m);
            i += 1;
        } else {
            miss_ht(j, &mut m);
            j += 1;
        }
    }
    for i in i..eh.len() {
        miss_h(i, &mut m);
    }
    for j in j..eht.len() {
        miss_ht(j, &mut m);
    }
    m
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub n: Vec<usize>,
    pub h: Vec<f64>,
    #[serde(rename = "box")]
    pub box_text: String,
    pub frame: BoxFrame,
    pub k: usize,
    pub match_tol: f64,
    pub relative: bool,
    pub stencil_order: StencilOrder,
    pub eig_tolerance: f64,
    pub iterations_h: usize,
    pub iterations_htilde: usize,
    pub max_eig_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigs_h: Vec<f64>,
    pub eigs_htilde: Vec<f64>,
    #[serde(flatten)]
    pub matching: Matching,
    /// One per entry of `matches`.
    pub intertwine_residuals: Vec<f64>,
    /// One per level of `H`.
    pub intertwine: Vec<IntertwineResult>,
    pub meta: SolverMeta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub matched: usize,
    pub unmatched_h: usize,
    pub unmatched_htilde: usize,
    pub beyond_window: usize,
    pub max_abs_diff: f64,
    pub max_intertwine_residual: f64,
    pub zero_modes: Vec<usize>,
}

impl SpectrumReport {
    pub fn summary(&self) -> SpectrumSummary {
        let m = &self.matching;
        SpectrumSummary {
            matched: m.matches.len(),
            unmatched_h: m.unmatched_h.len(),
            unmatched_htilde: m.unmatched_htilde.len(),
            beyond_window: m.beyond_window_h.len() + m.beyond_window_htilde.len(),
            max_abs_diff: m.matches.iter().map(|x| x.abs_diff).fold(0.0, f64::max),
            max_intertwine_residual: self.intertwine_residuals.iter().cloned().fold(0.0, f64::max),
            zero_modes: (0..self.intertwine.len()).filter(|&i| self.intertwine[i].zero_mode).collect(),
        }
    }

    /// Values of `H` that found no partner inside the window.
    pub fn missing_from_htilde(&self) -> Vec<f64> {
        self.matching.unmatched_h.iter().map(|&i| self.eigs_h[i]).collect()
    }
}

/// Eigenvalues of both Hamiltonians, their matching, and intertwining
/// residuals on the grid.
pub fn pair_spectrum<F: Field>(pair: &SpectralPair<F>, domain: &BoxDomain, params: &NumericParams) -> Result<SpectrumReport> {
    let d = discretize_pair(pair, domain, &params.n, params.stencil_order)?;
    let (eh, eht) = rayon::join(|| lowest_eigs(&d.h.matrix, params.k), || lowest_eigs(&d.ht.matrix, params.k));
    let (eh, eht) = (eh?, eht?);
    let matching = match_levels(&eh.values, &eht.values, |a, b| params.tolerance(a, b));
    let intertwine: Vec<IntertwineResult> = eh.values.iter().zip(&eh.vectors).map(|(e, psi)| d.intertwine(*e, psi)).collect();
    let intertwine_residuals = matching.matches.iter().map(|m| intertwine[m.index_h].residual).collect();
    let meta = SolverMeta {
        n: d.grid().n.clone(),
        h: d.grid().h.clone(),
        box_text: domain.to_text(),
        frame: domain.frame,
        k: params.k,
        match_tol: params.match_tol,
        relative: params.relative,
        stencil_order: params.stencil_order,
        eig_tolerance: eigen::TOL,
        iterations_h: eh.iterations,
        iterations_htilde: eht.iterations,
        max_eig_residual: eh.max_residual.max(eht.max_residual),
    };
    Ok(SpectrumReport { eigs_h: eh.values, eigs_htilde: eht.values, matching, intertwine_residuals, intertwine, meta })
}

/// Exact `p/q`, for box bounds given in code.
pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        Interval { lo, hi }
    }

    pub fn symmetric(half_width: i64) -> Self {
        Interval { lo: BigRational::from_integer((-half_width).into()), hi: BigRational::from_integer(half_width.into()) }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= BigRational::zero() && self.hi >= BigRational::zero()
    }
}
