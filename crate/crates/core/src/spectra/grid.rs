//! Uniform Dirichlet grids, CSR matrices and finite-difference stencils.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Rows per parallel task. Fixed so reductions do not depend on the pool size.
pub(crate) const CHUNK: usize = 4096;

/// Stencil accuracy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl TryFrom<u8> for StencilOrder {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            2 => Ok(StencilOrder::Second),
            4 => Ok(StencilOrder::Fourth),
            _ => Err(format!("stencil order must be 2 or 4, got {}", v)),
        }
    }
}

impl From<StencilOrder> for u8 {
    fn from(o: StencilOrder) -> u8 {
        match o {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }
}

impl StencilOrder {
    /// Weights of `f″` at offsets `0, ±1, ±2`, times `h²`.
    fn second_derivative(self) -> &'static [f64] {
        match self {
            StencilOrder::Second => &[-2.0, 1.0],
            StencilOrder::Fourth => &[-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
        }
    }

    /// Antisymmetric weights of `f′` at offsets `+1, +2`, times `h`.
    fn first_derivative(self) -> &'static [f64] {
        match self {
            StencilOrder::Second => &[0.5],
            StencilOrder::Fourth => &[2.0 / 3.0, -1.0 / 12.0],
        }
    }
}

/// Interior points of a box; axis 0 varies fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: Vec<usize>,
    pub lo: Vec<f64>,
    pub h: Vec<f64>,
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.n[..axis].iter().product()
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for (axis, &n) in self.n.iter().enumerate() {
            out[axis] = idx % n;
            idx /= n;
        }
        out
    }

    /// Grid coordinates of a flat index, padded with zeros to three axes.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let m = self.multi_index(idx);
        let mut p = [0.0; 3];
        for axis in 0..self.dim() {
            p[axis] = self.lo[axis] + (m[axis] + 1) as f64 * self.h[axis];
        }
        p
    }

    pub fn points(&self) -> Vec<[f64; 3]> {
        (0..self.len()).into_par_iter().map(|i| self.point(i)).collect()
    }

    /// `∂^order/∂x_axis^order` applied to `f`, zero outside the grid.
    pub fn derivative(&self, f: &[f64], axis: usize, order: u8, stencil: StencilOrder) -> Vec<f64> {
        match order {
            0 => f.to_vec(),
            1 => self.stencil_apply(f, axis, stencil.first_derivative(), true, self.h[axis]),
            2 => self.stencil_apply(f, axis, stencil.second_derivative(), false, self.h[axis] * self.h[axis]),
            m => {
                let inner = self.derivative(f, axis, m - 2, stencil);
                self.derivative(&inner, axis, 2, stencil)
            }
        }
    }

    fn stencil_apply(&self, f: &[f64], axis: usize, w: &[f64], odd: bool, scale: f64) -> Vec<f64> {
        let stride = self.stride(axis);
        let n = self.n[axis];
        let mut out = vec![0.0; f.len()];
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            for (off, o) in chunk.iter_mut().enumerate() {
                let idx = c * CHUNK + off;
                let i = (idx / stride) % n;
                let mut acc = if odd { 0.0 } else { w[0] * f[idx] };
                let ws = if odd { w } else { &w[1..] };
                for (d, wd) in ws.iter().enumerate() {
                    let d = d + 1;
                    let up = if i + d < n { f[idx + d * stride] } else { 0.0 };
                    let down = if i >= d { f[idx - d * stride] } else { 0.0 };
                    acc += if odd { wd * (up - down) } else { wd * (up + down) };
                }
                *o = acc / scale;
            }
        });
        out
    }
}

/// Compressed sparse rows with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { nrows, row_ptr, cols, vals }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |j| (self.cols[j], self.vals[j]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            for (off, yi) in chunk.iter_mut().enumerate() {
                let i = c * CHUNK + off;
                *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
            }
        });
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec(x, &mut y);
        y
    }

    /// Bitwise equality of every entry with its transpose.
    pub fn is_symmetric(&self) -> bool {
        (0..self.nrows).all(|i| self.row(i).all(|(j, v)| self.get(j, i).to_bits() == v.to_bits()))
    }

    /// Upper bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_upper(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| if j == i { v } else { v.abs() }).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn gershgorin_lower(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| if j == i { v } else { -v.abs() }).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.nrows]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

/// `−Δ` on the grid plus a diagonal potential.
pub fn schrodinger_matrix(grid: &Grid, potential: &[f64], stencil: StencilOrder) -> CsrMatrix {
    let w = stencil.second_derivative();
    let rows = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let m = grid.multi_index(idx);
            let mut row = Vec::with_capacity(1 + 2 * grid.dim() * (w.len() - 1));
            let mut diag = potential[idx];
            for axis in 0..grid.dim() {
                let h2 = grid.h[axis] * grid.h[axis];
                let stride = grid.stride(axis);
                diag -= w[0] / h2;
                for (d, wd) in w[1..].iter().enumerate() {
                    let d = d + 1;
                    let v = -wd / h2;
                    if m[axis] + d < grid.n[axis] {
                        row.push((idx + d * stride, v));
                    }
                    if m[axis] >= d {
                        row.push((idx - d * stride, v));
                    }
                }
            }
            row.push((idx, diag));
            row
        })
        .collect();
    CsrMatrix::from_rows(rows)
}

/// Deterministic dot product: fixed chunks, partial sums added in order.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partial.iter().sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, lo: f64, hi: f64) -> Grid {
        Grid { n: vec![n], lo: vec![lo], h: vec![(hi - lo) / (n + 1) as f64] }
    }

    #[test]
    fn textbook_stencil() {
        let g = line(3, 0.0, 1.0);
        let m = schrodinger_matrix(&g, &[0.0; 3], StencilOrder::Second);
        let h2 = 0.25f64 * 0.25;
        assert_eq!(m.get(0, 0), 2.0 / h2);
        assert_eq!(m.get(0, 1), -1.0 / h2);
        assert_eq!(m.get(0, 2), 0.0);
        assert!(m.is_symmetric());
    }

    #[test]
    fn derivative_of_polynomials() {
        let g = Grid { n: vec![9, 7], lo: vec![-1.0, 0.0], h: vec![0.2, 0.25] };
        let f: Vec<f64> = (0..g.len()).map(|i| { let p = g.point(i); p[0].powi(2) * p[1] }).collect();
        for order in [StencilOrder::Second, StencilOrder::Fourth] {
            let d = g.derivative(&f, 1, 1, order);
            let dd = g.derivative(&f, 0, 2, order);
            // Interior points far from the Dirichlet edge see exact stencils.
            let idx = 4 + 9 * 3;
            let p = g.point(idx);
            assert!((d[idx] - p[0].powi(2)).abs() < 1e-12);
            assert!((dd[idx] - 2.0 * p[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn three_dimensional_operator_is_symmetric() {
        let g = Grid { n: vec![4, 5, 3], lo: vec![0.0; 3], h: vec![0.1, 0.2, 0.3] };
        let pot: Vec<f64> = (0..g.len()).map(|i| i as f64).collect();
        for order in [StencilOrder::Second, StencilOrder::Fourth] {
            assert!(schrodinger_matrix(&g, &pot, order).is_symmetric());
        }
    }
}
