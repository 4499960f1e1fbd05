//! Lowest eigenpairs of sparse symmetric matrices.
//!
//! Chebyshev-filtered subspace iteration: a block of `k + 8` vectors is
//! repeatedly passed through a Chebyshev polynomial that damps the unwanted
//! upper spectrum, then Rayleigh–Ritz on the block. The start block is the
//! normalized all-ones vector followed by ChaCha8 columns from a fixed seed,
//! so results are reproducible. Small problems go straight to dense Jacobi.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::grid::{dot, norm, CsrMatrix};
use crate::error::{Error, Result};

/// Residual bound `‖Mv − λv‖ ≤ TOL·‖v‖` for every returned pair.
pub const TOL: f64 = 1e-8;
/// Matrices up to this size are diagonalized densely.
pub const DENSE_LIMIT: usize = 128;
pub const SEED: u64 = 0x5eed_1502;
const EXTRA: usize = 8;
const DEGREE: usize = 40;
const MAX_ITER: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Unit vectors, one per value.
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
    pub max_residual: f64,
}

pub fn lowest_eigs(m: &CsrMatrix, k: usize) -> Result<EigenPairs> {
    let n = m.nrows;
    if k == 0 || k > n {
        return Err(Error::InvalidRequest(format!("asked for {} eigenpairs of a {}×{} matrix", k, n, n)));
    }
    if n <= DENSE_LIMIT {
        return dense(m, k);
    }
    subspace_iteration(m, k)
}

fn residual(m: &CsrMatrix, v: &[f64], lambda: f64) -> f64 {
    let mv = m.mul(v);
    let r: Vec<f64> = mv.iter().zip(v).map(|(a, b)| a - lambda * b).collect();
    norm(&r) / norm(v)
}

fn dense(m: &CsrMatrix, k: usize) -> Result<EigenPairs> {
    let (values, vecs) = jacobi(m.to_dense());
    let vectors: Vec<Vec<f64>> = (0..k).map(|j| vecs.iter().map(|row| row[j]).collect()).collect();
    let max_residual = (0..k).map(|j| residual(m, &vectors[j], values[j])).fold(0.0, f64::max);
    if max_residual > TOL {
        return Err(Error::NonConvergence { achieved: max_residual, iterations: 0 });
    }
    Ok(EigenPairs { values: values[..k].to_vec(), vectors, iterations: 0, max_residual })
}

/// Cyclic Jacobi rotations. Returns ascending eigenvalues and the matrix
/// whose columns are the matching eigenvectors.
pub fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off.sqrt() <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
                for kk in 0..n {
                    let (x, y) = (a[p][kk], a[q][kk]);
                    a[p][kk] = c * x - s * y;
                    a[q][kk] = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vecs = v.iter().map(|row| order.iter().map(|&i| row[i]).collect()).collect();
    (values, vecs)
}

/// Modified Gram–Schmidt, applied twice. Columns that collapse are replaced
/// by fresh random vectors.
fn orthonormalize(x: &mut [Vec<f64>], rng: &mut ChaCha8Rng) {
    for j in 0..x.len() {
        for _attempt in 0..3 {
            let before = norm(&x[j]);
            for _pass in 0..2 {
                for i in 0..j {
                    let (done, rest) = x.split_at_mut(j);
                    let c = dot(&done[i], &rest[0]);
                    axpy(-c, &done[i], &mut rest[0]);
                }
            }
            let after = norm(&x[j]);
            if after > 1e-10 * before && after > 0.0 {
                x[j].par_iter_mut().for_each(|e| *e /= after);
                break;
            }
            x[j] = random_vector(x[j].len(), rng);
        }
    }
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, xi)| *yi += a * xi);
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Rotates the block onto Ritz vectors. Returns Ritz values and `MX`.
fn rayleigh_ritz(m: &CsrMatrix, x: &mut Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mx: Vec<Vec<f64>> = x.iter().map(|v| m.mul(v)).collect();
    let p = x.len();
    let mut g = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in i..p {
            let v = 0.5 * (dot(&x[i], &mx[j]) + dot(&x[j], &mx[i]));
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    let (theta, q) = jacobi(g);
    let rotate = |block: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..p)
            .map(|j| {
                let mut out = vec![0.0; block[0].len()];
                out.par_chunks_mut(super::grid::CHUNK).enumerate().for_each(|(c, chunk)| {
                    let base = c * super::grid::CHUNK;
                    for (i, bv) in block.iter().enumerate() {
                        let qij = q[i][j];
                        for (off, o) in chunk.iter_mut().enumerate() {
                            *o += qij * bv[base + off];
                        }
                    }
                });
                out
            })
            .collect()
    };
    *x = rotate(x);
    (theta, rotate(&mx))
}

/// Scaled Chebyshev filter damping `[a, b]`, normalized at `a0`.
fn filter(m: &CsrMatrix, x: &[Vec<f64>], degree: usize, a: f64, b: f64, a0: f64) -> Vec<Vec<f64>> {
    let e = (b - a) / 2.0;
    let c = (b + a) / 2.0;
    let sigma1 = e / (a0 - c);
    x.par_iter()
        .map(|x0| {
            let mut sigma = sigma1;
            let mut prev = x0.clone();
            let mut cur: Vec<f64> = m.mul(x0).iter().zip(x0).map(|(mx, xi)| (mx - c * xi) * sigma1 / e).collect();
            for _ in 1..degree {
                let sigma2 = 1.0 / (2.0 / sigma1 - sigma);
                let mc = m.mul(&cur);
                let next: Vec<f64> = mc
                    .iter()
                    .zip(&cur)
                    .zip(&prev)
                    .map(|((mc, ci), pi)| 2.0 * sigma2 / e * (mc - c * ci) - sigma * sigma2 * pi)
                    .collect();
                prev = cur;
                cur = next;
                sigma = sigma2;
            }
            cur
        })
        .collect()
}

fn subspace_iteration(m: &CsrMatrix, k: usize) -> Result<EigenPairs> {
    let n = m.nrows;
    let p = (k + EXTRA).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut x: Vec<Vec<f64>> = Vec::with_capacity(p);
    x.push(vec![1.0; n]);
    for _ in 1..p {
        x.push(random_vector(n, &mut rng));
    }
    orthonormalize(&mut x, &mut rng);
    let upper = m.gershgorin_upper();
    let (mut theta, mut mx) = rayleigh_ritz(m, &mut x);
    let mut worst = f64::INFINITY;
    for iter in 0..MAX_ITER {
        let res: Vec<f64> = (0..k)
            .map(|j| {
                let r: Vec<f64> = mx[j].iter().zip(&x[j]).map(|(a, b)| a - theta[j] * b).collect();
                norm(&r)
            })
            .collect();
        worst = res.iter().cloned().fold(0.0, f64::max);
        if worst <= TOL {
            // Recompute residuals from scratch before reporting.
            let max_residual = (0..k).map(|j| residual(m, &x[j], theta[j])).fold(0.0, f64::max);
            if max_residual <= TOL {
                x.truncate(k);
                theta.truncate(k);
                return Ok(EigenPairs { values: theta, vectors: x, iterations: iter, max_residual });
            }
        }
        let cut = theta[p - 1];
        let a0 = theta[0];
        let cut = if cut >= upper { (a0 + upper) / 2.0 } else { cut };
        x = filter(m, &x, DEGREE, cut, upper, a0);
        orthonormalize(&mut x, &mut rng);
        (theta, mx) = rayleigh_ritz(m, &mut x);
    }
    Err(Error::NonConvergence { achieved: worst, iterations: MAX_ITER })
}
