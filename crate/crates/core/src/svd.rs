//! Singular value decomposition of 8×8 real blocks by one-sided Jacobi.
//!
//! Columns of a working copy of `A` are rotated pairwise until every pair is
//! orthogonal to working precision. The accumulated rotations form `V`, the
//! column norms are the singular values, and the normalized columns form `U`.
//! Sweep order is fixed (cyclic by rows), so the result is a pure function of
//! the input.

use crate::error::{Error, Result};
use crate::imagery::Block;
use crate::BLOCK;

type Mat8 = [[f64; BLOCK]; BLOCK];

const MAX_SWEEPS: usize = 64;
const ORTHO_TOL: f64 = BLOCK as f64 * f64::EPSILON;
// Columns whose norm falls below this fraction of the largest are treated as
// null-space directions and get a completed basis vector in U.
const NULL_TOL: f64 = 1e-12;
// Entries at or below this magnitude are skipped when fixing column signs.
const SIGN_TOL: f64 = 1e-12;

/// `A = U · diag(sigma) · Vᵀ` with `sigma` non-increasing and non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdFactors {
    pub u: Mat8,
    pub sigma: [f64; BLOCK],
    pub vt: Mat8,
}

impl SvdFactors {
    /// Same singular vectors with different singular values.
    pub fn with_sigma(&self, sigma: [f64; BLOCK]) -> Self {
        Self { sigma, ..*self }
    }
}

fn identity() -> Mat8 {
    let mut m = [[0.0; BLOCK]; BLOCK];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn column_dot(m: &Mat8, p: usize, q: usize) -> f64 {
    m.iter().map(|row| row[p] * row[q]).sum()
}

fn rotate_columns(m: &mut Mat8, p: usize, q: usize, c: f64, s: f64) {
    for row in m.iter_mut() {
        let (a, b) = (row[p], row[q]);
        row[p] = c * a - s * b;
        row[q] = s * a + c * b;
    }
}

pub fn svd8(block: &Block) -> Result<SvdFactors> {
    if !block.is_finite() {
        return Err(Error::NumericInput(
            "svd8 input contains NaN or infinity".into(),
        ));
    }
    let mut w = block.values;
    let mut v = identity();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..BLOCK - 1 {
            for q in p + 1..BLOCK {
                let alpha = column_dot(&w, p, p);
                let beta = column_dot(&w, q, q);
                let gamma = column_dot(&w, p, q);
                if gamma == 0.0 || gamma.abs() <= ORTHO_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: [f64; BLOCK] = std::array::from_fn(|j| column_dot(&w, j, j).sqrt());
    let mut order: [usize; BLOCK] = std::array::from_fn(|j| j);
    // Stable, so ties keep column order.
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let sigma: [f64; BLOCK] = std::array::from_fn(|k| norms[order[k]]);
    let mut u = [[0.0; BLOCK]; BLOCK];
    let mut vt = [[0.0; BLOCK]; BLOCK];
    let cutoff = sigma[0] * NULL_TOL;
    let mut deficient = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        for i in 0..BLOCK {
            vt[k][i] = v[i][j];
        }
        if sigma[k] > cutoff && sigma[k] > 0.0 {
            for i in 0..BLOCK {
                u[i][k] = w[i][j] / sigma[k];
            }
        } else {
            deficient.push(k);
        }
    }
    complete_basis(&mut u, &deficient);

    for k in 0..BLOCK {
        let lead = (0..BLOCK).map(|i| u[i][k]).find(|x| x.abs() > SIGN_TOL);
        if lead.is_some_and(|x| x < 0.0) {
            for i in 0..BLOCK {
                u[i][k] = -u[i][k];
                vt[k][i] = -vt[k][i];
            }
        }
    }

    Ok(SvdFactors { u, sigma, vt })
}

// Fills the listed columns of `u` with unit vectors orthogonal to every other
// column, choosing among the standard basis the candidate with the largest
// residual after projection.
fn complete_basis(u: &mut Mat8, missing: &[usize]) {
    let mut filled: Vec<usize> = (0..BLOCK).filter(|k| !missing.contains(k)).collect();
    for &k in missing {
        let mut best = [0.0; BLOCK];
        let mut best_norm = -1.0;
        for e in 0..BLOCK {
            let mut cand = [0.0; BLOCK];
            cand[e] = 1.0;
            for _ in 0..2 {
                for &f in &filled {
                    let d: f64 = (0..BLOCK).map(|i| u[i][f] * cand[i]).sum();
                    for (i, c) in cand.iter_mut().enumerate() {
                        *c -= d * u[i][f];
                    }
                }
            }
            let n = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > best_norm {
                best_norm = n;
                best = cand;
            }
        }
        for (i, row) in u.iter_mut().enumerate() {
            row[k] = best[i] / best_norm;
        }
        filled.push(k);
    }
}

/// `U · diag(sigma) · Vᵀ`.
pub fn recompose(f: &SvdFactors) -> Block {
    Block::from_fn(|r, c| {
        (0..BLOCK)
            .map(|k| f.u[r][k] * f.sigma[k] * f.vt[k][c])
            .sum()
    })
}
