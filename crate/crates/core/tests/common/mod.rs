//! Independent reference implementations and fixtures for integration tests.
//!
//! Nothing here calls into the kernels it is used to check.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tagmark_core::{Block, GrayImage, TagMark};

pub const N: usize = 8;

/// Literal quadruple-sum evaluation of the forward DCT with its four scale cases:
/// `1/N` for (0,0), `√2/N` for the first row and column, `2/N` elsewhere.
pub fn literal_dct(f: &[[f64; N]; N]) -> [[f64; N]; N] {
    let n = N as f64;
    let mut out = [[0.0; N]; N];
    for (u, row) in out.iter_mut().enumerate() {
        for (v, out_uv) in row.iter_mut().enumerate() {
            let scale = match (u, v) {
                (0, 0) => 1.0 / n,
                (0, _) | (_, 0) => 2f64.sqrt() / n,
                _ => 2.0 / n,
            };
            let mut acc = 0.0;
            for (x, fx) in f.iter().enumerate() {
                for (y, &fxy) in fx.iter().enumerate() {
                    acc += fxy
                        * ((2 * x + 1) as f64 * u as f64 * PI / (2.0 * n)).cos()
                        * ((2 * y + 1) as f64 * v as f64 * PI / (2.0 * n)).cos();
                }
            }
            *out_uv = scale * acc;
        }
    }
    out
}

/// Literal four-term inverse: DC term, first-row sum, first-column sum, interior sum.
pub fn literal_idct(big_f: &[[f64; N]; N]) -> [[f64; N]; N] {
    let n = N as f64;
    let cx = |x: usize, u: usize| ((2 * x + 1) as f64 * u as f64 * PI / (2.0 * n)).cos();
    let mut out = [[0.0; N]; N];
    for (x, row) in out.iter_mut().enumerate() {
        for (y, f) in row.iter_mut().enumerate() {
            let mut acc = big_f[0][0] / n;
            for v in 1..N {
                acc += 2f64.sqrt() / n * big_f[0][v] * cx(y, v);
            }
            for u in 1..N {
                acc += 2f64.sqrt() / n * big_f[u][0] * cx(x, u);
            }
            for u in 1..N {
                for v in 1..N {
                    acc += 2.0 / n * big_f[u][v] * cx(x, u) * cx(y, v);
                }
            }
            *f = acc;
        }
    }
    out
}

fn mat_vec(m: &[[f64; N]; N], x: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| (0..N).map(|j| m[i][j] * x[j]).sum())
}

fn dot(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Scales to unit length; rescales by the largest entry first so huge
// inverse-iteration vectors do not overflow.
fn normalize(x: &mut [f64; N]) -> f64 {
    let big = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if big == 0.0 || !big.is_finite() {
        return 0.0;
    }
    x.iter_mut().for_each(|v| *v /= big);
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

// Gaussian elimination with partial pivoting; None if numerically singular.
fn solve(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..N {
            let f = a[r][col] / a[col][col];
            for c in col..N {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for r in (0..N).rev() {
        let s: f64 = (r + 1..N).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Eigenvalues of a symmetric positive semi-definite 8×8 matrix, descending.
///
/// Repeated power iteration with Hotelling deflation; each eigenpair is
/// polished by Rayleigh-quotient iteration before it is deflated.
pub fn symmetric_eigenvalues(m: &[[f64; N]; N]) -> [f64; N] {
    let mut b = *m;
    let scale = (0..N)
        .map(|i| m[i][i].abs())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let mut found = [0.0; N];
    for (k, slot) in found.iter_mut().enumerate() {
        let mut x: [f64; N] = std::array::from_fn(|i| 1.0 + 0.1 * ((i * 7 + k * 3) % 11) as f64);
        normalize(&mut x);
        for _ in 0..300 {
            let mut y = mat_vec(&b, &x);
            if normalize(&mut y) == 0.0 {
                break;
            }
            x = y;
        }
        let mut lambda = dot(&x, &mat_vec(&b, &x));
        for _ in 0..30 {
            let mut shifted = b;
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] -= lambda;
            }
            let Some(mut y) = solve(shifted, x) else {
                break;
            };
            if normalize(&mut y) == 0.0 {
                break;
            }
            x = y;
            let next = dot(&x, &mat_vec(&b, &x));
            let done = (next - lambda).abs() <= 1e-16 * scale;
            lambda = next;
            if done {
                break;
            }
        }
        *slot = lambda;
        for i in 0..N {
            for j in 0..N {
                b[i][j] -= lambda * x[i] * x[j];
            }
        }
    }
    found.sort_by(|a, b| b.total_cmp(a));
    found
}

/// `AᵀA` for a block.
pub fn gram(a: &[[f64; N]; N]) -> [[f64; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..N).map(|k| a[k][i] * a[k][j]).sum()))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_block(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Block {
    Block::from_fn(|_, _| rng.random_range(lo..=hi))
}

/// 256×256-style synthetic photograph: smooth shading plus texture, kept in
/// [40, 215] so embedding never clips.
pub fn synthetic_cover(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed);
    let phase: f64 = r.random_range(0.0..PI);
    GrayImage::from_fn(width, height, |x, y| {
        let (fx, fy) = (x as f64 / width as f64, y as f64 / height as f64);
        let shade = 128.0 + 35.0 * (2.0 * PI * fx + phase).sin() * (PI * fy).cos();
        let ripple = 18.0 * ((x as f64) * 0.45 + (y as f64) * 0.21).sin();
        let grain: f64 = r.random_range(-14.0..14.0);
        (shade + ripple + grain).clamp(40.0, 215.0).round() as u8
    })
    .unwrap()
}

/// Binary (0/255) tag with a border, a diagonal and seeded random interior bits.
pub fn binary_mark(width: usize, height: usize, seed: u64) -> TagMark {
    let mut r = rng(seed);
    GrayImage::from_fn(width, height, |x, y| {
        let on = if x == 0 || y == 0 || x + 1 == width || y + 1 == height || x == y {
            true
        } else {
            r.random::<bool>()
        };
        if on {
            255
        } else {
            0
        }
    })
    .unwrap()
    .into()
}

/// Fraction of pixels whose bit (>= 128) differs.
pub fn bit_error_rate(a: &GrayImage, b: &GrayImage) -> f64 {
    let wrong = a
        .samples()
        .iter()
        .zip(b.samples())
        .filter(|(&x, &y)| (x >= 128) != (y >= 128))
        .count();
    wrong as f64 / a.samples().len() as f64
}
