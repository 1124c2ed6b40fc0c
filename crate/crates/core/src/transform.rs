//! Orthonormal 8×8 two-dimensional DCT-II and its inverse.
//!
//! With `f(x, y) = block.values[x][y]` and `N = 8`:
//!
//! ```text
//! F(u,v) = c(u) c(v) Σx Σy f(x,y) cos((2x+1)uπ/2N) cos((2y+1)vπ/2N)
//! c(0) = √(1/N),  c(k) = √(2/N) for k > 0
//! ```
//!
//! which gives the `1/N`, `√2/N` and `2/N` scale factors for the DC term, the
//! first row/column and the interior respectively. It is evaluated in separable
//! form `F = C·X·Cᵀ`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::imagery::Block;
use crate::BLOCK;

type Mat8 = [[f64; BLOCK]; BLOCK];

/// DCT coefficients; `coeffs[u][v]` is `F(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBlock {
    pub coeffs: Mat8,
}

impl SpectralBlock {
    pub const fn zero() -> Self {
        Self {
            coeffs: [[0.0; BLOCK]; BLOCK],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().flatten().all(|v| v.is_finite())
    }
}

/// Orthonormal DCT-II basis, `C[u][x] = c(u)·cos((2x+1)uπ/16)`.
fn basis() -> &'static Mat8 {
    static BASIS: OnceLock<Mat8> = OnceLock::new();
    BASIS.get_or_init(|| {
        let n = BLOCK as f64;
        let mut c = [[0.0; BLOCK]; BLOCK];
        for (u, row) in c.iter_mut().enumerate() {
            let scale = if u == 0 {
                (1.0 / n).sqrt()
            } else {
                (2.0 / n).sqrt()
            };
            for (x, v) in row.iter_mut().enumerate() {
                *v = scale * ((2 * x + 1) as f64 * u as f64 * PI / (2.0 * n)).cos();
            }
        }
        c
    })
}

// out = a · b, or a · bᵀ / aᵀ · b when the flags are set.
fn matmul(a: &Mat8, ta: bool, b: &Mat8, tb: bool) -> Mat8 {
    let mut out = [[0.0; BLOCK]; BLOCK];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..BLOCK {
                let x = if ta { a[k][i] } else { a[i][k] };
                let y = if tb { b[j][k] } else { b[k][j] };
                acc += x * y;
            }
            *o = acc;
        }
    }
    out
}

pub fn dct2(block: &Block) -> Result<SpectralBlock> {
    if !block.is_finite() {
        return Err(Error::NumericInput(
            "dct2 input contains NaN or infinity".into(),
        ));
    }
    let c = basis();
    let cx = matmul(c, false, &block.values, false);
    Ok(SpectralBlock {
        coeffs: matmul(&cx, false, c, true),
    })
}

pub fn idct2(spec: &SpectralBlock) -> Result<Block> {
    if !spec.is_finite() {
        return Err(Error::NumericInput(
            "idct2 input contains NaN or infinity".into(),
        ));
    }
    let c = basis();
    let ctf = matmul(c, true, &spec.coeffs, false);
    Ok(Block {
        values: matmul(&ctf, false, c, false),
    })
}
