//! Side information for non-blind extraction and its `TAGKEY v1` text form.
//!
//! ```text
//! TAGKEY v1
//! alpha <float>
//! grid <rows> <cols>
//! dctpos <k> u0 v0 u1 v1 ...
//! blk <index> dct <k floats> sigma <8 floats> perm <8 ints>     (one line per block)
//! ```
//!
//! Floats are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fmt::Write as _;

use super::validate_positions;
use crate::error::{Error, Result};
use crate::BLOCK;

pub const KEY_MAGIC: &str = "TAGKEY v1";

/// Per-block reference data recorded at embed time.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockKey {
    /// Cover DCT coefficients at the embedding positions, in position order.
    pub orig_dct: Vec<f64>,
    /// Singular values of the DCT-marked block before the SVD layer.
    pub orig_sigma: [f64; BLOCK],
    /// Ordering of the shifted singular values. Always the identity for
    /// non-negative marks; kept so extraction does not rely on that.
    pub perm: [usize; BLOCK],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideInfoKey {
    pub alpha: f64,
    pub dct_positions: Vec<(usize, usize)>,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub blocks: Vec<BlockKey>,
}

fn corrupt(line: Option<usize>, reason: impl Into<String>) -> Error {
    Error::CorruptKey {
        line,
        reason: reason.into(),
    }
}

fn check_block(b: &BlockKey, k: usize) -> std::result::Result<(), String> {
    if b.orig_dct.len() != k {
        return Err(format!(
            "expected {k} DCT coefficients, got {}",
            b.orig_dct.len()
        ));
    }
    if !b.orig_dct.iter().all(|v| v.is_finite()) {
        return Err("non-finite DCT coefficient".into());
    }
    if !b.orig_sigma.iter().all(|&s| s.is_finite() && s >= 0.0) {
        return Err("singular values must be finite and non-negative".into());
    }
    if b.orig_sigma.windows(2).any(|w| w[0] < w[1]) {
        return Err("singular values must be non-increasing".into());
    }
    let mut seen = [false; BLOCK];
    for &p in &b.perm {
        if p >= BLOCK || std::mem::replace(&mut seen[p], true) {
            return Err(format!(
                "perm {:?} is not a permutation of 0..{BLOCK}",
                b.perm
            ));
        }
    }
    Ok(())
}

impl SideInfoKey {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(corrupt(
                None,
                format!("alpha must be > 0, got {}", self.alpha),
            ));
        }
        validate_positions(&self.dct_positions).map_err(|r| corrupt(None, r))?;
        if self.grid_rows == 0 || self.grid_cols == 0 {
            return Err(corrupt(None, "empty block grid"));
        }
        if self.blocks.len() != self.grid_rows * self.grid_cols {
            return Err(corrupt(
                None,
                format!(
                    "{}x{} grid needs {} blocks, key has {}",
                    self.grid_rows,
                    self.grid_cols,
                    self.grid_rows * self.grid_cols,
                    self.blocks.len()
                ),
            ));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            check_block(b, self.dct_positions.len())
                .map_err(|r| corrupt(None, format!("block {i}: {r}")))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{KEY_MAGIC}").unwrap();
        writeln!(out, "alpha {:.16e}", self.alpha).unwrap();
        writeln!(out, "grid {} {}", self.grid_rows, self.grid_cols).unwrap();
        write!(out, "dctpos {}", self.dct_positions.len()).unwrap();
        for (u, v) in &self.dct_positions {
            write!(out, " {u} {v}").unwrap();
        }
        out.push('\n');
        for (i, b) in self.blocks.iter().enumerate() {
            write!(out, "blk {i} dct").unwrap();
            for x in &b.orig_dct {
                write!(out, " {x:.16e}").unwrap();
            }
            out.push_str(" sigma");
            for x in &b.orig_sigma {
                write!(out, " {x:.16e}").unwrap();
            }
            out.push_str(" perm");
            for p in &b.perm {
                write!(out, " {p}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses `TAGKEY v1` text. Errors carry the 1-based number of the first bad line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let mut next = || lines.next().filter(|(_, l)| !l.is_empty());
        let total_lines = text.split('\n').count();
        let missing = |what: &str, n: usize| corrupt(Some(n), format!("missing {what} line"));

        let (n, magic) = next().ok_or_else(|| missing("TAGKEY header", 1))?;
        if magic != KEY_MAGIC {
            return Err(corrupt(Some(n), format!("expected {KEY_MAGIC:?}")));
        }

        let (n, line) = next().ok_or_else(|| missing("alpha", 2))?;
        let mut f = Fields::new(n, line);
        f.keyword("alpha")?;
        let alpha = f.float()?;
        f.end()?;
        if alpha <= 0.0 {
            return Err(corrupt(Some(n), format!("alpha must be > 0, got {alpha}")));
        }

        let (n, line) = next().ok_or_else(|| missing("grid", 3))?;
        let mut f = Fields::new(n, line);
        f.keyword("grid")?;
        let grid_rows = f.int()?;
        let grid_cols = f.int()?;
        f.end()?;
        if grid_rows == 0 || grid_cols == 0 {
            return Err(corrupt(Some(n), "empty block grid"));
        }
        let count = grid_rows
            .checked_mul(grid_cols)
            .ok_or_else(|| corrupt(Some(n), "grid size overflows"))?;

        let (n, line) = next().ok_or_else(|| missing("dctpos", 4))?;
        let mut f = Fields::new(n, line);
        f.keyword("dctpos")?;
        let k = f.int()?;
        let mut dct_positions = Vec::with_capacity(k.min(BLOCK * BLOCK));
        for _ in 0..k {
            dct_positions.push((f.int()?, f.int()?));
        }
        f.end()?;
        validate_positions(&dct_positions).map_err(|r| corrupt(Some(n), r))?;

        let mut blocks = Vec::with_capacity(count.min(1 << 20));
        for i in 0..count {
            let (n, line) = next().ok_or_else(|| {
                corrupt(
                    Some((5 + i).min(total_lines)),
                    format!("key truncated: expected {count} block lines, found {i}"),
                )
            })?;
            let mut f = Fields::new(n, line);
            f.keyword("blk")?;
            let index = f.int()?;
            if index != i {
                return Err(corrupt(
                    Some(n),
                    format!("expected block index {i}, got {index}"),
                ));
            }
            f.keyword("dct")?;
            let orig_dct = (0..k).map(|_| f.float()).collect::<Result<Vec<_>>>()?;
            f.keyword("sigma")?;
            let mut orig_sigma = [0.0; BLOCK];
            for s in &mut orig_sigma {
                *s = f.float()?;
            }
            f.keyword("perm")?;
            let mut perm = [0usize; BLOCK];
            for p in &mut perm {
                *p = f.int()?;
            }
            f.end()?;
            let block = BlockKey {
                orig_dct,
                orig_sigma,
                perm,
            };
            check_block(&block, k).map_err(|r| corrupt(Some(n), r))?;
            blocks.push(block);
        }

        // Only a single trailing newline may follow the last block.
        for (n, rest) in lines {
            if !rest.is_empty() || n != total_lines {
                return Err(corrupt(Some(n), "unexpected content after last block"));
            }
        }

        Ok(Self {
            alpha,
            dct_positions,
            grid_rows,
            grid_cols,
            blocks,
        })
    }
}

struct Fields<'a> {
    line: usize,
    tokens: std::str::Split<'a, char>,
}

impl<'a> Fields<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        Self {
            line,
            tokens: text.split(' '),
        }
    }

    fn token(&mut self, what: &str) -> Result<&'a str> {
        match self.tokens.next() {
            Some(t) if !t.is_empty() => Ok(t),
            _ => Err(corrupt(Some(self.line), format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let t = self.token(kw)?;
        if t == kw {
            Ok(())
        } else {
            Err(corrupt(
                Some(self.line),
                format!("expected {kw:?}, found {t:?}"),
            ))
        }
    }

    fn float(&mut self) -> Result<f64> {
        let t = self.token("number")?;
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(corrupt(Some(self.line), format!("invalid number {t:?}"))),
        }
    }

    fn int(&mut self) -> Result<usize> {
        let t = self.token("integer")?;
        if !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(corrupt(Some(self.line), format!("invalid integer {t:?}")));
        }
        t.parse::<usize>()
            .map_err(|_| corrupt(Some(self.line), format!("invalid integer {t:?}")))
    }

    fn end(&mut self) -> Result<()> {
        match self.tokens.next() {
            None => Ok(()),
            Some(t) => Err(corrupt(
                Some(self.line),
                format!("unexpected trailing field {t:?}"),
            )),
        }
    }
}
