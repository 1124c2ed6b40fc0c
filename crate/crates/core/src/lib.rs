//! Dual-layer tag watermarking for 8-bit grayscale images.
//!
//! A small tag image (one pixel per 8×8 cover block) is embedded twice: first
//! into mid-frequency DCT coefficients of every block, then into the singular
//! values of the resulting blocks. Extraction is non-blind: a [`SideInfoKey`]
//! recorded at embed time holds the original coefficients and singular values.
//! The two recovered marks are compared with PSNR, and a tag is accepted as
//! authentic when they agree above a threshold.

pub mod attacks;
pub mod error;
pub mod imagery;
pub mod metrics;
pub mod svd;
pub mod transform;
pub mod watermark;

pub use attacks::{apply_attack, AttackKind, AttackSpec};
pub use error::{Error, Result};
pub use imagery::{read_pgm, write_pgm, Block, BlockGrid, GrayImage};
pub use metrics::{format_db, mse, psnr, VerificationReport};
pub use svd::{recompose, svd8, SvdFactors};
pub use transform::{dct2, idct2, SpectralBlock};
pub use watermark::{
    embed, extract, verify, EmbedParams, ExtractedMarks, SideInfoKey, TagMark, DEFAULT_ALPHA,
    DEFAULT_THRESHOLD_DB,
};

/// Side length of the square blocks the pipeline operates on.
pub const BLOCK: usize = 8;

/// How per-block and per-pixel work is scheduled.
///
/// Both schedules produce bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    Sequential,
    #[default]
    Parallel,
}

impl Schedule {
    pub(crate) fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        use rayon::prelude::*;
        match self {
            Schedule::Sequential => items.iter().enumerate().map(|(i, t)| f(i, t)).collect(),
            Schedule::Parallel => items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect(),
        }
    }
}
