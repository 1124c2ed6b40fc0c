//! Dual-layer embedding and two-stage extraction.
//!
//! Embedding, per 8×8 block with mark pixel `w`:
//! 1. DCT layer: `F'(u,v) = F(u,v) + α·w` at each configured position, then inverse DCT.
//! 2. SVD layer: on the real-valued result, `σ'ⱼ = σⱼ + α·w` for all eight singular values.
//!
//! Only the final image is quantized. Extraction peels the layers in reverse:
//! singular values first (`(σ'ⱼ − σⱼ)/α` averaged), then the block is rebuilt
//! with the recorded singular values and the DCT layer is read off
//! (`(F' − F)/α` averaged over positions).

mod key;

pub use key::{BlockKey, SideInfoKey, KEY_MAGIC};

use crate::error::{Error, Result};
use crate::imagery::{from_blocks, quantize, to_blocks, Block, BlockGrid, GrayImage};
use crate::metrics::{psnr, LayerSummary, VerificationReport};
use crate::svd::{recompose, svd8};
use crate::transform::{dct2, idct2};
use crate::{Schedule, BLOCK};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_THRESHOLD_DB: f64 = 30.0;

/// The anti-diagonal `u + v = 7`, the mid-frequency band of an 8×8 spectrum.
pub fn anti_diagonal() -> Vec<(usize, usize)> {
    (0..BLOCK).map(|u| (u, BLOCK - 1 - u)).collect()
}

/// Tag image carrying one pixel per cover block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagMark(GrayImage);

impl TagMark {
    pub fn new(image: GrayImage) -> Self {
        Self(image)
    }

    pub fn image(&self) -> &GrayImage {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }
}

impl From<GrayImage> for TagMark {
    fn from(image: GrayImage) -> Self {
        Self(image)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedParams {
    pub alpha: f64,
    pub dct_positions: Vec<(usize, usize)>,
}

impl Default for EmbedParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            dct_positions: anti_diagonal(),
        }
    }
}

impl EmbedParams {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Parameter(format!(
                "alpha must be a finite value > 0, got {}",
                self.alpha
            )));
        }
        validate_positions(&self.dct_positions).map_err(Error::Parameter)
    }
}

pub(crate) fn validate_positions(positions: &[(usize, usize)]) -> std::result::Result<(), String> {
    if positions.is_empty() {
        return Err("at least one DCT position is required".into());
    }
    for (i, &(u, v)) in positions.iter().enumerate() {
        if u >= BLOCK || v >= BLOCK {
            return Err(format!("DCT position ({u},{v}) is outside 0..{BLOCK}"));
        }
        if positions[..i].contains(&(u, v)) {
            return Err(format!("DCT position ({u},{v}) listed twice"));
        }
    }
    Ok(())
}

/// Marks recovered from each layer, one real value per block, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedMarks {
    pub width: usize,
    pub height: usize,
    pub from_svd: Vec<f64>,
    pub from_dct: Vec<f64>,
}

impl ExtractedMarks {
    fn materialize(&self, values: &[f64]) -> GrayImage {
        GrayImage::new(
            self.width,
            self.height,
            values.iter().map(|&v| quantize(v)).collect(),
        )
        .expect("mark dimensions match grid")
    }

    /// SVD-layer mark, rounded and clamped to 8 bits.
    pub fn svd_image(&self) -> GrayImage {
        self.materialize(&self.from_svd)
    }

    /// DCT-layer mark, rounded and clamped to 8 bits.
    pub fn dct_image(&self) -> GrayImage {
        self.materialize(&self.from_dct)
    }

    /// PSNR between the two materialized marks.
    pub fn agreement_db(&self) -> f64 {
        psnr(&self.svd_image(), &self.dct_image()).expect("marks share dimensions")
    }
}

/// Embeds `w` into one block without quantizing. Returns the watermarked block
/// and the side information needed to extract from it.
pub fn embed_block(cover: &Block, w: f64, params: &EmbedParams) -> Result<(Block, BlockKey)> {
    let shift = params.alpha * w;

    let mut spectrum = dct2(cover)?;
    let orig_dct = params
        .dct_positions
        .iter()
        .map(|&(u, v)| spectrum.coeffs[u][v])
        .collect();
    for &(u, v) in &params.dct_positions {
        spectrum.coeffs[u][v] += shift;
    }
    let intermediate = idct2(&spectrum)?;

    let factors = svd8(&intermediate)?;
    let shifted: [f64; BLOCK] = std::array::from_fn(|j| factors.sigma[j] + shift);
    let mut perm: [usize; BLOCK] = std::array::from_fn(|j| j);
    perm.sort_by(|&a, &b| shifted[b].total_cmp(&shifted[a]));

    let key = BlockKey {
        orig_dct,
        orig_sigma: factors.sigma,
        perm,
    };
    Ok((recompose(&factors.with_sigma(shifted)), key))
}

/// Reads both layers out of one block. Returns `(w_svd, w_dct)`.
pub fn extract_block(
    block: &Block,
    key: &BlockKey,
    alpha: f64,
    positions: &[(usize, usize)],
) -> Result<(f64, f64)> {
    let factors = svd8(block)?;
    // Sorted singular value k of the watermarked block came from original index perm[k].
    let original: [f64; BLOCK] = std::array::from_fn(|k| key.orig_sigma[key.perm[k]]);
    let w_svd = factors
        .sigma
        .iter()
        .zip(&original)
        .map(|(s, o)| (s - o) / alpha)
        .sum::<f64>()
        / BLOCK as f64;

    let peeled = recompose(&factors.with_sigma(original));
    let spectrum = dct2(&peeled)?;
    let w_dct = positions
        .iter()
        .zip(&key.orig_dct)
        .map(|(&(u, v), o)| (spectrum.coeffs[u][v] - o) / alpha)
        .sum::<f64>()
        / positions.len() as f64;
    Ok((w_svd, w_dct))
}

pub fn embed(
    cover: &GrayImage,
    mark: &TagMark,
    params: &EmbedParams,
) -> Result<(GrayImage, SideInfoKey)> {
    embed_with(cover, mark, params, Schedule::default())
}

pub fn embed_with(
    cover: &GrayImage,
    mark: &TagMark,
    params: &EmbedParams,
    schedule: Schedule,
) -> Result<(GrayImage, SideInfoKey)> {
    params.validate()?;
    let grid = to_blocks(cover)?;
    if mark.width() != grid.cols() || mark.height() != grid.rows() {
        return Err(Error::Dimension(format!(
            "mark is {}x{} but the {}x{} cover has a {}x{} block grid",
            mark.width(),
            mark.height(),
            cover.width(),
            cover.height(),
            grid.cols(),
            grid.rows()
        )));
    }
    let marks = mark.image().samples();
    let results = schedule.map(grid.blocks(), |i, block| {
        embed_block(block, f64::from(marks[i]), params)
    });
    let (blocks, keys): (Vec<_>, Vec<_>) = results
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();

    let watermarked = from_blocks(&BlockGrid::new(grid.rows(), grid.cols(), blocks)?);
    let key = SideInfoKey {
        alpha: params.alpha,
        dct_positions: params.dct_positions.clone(),
        grid_rows: grid.rows(),
        grid_cols: grid.cols(),
        blocks: keys,
    };
    Ok((watermarked, key))
}

pub fn extract(image: &GrayImage, key: &SideInfoKey) -> Result<ExtractedMarks> {
    extract_with(image, key, Schedule::default())
}

pub fn extract_with(
    image: &GrayImage,
    key: &SideInfoKey,
    schedule: Schedule,
) -> Result<ExtractedMarks> {
    key.validate()?;
    let grid = to_blocks(image)?;
    if grid.rows() != key.grid_rows || grid.cols() != key.grid_cols {
        return Err(Error::Dimension(format!(
            "image has a {}x{} block grid but the key expects {}x{}",
            grid.rows(),
            grid.cols(),
            key.grid_rows,
            key.grid_cols
        )));
    }
    let results = schedule.map(grid.blocks(), |i, block| {
        extract_block(block, &key.blocks[i], key.alpha, &key.dct_positions)
    });
    let (from_svd, from_dct) = results
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(ExtractedMarks {
        width: key.grid_cols,
        height: key.grid_rows,
        from_svd,
        from_dct,
    })
}

/// Extracts both marks and accepts the tag when their PSNR reaches `threshold_db`.
pub fn verify(
    image: &GrayImage,
    key: &SideInfoKey,
    threshold_db: f64,
) -> Result<VerificationReport> {
    if threshold_db.is_nan() {
        return Err(Error::Parameter("threshold must not be NaN".into()));
    }
    let marks = extract(image, key)?;
    Ok(VerificationReport::new(
        marks.agreement_db(),
        threshold_db,
        LayerSummary::of(&marks.from_svd),
        LayerSummary::of(&marks.from_dct),
    ))
}
