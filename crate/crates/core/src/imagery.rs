//! Grayscale images, binary PGM I/O and 8×8 block tiling.

use crate::error::{Error, Result};
use crate::BLOCK;

/// 8-bit luminance image stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image must be non-empty, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::Dimension(format!("image size {width}x{height} overflows")))?;
        if samples.len() != expected {
            return Err(Error::Dimension(format!(
                "{width}x{height} image needs {expected} samples, got {}",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    /// Image with every sample set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    /// Sample at column `x`, row `y`.
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    pub fn same_dimensions(&self, other: &GrayImage) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Rounds half away from zero, then clamps to the 8-bit range.
///
/// This is the only place real values become samples. NaN maps to 0.
pub fn quantize(value: f64) -> u8 {
    let r = value.round();
    if r.is_nan() {
        0
    } else {
        r.clamp(0.0, 255.0) as u8
    }
}

/// Square tile of real values. `values[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub values: [[f64; BLOCK]; BLOCK],
}

impl Block {
    pub const fn zero() -> Self {
        Self {
            values: [[0.0; BLOCK]; BLOCK],
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = [[0.0; BLOCK]; BLOCK];
        for (r, row) in values.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = f(r, c);
            }
        }
        Self { values }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &Block) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Default for Block {
    fn default() -> Self {
        Self::zero()
    }
}

/// An image cut into a row-major grid of 8×8 blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid {
    rows: usize,
    cols: usize,
    blocks: Vec<Block>,
}

impl BlockGrid {
    pub fn new(rows: usize, cols: usize, blocks: Vec<Block>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != blocks.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} block grid cannot hold {} blocks",
                blocks.len()
            )));
        }
        Ok(Self { rows, cols, blocks })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Block> {
        self.blocks
    }
}

/// Tiles an image into 8×8 blocks. Dimensions must be multiples of 8; there is no padding.
pub fn to_blocks(img: &GrayImage) -> Result<BlockGrid> {
    let (w, h) = (img.width(), img.height());
    if w % BLOCK != 0 || h % BLOCK != 0 {
        return Err(Error::Dimension(format!(
            "image is {w}x{h}; width and height must both be multiples of {BLOCK}"
        )));
    }
    let (rows, cols) = (h / BLOCK, w / BLOCK);
    let mut blocks = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            blocks.push(Block::from_fn(|y, x| {
                f64::from(img.get(BLOCK * c + x, BLOCK * r + y))
            }));
        }
    }
    BlockGrid::new(rows, cols, blocks)
}

/// Reassembles a grid into an image using [`quantize`] on every value.
pub fn from_blocks(grid: &BlockGrid) -> GrayImage {
    let (w, h) = (grid.cols * BLOCK, grid.rows * BLOCK);
    let mut samples = vec![0u8; w * h];
    for (i, block) in grid.blocks.iter().enumerate() {
        let (r, c) = (i / grid.cols, i % grid.cols);
        for (y, row) in block.values.iter().enumerate() {
            let base = (BLOCK * r + y) * w + BLOCK * c;
            for (x, &v) in row.iter().enumerate() {
                samples[base + x] = quantize(v);
            }
        }
    }
    GrayImage {
        width: w,
        height: h,
        samples,
    }
}

/// Serializes as canonical binary PGM: `P5\n<w> <h>\n255\n` followed by raw samples.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.samples.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.samples);
    out
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::Format {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    // Skips whitespace and `#` comments running to end of line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Returns the parsed value and the offset of its first digit.
    fn number(&mut self, what: &str) -> Result<(usize, usize)> {
        let had_separator = self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#');
        self.skip_separators();
        if !had_separator {
            return Err(self.fail(format!("expected whitespace before {what}")));
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.fail(match self.bytes.get(self.pos) {
                None => format!("truncated header, missing {what}"),
                Some(_) => format!("expected decimal {what}"),
            }));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let value = digits.parse::<usize>().map_err(|_| Error::Format {
            offset: start,
            reason: format!("{what} {digits} out of range"),
        })?;
        Ok((value, start))
    }
}

/// Parses a binary (P5) PGM with maxval 255.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if !bytes.starts_with(b"P5") {
        return Err(Error::Format {
            offset: 0,
            reason: "missing P5 magic".into(),
        });
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let (width, _) = cur.number("width")?;
    let (height, _) = cur.number("height")?;
    let (maxval, maxval_offset) = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::Format {
            offset: maxval_offset,
            reason: format!("unsupported maxval {maxval}, only 255 is accepted"),
        });
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        Some(_) => return Err(cur.fail("expected single whitespace after maxval")),
        None => return Err(cur.fail("truncated header, no payload")),
    }
    if width == 0 || height == 0 {
        return Err(cur.fail(format!("empty image {width}x{height}")));
    }
    let len = width
        .checked_mul(height)
        .ok_or_else(|| cur.fail(format!("image size {width}x{height} overflows")))?;
    let payload = &bytes[cur.pos..];
    if payload.len() < len {
        return Err(Error::Format {
            offset: bytes.len(),
            reason: format!(
                "truncated payload: expected {len} samples, found {}",
                payload.len()
            ),
        });
    }
    if payload.len() > len {
        return Err(Error::Format {
            offset: cur.pos + len,
            reason: format!("{} unexpected trailing bytes", payload.len() - len),
        });
    }
    GrayImage::new(width, height, payload.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_pgm() {
        let img = read_pgm(b"P5\n2 1\n255\n\x00\xff").unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.samples(), &[0, 255]);
    }

    #[test]
    fn comments_after_magic() {
        let img = read_pgm(b"P5\n# made by hand\n2 1\n# another\n255\n\x07\x08").unwrap();
        assert_eq!(img.samples(), &[7, 8]);
    }

    #[test]
    fn sixteen_bit_rejected() {
        let err = read_pgm(b"P5\n1 1\n65535\n\x00\x00").unwrap_err();
        match err {
            Error::Format { offset, reason } => {
                assert_eq!(offset, 7);
                assert!(reason.contains("unsupported maxval"), "{reason}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn malformed_headers() {
        for bad in [
            &b"P6\n1 1\n255\n\x00"[..],
            b"P5",
            b"P5\n1",
            b"P5\nx 1\n255\n\x00",
            b"P5\n1 1\n255",
            b"P5\n1 1\n255\n",
            b"P5\n2 2\n255\n\x00\x00\x00",
            b"P5\n1 1\n255\n\x00\x00",
            b"P51 1\n255\n\x00",
            b"P5\n0 1\n255\n",
        ] {
            assert!(
                matches!(read_pgm(bad), Err(Error::Format { .. })),
                "accepted {:?}",
                String::from_utf8_lossy(bad)
            );
        }
    }

    #[test]
    fn truncated_payload_names_offset() {
        let err = read_pgm(b"P5\n2 2\n255\n\x00\x01\x02").unwrap_err();
        assert_eq!(
            err,
            Error::Format {
                offset: 14,
                reason: "truncated payload: expected 4 samples, found 3".into()
            }
        );
    }

    #[test]
    fn canonical_writer() {
        let one = GrayImage::new(1, 1, vec![0]).unwrap();
        assert_eq!(write_pgm(&one), b"P5\n1 1\n255\n\x00");
        let four = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(write_pgm(&four), b"P5\n2 2\n255\n\x01\x02\x03\x04");
    }

    #[test]
    fn image_invariants() {
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
        assert!(GrayImage::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn single_block_grid() {
        let img = GrayImage::from_fn(8, 8, |x, y| (x + 8 * y) as u8).unwrap();
        let grid = to_blocks(&img).unwrap();
        assert_eq!((grid.rows(), grid.cols()), (1, 1));
        assert_eq!(grid.blocks()[0].values[2][5], 21.0);
    }

    #[test]
    fn wide_grid_second_block() {
        let img = GrayImage::from_fn(16, 8, |x, y| (x * 10 + y) as u8).unwrap();
        let grid = to_blocks(&img).unwrap();
        assert_eq!((grid.rows(), grid.cols()), (1, 2));
        assert_eq!(grid.blocks()[1].values[3][0], 83.0);
        assert_eq!(grid.blocks()[1].values[0][7], 150.0);
    }

    #[test]
    fn rejects_unaligned_dimensions() {
        let img = GrayImage::filled(100, 100, 9).unwrap();
        match to_blocks(&img).unwrap_err() {
            Error::Dimension(msg) => assert!(msg.contains("100x100"), "{msg}"),
            e => panic!("unexpected {e:?}"),
        }
    }

    // Scalar reference for round-half-away-from-zero followed by clamping.
    fn reference_quantize(v: f64) -> u8 {
        let r = if v >= 0.0 {
            (v + 0.5).floor()
        } else {
            -((-v + 0.5).floor())
        };
        if r < 0.0 {
            0
        } else if r > 255.0 {
            255
        } else {
            r as u8
        }
    }

    #[test]
    fn quantization_policy() {
        assert_eq!(quantize(255.6), 255);
        assert_eq!(quantize(-3.2), 0);
        assert_eq!(quantize(127.5), 128);
        assert_eq!(reference_quantize(127.5), 128);
        assert_eq!(quantize(-0.5), 0);
        assert_eq!(quantize(0.49), 0);
        assert_eq!(quantize(f64::NAN), 0);
        assert_eq!(quantize(f64::INFINITY), 255);
    }

    #[test]
    fn from_blocks_clamps() {
        let mut b = Block::zero();
        b.values[0][0] = 255.6;
        b.values[0][1] = -3.2;
        b.values[0][2] = 127.5;
        b.values[0][3] = 1e9;
        let img = from_blocks(&BlockGrid::new(1, 1, vec![b]).unwrap());
        assert_eq!(&img.samples()[..4], &[255, 0, 128, 255]);
    }

    proptest! {
        #[test]
        fn quantize_matches_reference(v in -1000.0f64..1000.0) {
            prop_assert_eq!(quantize(v), reference_quantize(v));
        }

        #[test]
        fn blocks_round_trip(rows in 1usize..4, cols in 1usize..4, seed: u64) {
            let mut s = seed;
            let img = GrayImage::from_fn(cols * 8, rows * 8, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 56) as u8
            }).unwrap();
            let grid = to_blocks(&img).unwrap();
            prop_assert_eq!(grid.blocks().len(), rows * cols);
            prop_assert_eq!(from_blocks(&grid), img);
        }

        #[test]
        fn pgm_round_trip(w in 1usize..20, h in 1usize..20, data in proptest::collection::vec(any::<u8>(), 400)) {
            let img = GrayImage::new(w, h, data[..w * h].to_vec()).unwrap();
            let bytes = write_pgm(&img);
            let back = read_pgm(&bytes).unwrap();
            prop_assert_eq!(&back, &img);
            prop_assert_eq!(write_pgm(&back), bytes);
        }

        #[test]
        fn from_blocks_total(vals in proptest::collection::vec(-1e6f64..1e6, 64)) {
            let b = Block::from_fn(|r, c| vals[r * 8 + c]);
            let img = from_blocks(&BlockGrid::new(1, 1, vec![b]).unwrap());
            prop_assert_eq!(img.samples().len(), 64);
        }
    }
}
