//! Mean squared error, PSNR, and the verification report.

use std::fmt;

use crate::error::{Error, Result};
use crate::imagery::GrayImage;

/// Peak sample value of 8-bit images.
pub const MAX_SAMPLE: f64 = 255.0;

fn check_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.same_dimensions(b) {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "cannot compare {}x{} with {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )))
    }
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    check_dims(a, b)?;
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum();
    Ok(sum / a.samples().len() as f64)
}

/// PSNR in dB. Identical images give `f64::INFINITY`.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (MAX_SAMPLE * MAX_SAMPLE / mse).log10()
    }
}

/// Formats a dB value for output: `inf` for the infinite sentinel, four decimals otherwise.
pub fn format_db(db: f64) -> String {
    if db.is_infinite() && db > 0.0 {
        "inf".to_string()
    } else {
        format!("{db:.4}")
    }
}

/// Range and mean of one extracted (unclamped) mark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl LayerSummary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len().max(1) as f64;
        Self {
            mean: values.iter().sum::<f64>() / n,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Outcome of comparing the two extracted marks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    pub psnr_db: f64,
    pub threshold_db: f64,
    pub authentic: bool,
    pub svd_layer: LayerSummary,
    pub dct_layer: LayerSummary,
}

impl VerificationReport {
    pub fn new(
        psnr_db: f64,
        threshold_db: f64,
        svd_layer: LayerSummary,
        dct_layer: LayerSummary,
    ) -> Self {
        Self {
            psnr_db,
            threshold_db,
            authentic: psnr_db >= threshold_db,
            svd_layer,
            dct_layer,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.authentic {
            "authentic"
        } else {
            "rejected"
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PSNR={} dB THRESHOLD={} VERDICT={}",
            format_db(self.psnr_db),
            self.threshold_db,
            self.verdict()
        )
    }
}
