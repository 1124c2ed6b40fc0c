//! Seeded noise channels used to probe watermark robustness.
//!
//! Every pixel draws from its own ChaCha8 stream: the generator is seeded with
//! `seed_from_u64(spec.seed)` and the stream number is the row-major pixel
//! index. Output therefore depends only on `(image, spec)` and is identical
//! under any parallel schedule.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::imagery::{quantize, GrayImage};
use crate::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackKind {
    /// Zero-mean Gaussian noise with standard deviation `sigma` on every pixel.
    Gaussian,
    /// With probability `density` a pixel becomes 0 or 255, equiprobably.
    SaltPepper,
    /// With probability `density` a pixel gets a uniform offset in `[-amplitude, amplitude]`.
    RandomUniform,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Gaussian => "gaussian",
            AttackKind::SaltPepper => "salt_pepper",
            AttackKind::RandomUniform => "random_uniform",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(AttackKind::Gaussian),
            "salt_pepper" => Ok(AttackKind::SaltPepper),
            "random_uniform" => Ok(AttackKind::RandomUniform),
            other => Err(Error::Parameter(format!("unknown attack type {other:?}"))),
        }
    }
}

/// Attack parameters. Fields that a kind does not use are ignored but still validated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub sigma: f64,
    pub density: f64,
    pub amplitude: f64,
    pub seed: u64,
}

impl AttackSpec {
    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            kind: AttackKind::Gaussian,
            sigma,
            density: 0.0,
            amplitude: 0.0,
            seed,
        }
    }

    pub fn salt_pepper(density: f64, seed: u64) -> Self {
        Self {
            kind: AttackKind::SaltPepper,
            sigma: 0.0,
            density,
            amplitude: 0.0,
            seed,
        }
    }

    pub fn random_uniform(density: f64, amplitude: f64, seed: u64) -> Self {
        Self {
            kind: AttackKind::RandomUniform,
            sigma: 0.0,
            density,
            amplitude,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Parameter(format!(
                "sigma must be finite and >= 0, got {}",
                self.sigma
            )));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::Parameter(format!(
                "density must be in [0, 1], got {}",
                self.density
            )));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Parameter(format!(
                "amplitude must be finite and >= 0, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }

    fn noisy_sample(&self, index: usize, sample: u8) -> u8 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let p = f64::from(sample);
        match self.kind {
            AttackKind::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                quantize(p + self.sigma * z)
            }
            AttackKind::SaltPepper => {
                if rng.random::<f64>() < self.density {
                    if rng.random::<bool>() {
                        255
                    } else {
                        0
                    }
                } else {
                    sample
                }
            }
            AttackKind::RandomUniform => {
                if rng.random::<f64>() < self.density {
                    let offset = if self.amplitude > 0.0 {
                        rng.random_range(-self.amplitude..=self.amplitude)
                    } else {
                        0.0
                    };
                    quantize(p + offset)
                } else {
                    sample
                }
            }
        }
    }
}

pub fn apply_attack(img: &GrayImage, spec: &AttackSpec) -> Result<GrayImage> {
    apply_attack_with(img, spec, Schedule::default())
}

pub fn apply_attack_with(
    img: &GrayImage,
    spec: &AttackSpec,
    schedule: Schedule,
) -> Result<GrayImage> {
    spec.validate()?;
    let samples = schedule.map(img.samples(), |i, &s| spec.noisy_sample(i, s));
    GrayImage::new(img.width(), img.height(), samples)
}
