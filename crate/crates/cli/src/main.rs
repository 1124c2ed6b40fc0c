use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tagmark_core::{
    apply_attack, embed, extract, format_db, mse, psnr, read_pgm, verify, write_pgm, AttackKind,
    AttackSpec, EmbedParams, GrayImage, SideInfoKey, TagMark, DEFAULT_ALPHA, DEFAULT_THRESHOLD_DB,
};

/// Embed, extract and verify dual-layer (DCT + SVD) identification tags in grayscale PGM images.
#[derive(Parser, Debug)]
#[command(name = "tagmark", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embed a tag image into a cover and write the watermarked image plus its key
    Embed {
        #[arg(long)]
        cover: PathBuf,
        /// Tag image with one pixel per 8x8 cover block
        #[arg(long)]
        mark: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        key: PathBuf,
    },
    /// Recover both embedded marks from a (possibly attacked) image
    Extract {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out_svd: PathBuf,
        #[arg(long)]
        out_dct: PathBuf,
    },
    /// Decide authenticity; exits 0 if authentic, 1 if rejected, 2 on error
    Verify {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_DB)]
        threshold: f64,
    },
    /// Apply a seeded noise attack
    Attack {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long = "type", value_enum)]
        kind: AttackArg,
        #[arg(long, default_value_t = 10.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.02)]
        density: f64,
        #[arg(long, default_value_t = 20.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print MSE and PSNR between two images
    Psnr { a: PathBuf, b: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AttackArg {
    #[value(name = "gaussian")]
    Gaussian,
    #[value(name = "salt_pepper")]
    SaltPepper,
    #[value(name = "random_uniform")]
    RandomUniform,
}

impl From<AttackArg> for AttackKind {
    fn from(a: AttackArg) -> Self {
        match a {
            AttackArg::Gaussian => AttackKind::Gaussian,
            AttackArg::SaltPepper => AttackKind::SaltPepper,
            AttackArg::RandomUniform => AttackKind::RandomUniform,
        }
    }
}

const EXIT_REJECTED: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn load_image(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_pgm(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn save_image(path: &Path, img: &GrayImage) -> Result<()> {
    fs::write(path, write_pgm(img)).with_context(|| format!("writing {}", path.display()))
}

fn load_key(path: &Path) -> Result<SideInfoKey> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SideInfoKey::from_text(&text).with_context(|| format!("parsing key {}", path.display()))
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Embed {
            cover,
            mark,
            alpha,
            out,
            key,
        } => {
            let cover_img = load_image(&cover)?;
            let mark = TagMark::new(load_image(&mark)?);
            let (watermarked, side_info) =
                embed(&cover_img, &mark, &EmbedParams::with_alpha(alpha))?;
            save_image(&out, &watermarked)?;
            fs::write(&key, side_info.to_text())
                .with_context(|| format!("writing {}", key.display()))?;
            println!(
                "PSNR(cover,wm)={} dB",
                format_db(psnr(&cover_img, &watermarked)?)
            );
        }
        Command::Extract {
            image,
            key,
            out_svd,
            out_dct,
        } => {
            let marks = extract(&load_image(&image)?, &load_key(&key)?)?;
            save_image(&out_svd, &marks.svd_image())?;
            save_image(&out_dct, &marks.dct_image())?;
            println!("PSNR(svd,dct)={} dB", format_db(marks.agreement_db()));
        }
        Command::Verify {
            image,
            key,
            threshold,
        } => {
            let report = verify(&load_image(&image)?, &load_key(&key)?, threshold)?;
            println!("{report}");
            if !report.authentic {
                return Ok(ExitCode::from(EXIT_REJECTED));
            }
        }
        Command::Attack {
            input,
            output,
            kind,
            sigma,
            density,
            amplitude,
            seed,
        } => {
            let spec = AttackSpec {
                kind: kind.into(),
                sigma,
                density,
                amplitude,
                seed,
            };
            let attacked = apply_attack(&load_image(&input)?, &spec)?;
            save_image(&output, &attacked)?;
        }
        Command::Psnr { a, b } => {
            let (a, b) = (load_image(&a)?, load_image(&b)?);
            println!("MSE={} PSNR={} dB", mse(&a, &b)?, format_db(psnr(&a, &b)?));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
