//! The six plate augmentations with their legal parameter ranges.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::sample::{self, Affine2};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::seed;
use crate::Scalar;

pub const MAX_ROTATION_DEG: f64 = 15.0;
pub const SHEAR_RANGE: (f64, f64) = (-0.3, 0.3);
pub const SCALE_RANGE: (f64, f64) = (0.8, 1.2);
pub const MAX_SHIFT_PX: f64 = 6.0;
pub const MAX_BLUR_LENGTH: u32 = 9;
pub const GAIN_MIN_RANGE: (f64, f64) = (0.3, 1.0);
pub const GAIN_MAX_RANGE: (f64, f64) = (1.0, 1.6);
pub const STRETCH_RANGE: (f64, f64) = (0.8, 1.3);
pub const MAX_MORPH_KERNEL: u32 = 7;
pub const MAX_MORPH_ITERATIONS: u32 = 4;
pub const DOWNSCALE_RANGE: (f64, f64) = (1.0, 4.0);
pub const MAX_NOISE_SIGMA: f64 = 12.0;

fn check(
    op: &'static str,
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            op,
            name,
            value,
            range,
        })
    }
}

/// Rotate, shear and scale about the image center, then translate. Bilinear
/// sampling, edge replication.
pub fn affine(
    img: &ImageBuffer,
    rotation_deg: f64,
    shear: f64,
    scale: f64,
    tx_px: f64,
    ty_px: f64,
) -> Result<ImageBuffer> {
    const OP: &str = "affine";
    check(
        OP,
        "rotation_deg",
        rotation_deg,
        -MAX_ROTATION_DEG,
        MAX_ROTATION_DEG,
        "[-15, 15]",
    )?;
    check(
        OP,
        "shear",
        shear,
        SHEAR_RANGE.0,
        SHEAR_RANGE.1,
        "[-0.3, 0.3]",
    )?;
    check(
        OP,
        "scale",
        scale,
        SCALE_RANGE.0,
        SCALE_RANGE.1,
        "[0.8, 1.2]",
    )?;
    check(OP, "tx_px", tx_px, -MAX_SHIFT_PX, MAX_SHIFT_PX, "[-6, 6]")?;
    check(OP, "ty_px", ty_px, -MAX_SHIFT_PX, MAX_SHIFT_PX, "[-6, 6]")?;
    let linear = Affine2::<Scalar>::linear_part(rotation_deg.to_radians(), shear, scale);
    let forward = Affine2::about(linear, sample::center(img), [tx_px, ty_px]);
    Ok(sample::warp_affine(img, &forward).expect("scale >= 0.8 keeps the map invertible"))
}

/// Convolve with a normalized line kernel of odd `length` at `angle_rad`.
/// `length = 1` is the identity.
pub fn motion_blur(img: &ImageBuffer, length: u32, angle_rad: f64) -> Result<ImageBuffer> {
    const OP: &str = "motion_blur";
    if length.is_multiple_of(2) || length > MAX_BLUR_LENGTH {
        return Err(Error::ParamOutOfRange {
            op: OP,
            name: "length",
            value: length as f64,
            range: "odd in [1, 9]",
        });
    }
    if !(angle_rad.is_finite() && (0.0..std::f64::consts::PI).contains(&angle_rad)) {
        return Err(Error::ParamOutOfRange {
            op: OP,
            name: "angle_rad",
            value: angle_rad,
            range: "[0, pi)",
        });
    }
    if length == 1 {
        return Ok(img.clone());
    }
    Ok(sample::line_kernel::<Scalar>(length as usize, angle_rad).apply(img))
}

/// Brightness ramp from `gain_min` to `gain_max` along `axis_angle_rad`.
pub fn uneven_light(
    img: &ImageBuffer,
    gain_min: f64,
    gain_max: f64,
    axis_angle_rad: f64,
) -> Result<ImageBuffer> {
    const OP: &str = "uneven_light";
    check(
        OP,
        "gain_min",
        gain_min,
        GAIN_MIN_RANGE.0,
        GAIN_MIN_RANGE.1,
        "[0.3, 1]",
    )?;
    check(
        OP,
        "gain_max",
        gain_max,
        GAIN_MAX_RANGE.0,
        GAIN_MAX_RANGE.1,
        "[1, 1.6]",
    )?;
    check(
        OP,
        "axis_angle_rad",
        axis_angle_rad,
        f64::MIN,
        f64::MAX,
        "finite",
    )?;
    Ok(sample::light_ramp::<Scalar>(
        img,
        gain_min,
        gain_max,
        axis_angle_rad,
    ))
}

/// Anisotropic rescale of the content about the image center; output size is
/// unchanged.
pub fn stretch(img: &ImageBuffer, sx: f64, sy: f64) -> Result<ImageBuffer> {
    const OP: &str = "stretch";
    check(OP, "sx", sx, STRETCH_RANGE.0, STRETCH_RANGE.1, "[0.8, 1.3]")?;
    check(OP, "sy", sy, STRETCH_RANGE.0, STRETCH_RANGE.1, "[0.8, 1.3]")?;
    let forward = Affine2::about(
        [[sx, 0.0], [0.0, sy]],
        sample::center::<Scalar>(img),
        [0.0, 0.0],
    );
    Ok(sample::warp_affine(img, &forward).expect("positive scales are invertible"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorphMode {
    Erode,
    Dilate,
}

/// Square min (erode) or max (dilate) filter, per channel, edge-replicated.
/// `kernel_size = 1` is the identity.
pub fn morphology(
    img: &ImageBuffer,
    mode: MorphMode,
    kernel_size: u32,
    iterations: u32,
) -> Result<ImageBuffer> {
    const OP: &str = "morphology";
    if kernel_size.is_multiple_of(2) || kernel_size > MAX_MORPH_KERNEL {
        return Err(Error::ParamOutOfRange {
            op: OP,
            name: "kernel_size",
            value: kernel_size as f64,
            range: "odd in [1, 7]",
        });
    }
    if iterations == 0 || iterations > MAX_MORPH_ITERATIONS {
        return Err(Error::ParamOutOfRange {
            op: OP,
            name: "iterations",
            value: iterations as f64,
            range: "[1, 4]",
        });
    }
    let radius = (kernel_size / 2) as usize;
    let mut cur = img.clone();
    for _ in 0..iterations {
        cur = match mode {
            MorphMode::Erode => separable_rank_filter(&cur, radius, u8::min),
            MorphMode::Dilate => separable_rank_filter(&cur, radius, u8::max),
        };
    }
    Ok(cur)
}

fn separable_rank_filter(
    img: &ImageBuffer,
    radius: usize,
    pick: impl Fn(u8, u8) -> u8 + Copy,
) -> ImageBuffer {
    if radius == 0 {
        return img.clone();
    }
    let (w, h) = img.dimensions();
    let ch = img.channels() as usize;
    let r = radius;
    let (padded, pw) = sample::pad_replicate(img, [r, r, r, r], |v| v);
    let row_len = w * ch;
    // Horizontal pass over every padded row.
    let mut horiz = vec![0u8; (h + 2 * r) * row_len];
    for (py, dst) in horiz.chunks_exact_mut(row_len).enumerate() {
        let row = &padded[py * pw * ch..(py + 1) * pw * ch];
        dst.copy_from_slice(&row[r * ch..r * ch + row_len]);
        for k in 0..=2 * r {
            if k == r {
                continue;
            }
            for (d, &s) in dst.iter_mut().zip(&row[k * ch..k * ch + row_len]) {
                *d = pick(*d, s);
            }
        }
    }
    let mut out = vec![0u8; h * row_len];
    for (y, dst) in out.chunks_exact_mut(row_len).enumerate() {
        dst.copy_from_slice(&horiz[(y + r) * row_len..(y + r + 1) * row_len]);
        for k in 0..=2 * r {
            if k == r {
                continue;
            }
            for (d, &s) in dst
                .iter_mut()
                .zip(&horiz[(y + k) * row_len..(y + k + 1) * row_len])
            {
                *d = pick(*d, s);
            }
        }
    }
    img.with_samples(out)
}

/// Downscale by `factor`, upscale back (both bilinear), then add zero-mean
/// Gaussian noise of standard deviation `sigma` drawn from `seed`.
pub fn degrade(img: &ImageBuffer, factor: f64, sigma: f64, seed: u64) -> Result<ImageBuffer> {
    const OP: &str = "degrade";
    check(
        OP,
        "factor",
        factor,
        DOWNSCALE_RANGE.0,
        DOWNSCALE_RANGE.1,
        "[1, 4]",
    )?;
    check(OP, "sigma", sigma, 0.0, MAX_NOISE_SIGMA, "[0, 12]")?;
    let (w, h) = img.dimensions();
    let small_w = ((w as f64 / factor).round() as usize).max(1);
    let small_h = ((h as f64 / factor).round() as usize).max(1);
    let small = sample::resize_bilinear::<Scalar>(img, small_w, small_h);
    let mut out = sample::resize_bilinear::<Scalar>(&small, w, h);
    if sigma > 0.0 {
        add_noise(&mut out, sigma, seed);
    }
    Ok(out)
}

/// Index bits per noise draw; each `u64` from the stream feeds five draws.
const NOISE_BITS: u32 = 12;
/// Fractional bits of the fixed-point noise table.
const NOISE_FRAC: u32 = 8;

/// Zero-mean, unit-variance table of `2^NOISE_BITS` standard normal
/// quantiles at the cell midpoints.
fn normal_quantiles() -> &'static [f64] {
    static TABLE: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 1usize << NOISE_BITS;
        let normal = Normal::standard();
        let q: Vec<f64> = (0..n)
            .map(|i| normal.inverse_cdf((i as f64 + 0.5) / n as f64))
            .collect();
        let std = (q.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        q.into_iter().map(|v| v / std).collect()
    })
}

/// Add Gaussian noise of std `sigma` sampled through a quantile table.
fn add_noise(img: &mut ImageBuffer, sigma: f64, seed: u64) {
    let scale = sigma * f64::from(1u32 << NOISE_FRAC);
    let table: Vec<i32> = normal_quantiles()
        .iter()
        .map(|z| (z * scale).round() as i32)
        .collect();
    let table: &[i32; 1 << NOISE_BITS] = table.as_slice().try_into().expect("table size");
    let mask = (1u64 << NOISE_BITS) - 1;
    let draws_per_word = (64 / NOISE_BITS) as usize;
    let mut rng = seed::rng(seed);
    let half = 1i32 << (NOISE_FRAC - 1);
    for chunk in img.samples_mut().chunks_mut(draws_per_word) {
        let mut word = rng.next_u64();
        for v in chunk {
            let noise = table[(word & mask) as usize];
            word >>= NOISE_BITS;
            let fixed = (i32::from(*v) << NOISE_FRAC) + noise + half;
            *v = (fixed >> NOISE_FRAC).clamp(0, 255) as u8;
        }
    }
}
