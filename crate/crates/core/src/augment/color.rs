//! Grayscale conversion, pixel inversion and network-input resizing.

use super::sample;
use crate::error::Result;
use crate::image::ImageBuffer;
use crate::Scalar;

pub const INPUT_WIDTH: usize = 136;
pub const INPUT_HEIGHT: usize = 36;

/// BT.601 luma, `round(0.299 R + 0.587 G + 0.114 B)`, in exact integer
/// arithmetic.
pub fn to_gray(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.require_channels(3)?;
    let samples = img
        .samples()
        .chunks_exact(3)
        .map(|p| {
            let weighted = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
            ((weighted + 500) / 1000) as u8
        })
        .collect();
    ImageBuffer::new(img.width(), img.height(), 1, samples)
}

/// `255 − v` for every sample of a grayscale image.
pub fn invert(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.require_channels(1)?;
    Ok(img.with_samples(img.samples().iter().map(|v| 255 - v).collect()))
}

/// Grayscale 136×36 network input. RGB inputs are converted first.
pub fn resize_to_input(img: &ImageBuffer) -> ImageBuffer {
    let gray = if img.channels() == 3 {
        to_gray(img).expect("three channels")
    } else {
        img.clone()
    };
    sample::resize_bilinear::<Scalar>(&gray, INPUT_WIDTH, INPUT_HEIGHT)
}
