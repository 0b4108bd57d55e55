//! Owned 8-bit rasters and PNG I/O.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use crate::error::{Error, Result};

/// Row-major interleaved 8-bit raster with 1 (gray) or 3 (RGB) channels.
#[derive(Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: u8,
    samples: Vec<u8>,
}

impl std::fmt::Debug for ImageBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageBuffer")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: u8, samples: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "empty raster {width}x{height}"
            )));
        }
        let expected = width * height * channels as usize;
        if samples.len() != expected {
            return Err(Error::InvalidImage(format!(
                "{width}x{height}x{channels} needs {expected} samples, got {}",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    /// Image with every pixel set to `pixel` (length 1 or 3).
    pub fn filled(width: usize, height: usize, pixel: &[u8]) -> Self {
        assert!(pixel.len() == 1 || pixel.len() == 3);
        assert!(width > 0 && height > 0);
        let samples = pixel
            .iter()
            .copied()
            .cycle()
            .take(width * height * pixel.len())
            .collect();
        Self {
            width,
            height,
            channels: pixel.len() as u8,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    fn offset(&self, x: usize, y: usize) -> usize {
        (y * self.width + x) * self.channels as usize
    }

    /// Samples of pixel `(x, y)`.
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let o = self.offset(x, y);
        &self.samples[o..o + self.channels as usize]
    }

    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [u8] {
        let o = self.offset(x, y);
        let c = self.channels as usize;
        &mut self.samples[o..o + c]
    }

    /// Same geometry, fresh sample storage.
    pub(crate) fn with_samples(&self, samples: Vec<u8>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        Self {
            width: self.width,
            height: self.height,
            channels: self.channels,
            samples,
        }
    }

    pub fn require_channels(&self, expected: u8) -> Result<()> {
        if self.channels == expected {
            Ok(())
        } else {
            Err(Error::WrongChannelCount {
                expected,
                actual: self.channels,
            })
        }
    }

    /// Encode as an 8-bit PNG.
    pub fn to_png(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.to_dynamic()
            .write_to(&mut Cursor::new(&mut out), ImageFormat::Png)
            .expect("PNG encoding into memory cannot fail");
        out
    }

    pub fn from_png(bytes: &[u8]) -> std::result::Result<Self, String> {
        let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
            .map_err(|e| e.to_string())?;
        Ok(Self::from_dynamic(img))
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_png())
            .map_err(|e| Error::io(format!("write {}", path.display()), e))
    }

    /// Load any raster format the `image` crate can decode. Alpha is dropped;
    /// gray stays 1-channel, everything else becomes RGB.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(format!("read {}", path.display()), e))?;
        let img = image::load_from_memory(&bytes).map_err(|e| Error::ImageDecode {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Ok(Self::from_dynamic(img))
    }

    fn to_dynamic(&self) -> DynamicImage {
        let (w, h) = (self.width as u32, self.height as u32);
        match self.channels {
            1 => DynamicImage::ImageLuma8(
                image::GrayImage::from_raw(w, h, self.samples.clone()).expect("sized"),
            ),
            _ => DynamicImage::ImageRgb8(
                image::RgbImage::from_raw(w, h, self.samples.clone()).expect("sized"),
            ),
        }
    }

    fn from_dynamic(img: DynamicImage) -> Self {
        let (w, h) = (img.width() as usize, img.height() as usize);
        match img {
            DynamicImage::ImageLuma8(g) => Self {
                width: w,
                height: h,
                channels: 1,
                samples: g.into_raw(),
            },
            DynamicImage::ImageLumaA8(_)
            | DynamicImage::ImageLuma16(_)
            | DynamicImage::ImageLumaA16(_) => Self {
                width: w,
                height: h,
                channels: 1,
                samples: img.to_luma8().into_raw(),
            },
            other => Self {
                width: w,
                height: h,
                channels: 3,
                samples: other.to_rgb8().into_raw(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_checks_sample_count() {
        assert!(ImageBuffer::new(2, 2, 3, vec![0; 12]).is_ok());
        assert!(matches!(
            ImageBuffer::new(2, 2, 3, vec![0; 11]),
            Err(Error::InvalidImage(_))
        ));
        assert!(ImageBuffer::new(2, 2, 2, vec![0; 8]).is_err());
        assert!(ImageBuffer::new(0, 2, 1, vec![]).is_err());
    }

    #[test]
    fn png_round_trip_gray_and_rgb() {
        let gray = ImageBuffer::new(3, 2, 1, vec![0, 10, 20, 30, 40, 255]).unwrap();
        assert_eq!(ImageBuffer::from_png(&gray.to_png()).unwrap(), gray);
        let rgb = ImageBuffer::new(2, 1, 3, vec![1, 2, 3, 250, 251, 252]).unwrap();
        assert_eq!(ImageBuffer::from_png(&rgb.to_png()).unwrap(), rgb);
    }

    #[test]
    fn pixel_access() {
        let mut img = ImageBuffer::filled(4, 3, &[9, 8, 7]);
        img.pixel_mut(3, 2).copy_from_slice(&[1, 2, 3]);
        assert_eq!(img.pixel(3, 2), &[1, 2, 3]);
        assert_eq!(img.pixel(0, 0), &[9, 8, 7]);
    }
}
