//! Plate augmentations, color conversions and the seeded random chain.
//!
//! Every applied transform is recorded as an [`AugmentOpSpec`]; replaying a
//! [`TransformLog`] on the source image reproduces the chain output exactly.

mod chain;
mod color;
mod ops;
pub mod sample;

use serde::{Deserialize, Serialize};

pub use chain::{random_chain, AugmentPolicy, Selection, SpanF64};
pub use color::{invert, resize_to_input, to_gray, INPUT_HEIGHT, INPUT_WIDTH};
pub use ops::*;

use crate::error::Result;
use crate::image::ImageBuffer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugmentKind {
    Affine,
    MotionBlur,
    UnevenLight,
    Stretch,
    Morphology,
    Degrade,
}

impl AugmentKind {
    /// Application order used by [`random_chain`]: geometric, then
    /// photometric, then noise.
    pub const CHAIN_ORDER: [AugmentKind; 6] = [
        AugmentKind::Affine,
        AugmentKind::Stretch,
        AugmentKind::Morphology,
        AugmentKind::MotionBlur,
        AugmentKind::UnevenLight,
        AugmentKind::Degrade,
    ];
}

/// One transform with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum AugmentOp {
    Affine {
        rotation_deg: f64,
        shear: f64,
        scale: f64,
        tx_px: f64,
        ty_px: f64,
    },
    MotionBlur {
        length: u32,
        angle_rad: f64,
    },
    UnevenLight {
        gain_min: f64,
        gain_max: f64,
        axis_angle_rad: f64,
    },
    Stretch {
        sx: f64,
        sy: f64,
    },
    Morphology {
        mode: MorphMode,
        kernel_size: u32,
        iterations: u32,
    },
    Degrade {
        factor: f64,
        sigma: f64,
    },
}

impl AugmentOp {
    pub fn kind(&self) -> AugmentKind {
        match self {
            AugmentOp::Affine { .. } => AugmentKind::Affine,
            AugmentOp::MotionBlur { .. } => AugmentKind::MotionBlur,
            AugmentOp::UnevenLight { .. } => AugmentKind::UnevenLight,
            AugmentOp::Stretch { .. } => AugmentKind::Stretch,
            AugmentOp::Morphology { .. } => AugmentKind::Morphology,
            AugmentOp::Degrade { .. } => AugmentKind::Degrade,
        }
    }
}

/// Logged transform: `{kind, params, seed}`. Only `degrade` consumes its seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentOpSpec {
    #[serde(flatten)]
    pub op: AugmentOp,
    pub seed: u64,
}

impl AugmentOpSpec {
    pub fn new(op: AugmentOp, seed: u64) -> Self {
        Self { op, seed }
    }

    pub fn apply(&self, img: &ImageBuffer) -> Result<ImageBuffer> {
        match self.op {
            AugmentOp::Affine {
                rotation_deg,
                shear,
                scale,
                tx_px,
                ty_px,
            } => affine(img, rotation_deg, shear, scale, tx_px, ty_px),
            AugmentOp::MotionBlur { length, angle_rad } => motion_blur(img, length, angle_rad),
            AugmentOp::UnevenLight {
                gain_min,
                gain_max,
                axis_angle_rad,
            } => uneven_light(img, gain_min, gain_max, axis_angle_rad),
            AugmentOp::Stretch { sx, sy } => stretch(img, sx, sy),
            AugmentOp::Morphology {
                mode,
                kernel_size,
                iterations,
            } => morphology(img, mode, kernel_size, iterations),
            AugmentOp::Degrade { factor, sigma } => degrade(img, factor, sigma, self.seed),
        }
    }
}

/// Ordered record of the transforms applied to one image.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransformLog(pub Vec<AugmentOpSpec>);

impl TransformLog {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AugmentOpSpec> {
        self.0.iter()
    }

    /// Apply every logged transform in order.
    pub fn replay(&self, source: &ImageBuffer) -> Result<ImageBuffer> {
        let mut img = source.clone();
        for spec in &self.0 {
            img = spec.apply(&img)?;
        }
        Ok(img)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_spec_json_shape() {
        let spec = AugmentOpSpec::new(AugmentOp::Stretch { sx: 1.25, sy: 0.9 }, 17);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"stretch","params":{"sx":1.25,"sy":0.9},"seed":17}"#
        );
        let back: AugmentOpSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        let morph = AugmentOpSpec::new(
            AugmentOp::Morphology {
                mode: MorphMode::Erode,
                kernel_size: 3,
                iterations: 1,
            },
            0,
        );
        let json = serde_json::to_string(&morph).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"morphology","params":{"mode":"erode","kernel_size":3,"iterations":1},"seed":0}"#
        );
    }

    #[test]
    fn empty_log_replays_to_source() {
        let img = ImageBuffer::filled(5, 5, &[3, 4, 5]);
        assert_eq!(TransformLog::default().replay(&img).unwrap(), img);
    }
}
