//! Seeded random augmentation chains.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ops::*;
use super::{AugmentKind, AugmentOp, AugmentOpSpec, TransformLog};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::seed;

/// Closed interval, serialized as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct SpanF64 {
    pub lo: f64,
    pub hi: f64,
}

impl SpanF64 {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }

    fn within(&self, name: &'static str, lo: f64, hi: f64) -> Result<()> {
        let ok = self.lo.is_finite()
            && self.hi.is_finite()
            && lo <= self.lo
            && self.lo <= self.hi
            && self.hi <= hi;
        if ok {
            Ok(())
        } else {
            Err(Error::ParamOutOfRange {
                op: "policy",
                name,
                value: if self.lo < lo || !self.lo.is_finite() {
                    self.lo
                } else {
                    self.hi
                },
                range: "ordered span inside the transform's legal range",
            })
        }
    }
}

impl From<[f64; 2]> for SpanF64 {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Self { lo, hi }
    }
}

impl From<SpanF64> for [f64; 2] {
    fn from(s: SpanF64) -> Self {
        [s.lo, s.hi]
    }
}

/// How kinds are chosen for one image.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Each kind is applied independently with its own probability.
    #[default]
    Independent,
    /// Exactly one kind, drawn with weights proportional to the
    /// probabilities.
    OneOf,
}

/// Application probabilities and parameter distributions for
/// [`random_chain`]. Parameters are drawn uniformly from their spans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentPolicy {
    pub selection: Selection,
    pub p_affine: f64,
    pub p_stretch: f64,
    pub p_morphology: f64,
    pub p_motion_blur: f64,
    pub p_uneven_light: f64,
    pub p_degrade: f64,
    pub rotation_deg: SpanF64,
    pub shear: SpanF64,
    pub scale: SpanF64,
    pub shift_px: SpanF64,
    /// Odd kernel lengths, chosen uniformly.
    pub blur_lengths: Vec<u32>,
    pub gain_min: SpanF64,
    pub gain_max: SpanF64,
    pub stretch: SpanF64,
    pub erode_probability: f64,
    pub morph_kernel: u32,
    pub morph_iterations: u32,
    pub downscale: SpanF64,
    pub noise_sigma: SpanF64,
}

impl Default for AugmentPolicy {
    fn default() -> Self {
        Self {
            selection: Selection::Independent,
            p_affine: 0.5,
            p_stretch: 0.5,
            p_morphology: 0.5,
            p_motion_blur: 0.5,
            p_uneven_light: 0.5,
            p_degrade: 0.5,
            rotation_deg: SpanF64::new(-MAX_ROTATION_DEG, MAX_ROTATION_DEG),
            shear: SpanF64::new(SHEAR_RANGE.0, SHEAR_RANGE.1),
            scale: SpanF64::new(SCALE_RANGE.0, SCALE_RANGE.1),
            shift_px: SpanF64::new(-MAX_SHIFT_PX, MAX_SHIFT_PX),
            blur_lengths: vec![3, 5, 7, 9],
            gain_min: SpanF64::new(GAIN_MIN_RANGE.0, GAIN_MIN_RANGE.1),
            gain_max: SpanF64::new(GAIN_MAX_RANGE.0, GAIN_MAX_RANGE.1),
            stretch: SpanF64::new(STRETCH_RANGE.0, STRETCH_RANGE.1),
            erode_probability: 0.5,
            morph_kernel: 3,
            morph_iterations: 1,
            downscale: SpanF64::new(DOWNSCALE_RANGE.0, DOWNSCALE_RANGE.1),
            noise_sigma: SpanF64::new(0.0, MAX_NOISE_SIGMA),
        }
    }
}

impl AugmentPolicy {
    /// A policy that never applies anything.
    pub fn none() -> Self {
        Self {
            p_affine: 0.0,
            p_stretch: 0.0,
            p_morphology: 0.0,
            p_motion_blur: 0.0,
            p_uneven_light: 0.0,
            p_degrade: 0.0,
            ..Self::default()
        }
    }

    /// Every kind on every image.
    pub fn all() -> Self {
        Self {
            p_affine: 1.0,
            p_stretch: 1.0,
            p_morphology: 1.0,
            p_motion_blur: 1.0,
            p_uneven_light: 1.0,
            p_degrade: 1.0,
            ..Self::default()
        }
    }

    pub fn probability(&self, kind: AugmentKind) -> f64 {
        match kind {
            AugmentKind::Affine => self.p_affine,
            AugmentKind::Stretch => self.p_stretch,
            AugmentKind::Morphology => self.p_morphology,
            AugmentKind::MotionBlur => self.p_motion_blur,
            AugmentKind::UnevenLight => self.p_uneven_light,
            AugmentKind::Degrade => self.p_degrade,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &'static str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::ParamOutOfRange {
                    op: "policy",
                    name,
                    value: p,
                    range: "[0, 1]",
                })
            }
        };
        prob("p_affine", self.p_affine)?;
        prob("p_stretch", self.p_stretch)?;
        prob("p_morphology", self.p_morphology)?;
        prob("p_motion_blur", self.p_motion_blur)?;
        prob("p_uneven_light", self.p_uneven_light)?;
        prob("p_degrade", self.p_degrade)?;
        prob("erode_probability", self.erode_probability)?;
        self.rotation_deg
            .within("rotation_deg", -MAX_ROTATION_DEG, MAX_ROTATION_DEG)?;
        self.shear.within("shear", SHEAR_RANGE.0, SHEAR_RANGE.1)?;
        self.scale.within("scale", SCALE_RANGE.0, SCALE_RANGE.1)?;
        self.shift_px
            .within("shift_px", -MAX_SHIFT_PX, MAX_SHIFT_PX)?;
        self.gain_min
            .within("gain_min", GAIN_MIN_RANGE.0, GAIN_MIN_RANGE.1)?;
        self.gain_max
            .within("gain_max", GAIN_MAX_RANGE.0, GAIN_MAX_RANGE.1)?;
        self.stretch
            .within("stretch", STRETCH_RANGE.0, STRETCH_RANGE.1)?;
        self.downscale
            .within("downscale", DOWNSCALE_RANGE.0, DOWNSCALE_RANGE.1)?;
        self.noise_sigma
            .within("noise_sigma", 0.0, MAX_NOISE_SIGMA)?;
        if self.blur_lengths.is_empty()
            || self
                .blur_lengths
                .iter()
                .any(|&l| l % 2 == 0 || l > MAX_BLUR_LENGTH)
        {
            return Err(Error::ParamOutOfRange {
                op: "policy",
                name: "blur_lengths",
                value: self.blur_lengths.first().copied().unwrap_or(0) as f64,
                range: "non-empty list of odd lengths <= 9",
            });
        }
        if self.morph_kernel.is_multiple_of(2) || self.morph_kernel > MAX_MORPH_KERNEL {
            return Err(Error::ParamOutOfRange {
                op: "policy",
                name: "morph_kernel",
                value: self.morph_kernel as f64,
                range: "odd in [1, 7]",
            });
        }
        if self.morph_iterations == 0 || self.morph_iterations > MAX_MORPH_ITERATIONS {
            return Err(Error::ParamOutOfRange {
                op: "policy",
                name: "morph_iterations",
                value: self.morph_iterations as f64,
                range: "[1, 4]",
            });
        }
        Ok(())
    }

    fn sample_op(&self, kind: AugmentKind, rng: &mut ChaCha8Rng) -> AugmentOp {
        match kind {
            AugmentKind::Affine => AugmentOp::Affine {
                rotation_deg: self.rotation_deg.sample(rng),
                shear: self.shear.sample(rng),
                scale: self.scale.sample(rng),
                tx_px: self.shift_px.sample(rng),
                ty_px: self.shift_px.sample(rng),
            },
            AugmentKind::Stretch => AugmentOp::Stretch {
                sx: self.stretch.sample(rng),
                sy: self.stretch.sample(rng),
            },
            AugmentKind::Morphology => AugmentOp::Morphology {
                mode: if rng.random_bool(self.erode_probability) {
                    MorphMode::Erode
                } else {
                    MorphMode::Dilate
                },
                kernel_size: self.morph_kernel,
                iterations: self.morph_iterations,
            },
            AugmentKind::MotionBlur => AugmentOp::MotionBlur {
                length: self.blur_lengths[rng.random_range(0..self.blur_lengths.len())],
                angle_rad: rng.random_range(0.0..PI),
            },
            AugmentKind::UnevenLight => AugmentOp::UnevenLight {
                gain_min: self.gain_min.sample(rng),
                gain_max: self.gain_max.sample(rng),
                axis_angle_rad: rng.random_range(0.0..2.0 * PI),
            },
            AugmentKind::Degrade => AugmentOp::Degrade {
                factor: self.downscale.sample(rng),
                sigma: self.noise_sigma.sample(rng),
            },
        }
    }

    /// Kinds to apply, in chain order.
    fn choose_kinds(&self, rng: &mut ChaCha8Rng) -> Vec<AugmentKind> {
        match self.selection {
            Selection::Independent => AugmentKind::CHAIN_ORDER
                .into_iter()
                .filter(|&k| rng.random::<f64>() < self.probability(k))
                .collect(),
            Selection::OneOf => {
                let total: f64 = AugmentKind::CHAIN_ORDER
                    .iter()
                    .map(|&k| self.probability(k))
                    .sum();
                let draw = rng.random::<f64>() * total;
                if total <= 0.0 {
                    return Vec::new();
                }
                let mut acc = 0.0;
                for k in AugmentKind::CHAIN_ORDER {
                    acc += self.probability(k);
                    if draw < acc {
                        return vec![k];
                    }
                }
                // Rounding left `draw` at the very top; take the last kind
                // with non-zero weight.
                AugmentKind::CHAIN_ORDER
                    .into_iter()
                    .rev()
                    .find(|&k| self.probability(k) > 0.0)
                    .into_iter()
                    .collect()
            }
        }
    }
}

/// Apply a seeded random subset of the six transforms in the fixed order
/// affine → stretch → morphology → motion blur → uneven light → degrade.
///
/// Returns the output and the exact log; `log.replay(img)` reproduces it.
pub fn random_chain(
    img: &ImageBuffer,
    chain_seed: u64,
    policy: &AugmentPolicy,
) -> Result<(ImageBuffer, TransformLog)> {
    policy.validate()?;
    let mut rng = seed::rng(chain_seed);
    let kinds = policy.choose_kinds(&mut rng);
    let mut log = Vec::with_capacity(kinds.len());
    let mut out = img.clone();
    for kind in kinds {
        let slot = AugmentKind::CHAIN_ORDER
            .iter()
            .position(|&k| k == kind)
            .expect("chain kind") as u64;
        let spec = AugmentOpSpec::new(
            policy.sample_op(kind, &mut rng),
            seed::mix64(chain_seed, slot),
        );
        out = spec.apply(&out)?;
        log.push(spec);
    }
    Ok((out, TransformLog(log)))
}
