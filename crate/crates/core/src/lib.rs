//! Deterministic synthetic license-plate corpora.
//!
//! * [`render`] draws grammatical plate labels onto blue plate canvases.
//! * [`augment`] holds the six plate augmentations, grayscale conversion,
//!   inversion and the seeded random chain with replayable logs.
//! * [`corpus`] ingests labelled real plates, expands them by augmentation and
//!   assembles mixed training sets from per-source pools.
//! * [`metrics`] scores predictions with plate accuracy (RA) and
//!   alignment-based character accuracy (CRA, CRA-C, CRA-NC).
//!
//! Everything random is a pure function of an explicit `u64` seed. Batch
//! work derives per-record seeds with [`seed::mix64`], so output does not
//! depend on thread count or scheduling.
//!
//! Numeric kernels are generic over [`scalar::Real`]; the pipeline itself
//! runs in [`Scalar`].

pub mod alphabet;
pub mod augment;
pub mod bench;
pub mod corpus;
pub mod error;
pub mod font;
pub mod image;
pub mod manifest;
pub mod metrics;
pub mod render;
pub mod scalar;
pub mod seed;

/// Scalar type of the image pipeline. Transform logs replay bit-exactly only
/// under the same scalar.
pub type Scalar = f64;

pub type Affine = augment::sample::Affine2<Scalar>;
pub type EvalReport = metrics::EvalReport<Scalar>;
pub type LineKernel = augment::sample::SparseKernel<Scalar>;

pub use alphabet::{sample_label, PlateAlphabet, PlateLabel};
pub use augment::{random_chain, AugmentOp, AugmentOpSpec, AugmentPolicy, TransformLog};
pub use corpus::{
    assemble, build_augmented_set, expand_with_inversion, ingest_real, select_real, CorpusRecipe,
};
pub use error::{Error, Result};
pub use image::ImageBuffer;
pub use manifest::{verify, Manifest, ManifestRecord, SourceTag, VerifyReport};
pub use metrics::{evaluate, levenshtein_align, Fraction, MatchCounts, PredictionRecord};
pub use render::{batch_render, render_plate, RenderConfig, RenderSpec};
