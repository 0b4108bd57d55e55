//! Single-threaded augmentation throughput, shared by the bundled
//! `chain_throughput` example and the acceptance checks.

use std::time::Instant;

use crate::alphabet::{sample_label, PlateAlphabet};
use crate::augment::{random_chain, AugmentPolicy};
use crate::error::Result;
use crate::image::ImageBuffer;
use crate::render::{render_plate, RenderSpec};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRate {
    pub chains: u64,
    pub seconds: f64,
}

impl ChainRate {
    pub fn per_second(&self) -> f64 {
        self.chains as f64 / self.seconds
    }
}

/// `count` standard 440×140 renders with seeds `0..count`.
pub fn sample_plates(count: u64) -> Result<Vec<ImageBuffer>> {
    let spec = RenderSpec::standard();
    (0..count)
        .map(|s| render_plate(&sample_label(s, &PlateAlphabet), &spec, s))
        .collect()
}

/// Time `n` random chains cycling over `plates` on the calling thread.
pub fn chain_rate(plates: &[ImageBuffer], n: u64, policy: &AugmentPolicy) -> Result<ChainRate> {
    assert!(!plates.is_empty());
    let start = Instant::now();
    for i in 0..n {
        let img = &plates[i as usize % plates.len()];
        std::hint::black_box(random_chain(img, seed::mix64(1, i), policy)?);
    }
    Ok(ChainRate {
        chains: n,
        seconds: start.elapsed().as_secs_f64(),
    })
}
