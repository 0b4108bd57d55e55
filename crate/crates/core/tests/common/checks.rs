//! Whole-system checks shared by the integration tests and the acceptance
//! target. Each returns a one-line summary on success and the first
//! counterexample on failure.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use plategen::augment::{
    affine, degrade, invert, morphology, motion_blur, stretch, uneven_light, AugmentPolicy,
    MorphMode,
};
use plategen::bench;
use plategen::{
    assemble, sample_label, seed, verify, CorpusRecipe, ImageBuffer, LineKernel, Manifest,
    ManifestRecord, MatchCounts, PlateAlphabet, SourceTag, TransformLog,
};

use super::oracle;

pub type Check = Result<String, String>;

/// Deterministic noise image without an RNG dependency.
pub fn noise_image(w: usize, h: usize, channels: u8, image_seed: u64) -> ImageBuffer {
    let samples = (0..w * h * channels as usize)
        .map(|i| (seed::mix64(image_seed, i as u64) >> 56) as u8)
        .collect();
    ImageBuffer::new(w, h, channels, samples).unwrap()
}

/// Uniform draw from `0..n` for trial `i` of stream `s`.
fn pick(s: u64, i: u64, n: u64) -> u64 {
    seed::mix64(s, i) % n
}

pub fn blur_kernels_normalized() -> Check {
    let mut worst = 0.0f64;
    for length in [1usize, 3, 5, 7, 9] {
        for tenth_deg in 0..3600 {
            let angle = (tenth_deg as f64 / 10.0).to_radians();
            let k: LineKernel = plategen::augment::sample::line_kernel(length, angle);
            let k32 = plategen::augment::sample::line_kernel::<f32>(length, angle as f32);
            let err = (k.sum() - 1.0).abs().max((k32.sum() as f64 - 1.0).abs());
            if err > 1e-6 {
                return Err(format!(
                    "length {length}, angle {angle}: |sum - 1| = {err:e}"
                ));
            }
            worst = worst.max(err);
        }
    }
    Ok(format!("18000 kernels, max |sum - 1| = {worst:.1e}"))
}

pub fn erode_id_dilate_ordering() -> Check {
    for i in 0..100u64 {
        let w = 8 + pick(1, i, 60) as usize;
        let h = 6 + pick(2, i, 40) as usize;
        let ch = if i % 2 == 0 { 1 } else { 3 };
        let img = noise_image(w, h, ch, i);
        let size = [1, 3, 5, 7][pick(3, i, 4) as usize];
        let iterations = 1 + pick(4, i, 4) as u32;
        let lo = morphology(&img, MorphMode::Erode, size, iterations).map_err(|e| e.to_string())?;
        let hi =
            morphology(&img, MorphMode::Dilate, size, iterations).map_err(|e| e.to_string())?;
        let ordered = lo
            .samples()
            .iter()
            .zip(img.samples())
            .zip(hi.samples())
            .all(|((l, v), d)| l <= v && v <= d);
        if !ordered {
            return Err(format!(
                "image {i} ({w}x{h}x{ch}, kernel {size} x{iterations})"
            ));
        }
    }
    Ok("100 random images".into())
}

pub fn invert_is_involution() -> Check {
    for i in 0..100u64 {
        let img = noise_image(
            1 + pick(5, i, 140) as usize,
            1 + pick(6, i, 40) as usize,
            1,
            i,
        );
        let once = invert(&img).map_err(|e| e.to_string())?;
        let twice = invert(&once).map_err(|e| e.to_string())?;
        let complemented = once
            .samples()
            .iter()
            .zip(img.samples())
            .all(|(a, b)| a + b == 255);
        if twice != img || !complemented {
            return Err(format!("image {i}"));
        }
    }
    Ok("100 random images".into())
}

pub fn identity_points_exact() -> Check {
    let mut images = bench::sample_plates(4).map_err(|e| e.to_string())?;
    images.push(noise_image(37, 23, 1, 5));
    images.push(noise_image(64, 20, 3, 6));
    for (n, img) in images.iter().enumerate() {
        let cases: [(&str, plategen::Result<ImageBuffer>); 7] = [
            ("affine", affine(img, 0.0, 0.0, 1.0, 0.0, 0.0)),
            ("motion_blur", motion_blur(img, 1, 0.7)),
            ("uneven_light", uneven_light(img, 1.0, 1.0, 2.1)),
            ("stretch", stretch(img, 1.0, 1.0)),
            ("erode", morphology(img, MorphMode::Erode, 1, 3)),
            ("dilate", morphology(img, MorphMode::Dilate, 1, 2)),
            ("degrade", degrade(img, 1.0, 0.0, 99)),
        ];
        for (op, out) in cases {
            if out.as_ref().ok() != Some(img) {
                return Err(format!("{op} identity changed image {n}"));
            }
        }
    }
    Ok("6 ops (both morphology modes) on 6 images".into())
}

pub fn transform_logs_replay() -> Check {
    let plates = bench::sample_plates(8).map_err(|e| e.to_string())?;
    let mut ops = 0;
    for (p, policy) in [AugmentPolicy::default(), AugmentPolicy::all()]
        .iter()
        .enumerate()
    {
        for i in 0..100u64 {
            let img = &plates[i as usize % plates.len()];
            let chain_seed = seed::mix64(p as u64, i);
            let (out, log) =
                plategen::random_chain(img, chain_seed, policy).map_err(|e| e.to_string())?;
            let json = serde_json::to_string(&log).map_err(|e| e.to_string())?;
            let parsed: TransformLog = serde_json::from_str(&json).map_err(|e| e.to_string())?;
            let replayed = parsed.replay(img).map_err(|e| e.to_string())?;
            if parsed != log || replayed != out {
                return Err(format!("chain seed {chain_seed}: replay differs"));
            }
            ops += log.len();
        }
    }
    Ok(format!("200 chains, {ops} logged ops"))
}

pub fn augmentation_invariants() -> Check {
    let parts = [
        ("blur kernels", blur_kernels_normalized()),
        ("erode <= id <= dilate", erode_id_dilate_ordering()),
        ("invert involution", invert_is_involution()),
        ("identity points", identity_points_exact()),
        ("log replay", transform_logs_replay()),
    ];
    let mut notes = Vec::new();
    for (name, result) in parts {
        match result {
            Ok(note) => notes.push(format!("{name}: {note}")),
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    Ok(notes.join("; "))
}

/// The crafted fixture against the brute-force oracle, then CRA >= RA on
/// 1,000 random fixtures.
pub fn metrics_match_oracle() -> Check {
    let want = oracle::scores(&oracle::FIXTURE);
    let got = MatchCounts::tally(&oracle::FIXTURE).map_err(|e| e.to_string())?;
    let pairs = [
        ("RA", want.ra, got.ra()),
        ("CRA", want.cra, got.cra()),
        ("CRA-C", want.cra_c, got.cra_c()),
        ("CRA-NC", want.cra_nc, got.cra_nc()),
    ];
    for (name, w, g) in pairs {
        if !w.same_as(*g.numer(), *g.denom()) {
            return Err(format!("{name}: oracle {}/{}, library {g}", w.0, w.1));
        }
    }
    let glyphs: Vec<char> = PlateAlphabet.glyphs().collect();
    for f in 0..1000u64 {
        let s = seed::mix64(77, f);
        let n = 1 + pick(s, 0, 25);
        let pairs: Vec<(String, String)> = (0..n)
            .map(|k| {
                let truth = sample_label(seed::mix64(s, k + 1), &PlateAlphabet).to_string();
                let mut pred: Vec<char> = truth.chars().collect();
                let r = seed::mix64(s, 1000 + k);
                match r % 5 {
                    0 => pred[(r >> 8) as usize % 7] = glyphs[(r >> 16) as usize % glyphs.len()],
                    1 => {
                        pred.remove((r >> 8) as usize % 7);
                    }
                    2 => pred.insert(
                        (r >> 8) as usize % 8,
                        glyphs[(r >> 16) as usize % glyphs.len()],
                    ),
                    _ => {}
                }
                (truth, pred.into_iter().collect())
            })
            .collect();
        let c = MatchCounts::tally(&pairs).map_err(|e| e.to_string())?;
        if c.cra() < c.ra() {
            return Err(format!(
                "random fixture {f}: CRA {} < RA {}",
                c.cra(),
                c.ra()
            ));
        }
    }
    Ok(format!(
        "fixture RA {}/{} CRA {}/{} CRA-C {}/{} CRA-NC {}/{}; CRA >= RA on 1000 random fixtures",
        want.ra.0,
        want.ra.1,
        want.cra.0,
        want.cra.1,
        want.cra_c.0,
        want.cra_c.1,
        want.cra_nc.0,
        want.cra_nc.1
    ))
}

/// In-memory pools of `count` records per tag, all pointing at a few
/// rendered plates saved under `dir`.
pub fn fake_pools(dir: &Path, counts: &[(SourceTag, usize)]) -> BTreeMap<SourceTag, Manifest> {
    let plates = bench::sample_plates(6).unwrap();
    std::fs::create_dir_all(dir.join("images")).unwrap();
    for (i, img) in plates.iter().enumerate() {
        img.save_png(&dir.join(format!("images/plate-{i}.png")))
            .unwrap();
    }
    counts
        .iter()
        .map(|&(tag, count)| {
            let records = (0..count)
                .map(|i| {
                    let plate = i % plates.len();
                    ManifestRecord::new(
                        format!("{tag}-src-{i:05}"),
                        format!("images/plate-{plate}.png"),
                        sample_label(plate as u64, &PlateAlphabet),
                        tag,
                        i as u64,
                    )
                })
                .collect();
            (tag, Manifest::new(dir, records))
        })
        .collect()
}

pub fn recipe_counts_exact(scratch: &Path) -> Check {
    let recipe = CorpusRecipe {
        count_script: 400,
        count_cyclewgan: 400,
        count_cyclewgan_gp: 400,
        count_augmented: 800,
        n_real: 300,
        invert_double: true,
    };
    let pools = fake_pools(
        &scratch.join("pools"),
        &[
            (SourceTag::Script, 500),
            (SourceTag::Cyclewgan, 450),
            (SourceTag::CyclewganGp, 400),
            (SourceTag::AugmentedReal, 900),
        ],
    );
    let out = scratch.join("corpus");
    let m = assemble(&recipe, &pools, 2024, &out).map_err(|e| e.to_string())?;
    let reread = Manifest::read(&out.join("manifest.jsonl")).map_err(|e| e.to_string())?;
    if reread.records != m.records {
        return Err("written manifest differs from returned one".into());
    }
    if m.len() != 4000 {
        return Err(format!("{} rows, expected 4000", m.len()));
    }
    for (tag, want) in [
        (SourceTag::Script, 800),
        (SourceTag::Cyclewgan, 800),
        (SourceTag::CyclewganGp, 800),
        (SourceTag::AugmentedReal, 1600),
    ] {
        if m.count(tag) != want {
            return Err(format!("{tag}: {} rows, expected {want}", m.count(tag)));
        }
    }
    let inverted = m.records.iter().filter(|r| r.inverted).count();
    if inverted * 2 != m.len() {
        return Err(format!("{inverted} of {} rows inverted", m.len()));
    }
    let ids: HashSet<&str> = m.records.iter().map(|r| r.id.as_str()).collect();
    if ids.len() != m.len() {
        return Err("duplicate ids".into());
    }
    let report = verify(&m);
    if !report.ok() {
        return Err(format!("verify: {}", report.problems[0]));
    }
    Ok("4000 rows: 800/800/800/1600 per tag, 2000 inverted, all rows verify".into())
}
