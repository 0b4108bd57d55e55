//! Real-plate ingestion, augmentation expansion and mixed-corpus assembly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::PlateLabel;
use crate::augment::{invert, random_chain, resize_to_input, AugmentPolicy};
use crate::error::{Error, LineError, Result};
use crate::image::ImageBuffer;
use crate::manifest::{Manifest, ManifestRecord, SourceTag, MANIFEST_FILE};
use crate::seed;

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("create {}", dir.display()), e))
}

/// Read a `relative_path<TAB>label` file describing labelled real plates.
///
/// Every malformed line is reported, not just the first. Image files are
/// not opened here; `verify` checks them.
pub fn ingest_real(image_dir: &Path, labels_file: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(labels_file)
        .map_err(|e| Error::io(format!("read {}", labels_file.display()), e))?;
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let Some((path, label)) = raw.split_once('\t') else {
            errors.push(LineError {
                line,
                message: "expected relative_path<TAB>label".into(),
            });
            continue;
        };
        let path = path.trim();
        if path.is_empty() || Path::new(path).is_absolute() {
            errors.push(LineError {
                line,
                message: format!("path {path:?} must be non-empty and relative"),
            });
            continue;
        }
        match PlateLabel::parse(label.trim()) {
            Ok(label) => {
                let id = format!("real-{:06}", records.len());
                records.push(ManifestRecord::new(
                    id,
                    path.replace('\\', "/"),
                    label,
                    SourceTag::Real,
                    0,
                ));
            }
            Err(e) => errors.push(LineError {
                line,
                message: e.to_string(),
            }),
        }
    }
    if !errors.is_empty() {
        return Err(Error::LabelParse {
            path: labels_file.to_path_buf(),
            errors,
        });
    }
    Ok(Manifest::new(image_dir, records))
}

/// Seeded uniform sample of `n` records without replacement, in sampled
/// order.
pub fn select_real(
    records: &[ManifestRecord],
    n: usize,
    sample_seed: u64,
) -> Result<Vec<ManifestRecord>> {
    if n > records.len() {
        return Err(Error::NotEnoughRecords {
            requested: n,
            available: records.len(),
        });
    }
    let mut idx: Vec<usize> = (0..records.len()).collect();
    let mut rng = seed::rng(sample_seed);
    let (chosen, _) = idx.partial_shuffle(&mut rng, n);
    Ok(chosen.iter().map(|&i| records[i].clone()).collect())
}

pub fn augmented_id(index: usize) -> String {
    format!("aug-{index:06}")
}

/// Expand `real` to exactly `target_count` augmented images.
///
/// Output `i` is drawn from source plate `i mod N` with chain seed
/// `mix64(chain_seed, i)`, so each source is used `⌊T/N⌋` or `⌈T/N⌉` times.
/// Images land in `out_dir/images/`.
pub fn build_augmented_set(
    real: &Manifest,
    target_count: usize,
    policy: &AugmentPolicy,
    chain_seed: u64,
    out_dir: &Path,
) -> Result<Manifest> {
    policy.validate()?;
    if target_count == 0 {
        return Ok(Manifest::new(out_dir, Vec::new()));
    }
    if real.is_empty() {
        return Err(Error::NotEnoughRecords {
            requested: 1,
            available: 0,
        });
    }
    let images = out_dir.join("images");
    create_dir(&images)?;
    let n = real.len();
    // One task per source plate so each image is decoded once.
    let per_source: Vec<Vec<(usize, ManifestRecord)>> = real
        .records
        .par_iter()
        .enumerate()
        .map(|(j, src)| {
            if j >= target_count {
                return Ok(Vec::new());
            }
            let img = real.load_image(src)?;
            (j..target_count)
                .step_by(n)
                .map(|i| {
                    let s = seed::mix64(chain_seed, i as u64);
                    let (out, log) = random_chain(&img, s, policy)?;
                    let id = augmented_id(i);
                    let rel = format!("images/{id}.png");
                    out.save_png(&out_dir.join(&rel))?;
                    let mut rec = ManifestRecord::new(
                        id,
                        rel,
                        src.label.clone(),
                        SourceTag::AugmentedReal,
                        s,
                    );
                    rec.transforms = log;
                    rec.origin = Some(src.id.clone());
                    Ok((i, rec))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<(usize, ManifestRecord)> = per_source.into_iter().flatten().collect();
    records.sort_by_key(|(i, _)| *i);
    Ok(Manifest::new(
        out_dir,
        records.into_iter().map(|(_, r)| r).collect(),
    ))
}

/// Per-source image counts of a mixed training set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusRecipe {
    pub count_script: usize,
    pub count_cyclewgan: usize,
    pub count_cyclewgan_gp: usize,
    pub count_augmented: usize,
    /// Number of distinct real plates the augmented part is drawn from.
    /// Informational; the augmented pool is built beforehand.
    pub n_real: usize,
    pub invert_double: bool,
}

impl CorpusRecipe {
    /// The four-part mix at `1/divisor` of the 40k/40k/40k/80k scale.
    pub fn mixed(divisor: usize, n_real: usize, invert_double: bool) -> Self {
        Self {
            count_script: 40_000 / divisor,
            count_cyclewgan: 40_000 / divisor,
            count_cyclewgan_gp: 40_000 / divisor,
            count_augmented: 80_000 / divisor,
            n_real,
            invert_double,
        }
    }

    /// `(tag, count)` in assembly order.
    pub fn parts(&self) -> [(SourceTag, usize); 4] {
        [
            (SourceTag::Script, self.count_script),
            (SourceTag::Cyclewgan, self.count_cyclewgan),
            (SourceTag::CyclewganGp, self.count_cyclewgan_gp),
            (SourceTag::AugmentedReal, self.count_augmented),
        ]
    }

    pub fn total(&self) -> usize {
        self.parts().iter().map(|(_, c)| c).sum()
    }

    pub fn final_rows(&self) -> usize {
        if self.invert_double {
            2 * self.total()
        } else {
            self.total()
        }
    }
}

/// Build a network-ready corpus in `out_dir`: draw the recipe's per-tag
/// counts from `pools`, convert each image to 136×36 grayscale, shuffle rows
/// with `assemble_seed`, optionally append inverted copies, and write
/// `out_dir/manifest.jsonl`.
pub fn assemble(
    recipe: &CorpusRecipe,
    pools: &BTreeMap<SourceTag, Manifest>,
    assemble_seed: u64,
    out_dir: &Path,
) -> Result<Manifest> {
    // Check every pool before touching the filesystem.
    for (tag, count) in recipe.parts() {
        let available = pools.get(&tag).map_or(0, |p| p.len());
        if count > available {
            return Err(Error::PoolTooSmall {
                tag,
                requested: count,
                available,
            });
        }
    }
    let images = out_dir.join("images");
    create_dir(&images)?;

    let mut drawn: Vec<(&Manifest, ManifestRecord)> = Vec::with_capacity(recipe.total());
    for (slot, (tag, count)) in recipe.parts().into_iter().enumerate() {
        if count == 0 {
            continue;
        }
        let pool = &pools[&tag];
        let picked = select_real(
            &pool.records,
            count,
            seed::mix64(assemble_seed, slot as u64),
        )?;
        drawn.extend(picked.into_iter().map(|r| (pool, r)));
    }
    let mut rng = seed::rng(seed::mix64(assemble_seed, u64::MAX));
    drawn.shuffle(&mut rng);

    let records = drawn
        .par_iter()
        .enumerate()
        .map(|(row, (pool, src))| {
            let img = resize_to_input(&pool.load_image(src)?);
            let id = format!("{}-{row:06}", src.source);
            let rel = format!("images/{id}.png");
            img.save_png(&out_dir.join(&rel))?;
            let mut rec = src.clone();
            rec.id = id;
            rec.path = rel;
            rec.origin = Some(src.id.clone());
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut manifest = Manifest::new(out_dir, records);
    if recipe.invert_double {
        manifest = expand_with_inversion(&manifest)?;
    }
    manifest.write(&out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

fn inverted_path(path: &str) -> String {
    match path.strip_suffix(".png") {
        Some(stem) => format!("{stem}~inv.png"),
        None => format!("{path}~inv.png"),
    }
}

/// Append an inverted copy of every row. Copies live next to their source
/// image with a `~inv` suffix and flip the `inverted` flag.
pub fn expand_with_inversion(manifest: &Manifest) -> Result<Manifest> {
    let copies = manifest
        .records
        .par_iter()
        .map(|r| {
            let img = manifest.load_image(r)?;
            img.require_channels(1)?;
            let inv: ImageBuffer = invert(&img)?;
            let mut rec = r.clone();
            rec.id = format!("{}~inv", r.id);
            rec.path = inverted_path(&r.path);
            rec.inverted = !r.inverted;
            rec.origin = Some(r.id.clone());
            inv.save_png(&manifest.root.join(&rec.path))?;
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records = manifest.records.clone();
    records.extend(copies);
    Ok(Manifest::new(manifest.root.clone(), records))
}
