mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use common::checks::{self, fake_pools, noise_image};
use plategen::augment::{to_gray, AugmentPolicy};
use plategen::{
    assemble, build_augmented_set, expand_with_inversion, ingest_real, select_real, CorpusRecipe,
    Error, Manifest, ManifestRecord, PlateAlphabet, SourceTag,
};

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut acc = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                acc.insert(
                    path.strip_prefix(root).unwrap().to_path_buf(),
                    fs::read(&path).unwrap(),
                );
            }
        }
    }
    acc
}

/// `n` small noise plates on disk with sampled labels, as a real pool.
fn tiny_real_pool(dir: &Path, n: usize) -> Manifest {
    fs::create_dir_all(dir.join("images")).unwrap();
    let records = (0..n)
        .map(|i| {
            let rel = format!("images/r{i}.png");
            noise_image(12, 6, 3, i as u64)
                .save_png(&dir.join(&rel))
                .unwrap();
            ManifestRecord::new(
                format!("real-{i:06}"),
                rel,
                plategen::sample_label(i as u64, &PlateAlphabet),
                SourceTag::Real,
                0,
            )
        })
        .collect();
    Manifest::new(dir, records)
}

#[test]
fn recipe_with_inversion_has_exact_counts() {
    let scratch = tempfile::tempdir().unwrap();
    checks::recipe_counts_exact(scratch.path()).unwrap();
}

#[test]
fn recipe_without_inversion_has_exact_counts() {
    let scratch = tempfile::tempdir().unwrap();
    let pools = fake_pools(
        scratch.path(),
        &[
            (SourceTag::Script, 400),
            (SourceTag::Cyclewgan, 400),
            (SourceTag::CyclewganGp, 400),
            (SourceTag::AugmentedReal, 800),
        ],
    );
    let recipe = CorpusRecipe::mixed(100, 300, false);
    let m = assemble(&recipe, &pools, 1, &scratch.path().join("c")).unwrap();
    assert_eq!(m.len(), 2000);
    assert_eq!(m.count(SourceTag::AugmentedReal), 800);
    assert!(m.records.iter().all(|r| !r.inverted));
    // Every pool row is used exactly once when counts equal pool sizes.
    let mut origins: Vec<&str> = m
        .records
        .iter()
        .map(|r| r.origin.as_deref().unwrap())
        .collect();
    origins.sort_unstable();
    origins.dedup();
    assert_eq!(origins.len(), 2000);
}

#[test]
fn assembly_is_deterministic_and_thread_independent() {
    let scratch = tempfile::tempdir().unwrap();
    let pools = fake_pools(
        &scratch.path().join("pools"),
        &[(SourceTag::Script, 60), (SourceTag::AugmentedReal, 60)],
    );
    let recipe = CorpusRecipe {
        count_script: 25,
        count_augmented: 40,
        invert_double: true,
        ..CorpusRecipe::default()
    };
    let run = |name: &str, threads: usize| {
        let out = scratch.path().join(name);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| assemble(&recipe, &pools, 31, &out).unwrap());
        tree(&out)
    };
    let one = run("a", 1);
    assert_eq!(one, run("b", 4));
    assert_ne!(one, {
        let out = scratch.path().join("c");
        assemble(&recipe, &pools, 32, &out).unwrap();
        tree(&out)
    });
}

#[test]
fn pool_shortfall_names_the_tag_and_writes_nothing() {
    let scratch = tempfile::tempdir().unwrap();
    let pools = fake_pools(&scratch.path().join("pools"), &[(SourceTag::Script, 10)]);
    let recipe = CorpusRecipe {
        count_script: 5,
        count_cyclewgan_gp: 1,
        ..CorpusRecipe::default()
    };
    let out = scratch.path().join("out");
    let err = assemble(&recipe, &pools, 0, &out).unwrap_err();
    assert!(matches!(
        err,
        Error::PoolTooSmall {
            tag: SourceTag::CyclewganGp,
            requested: 1,
            available: 0
        }
    ));
    assert!(err.to_string().contains("cyclewgan_gp"));
    assert!(!out.exists());
}

#[test]
fn zero_recipe_gives_empty_manifest() {
    let scratch = tempfile::tempdir().unwrap();
    let m = assemble(
        &CorpusRecipe::default(),
        &BTreeMap::new(),
        0,
        scratch.path(),
    )
    .unwrap();
    assert!(m.is_empty());
    assert_eq!(
        fs::read_to_string(scratch.path().join("manifest.jsonl")).unwrap(),
        ""
    );
}

#[test]
fn augmented_set_uses_sources_round_robin() {
    let scratch = tempfile::tempdir().unwrap();
    let real = tiny_real_pool(&scratch.path().join("real"), 300);
    let out = scratch.path().join("aug");
    let target = 8_000;
    let m = build_augmented_set(&real, target, &AugmentPolicy::default(), 5, &out).unwrap();
    assert_eq!(m.len(), target);
    let mut uses: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, r) in m.records.iter().enumerate() {
        let origin = r.origin.as_deref().unwrap();
        assert_eq!(origin, real.records[i % 300].id);
        assert_eq!(r.label, real.records[i % 300].label);
        assert_eq!(r.source, SourceTag::AugmentedReal);
        *uses.entry(origin).or_default() += 1;
    }
    assert_eq!(uses.len(), 300);
    assert!(uses.values().all(|&u| u == 26 || u == 27));
    assert_eq!(uses.values().filter(|&&u| u == 27).count(), target % 300);
    // Every row replays from its source.
    for r in m.records.iter().step_by(397) {
        let src = real
            .records
            .iter()
            .find(|s| Some(&s.id) == r.origin.as_ref())
            .unwrap();
        let replayed = r.transforms.replay(&real.load_image(src).unwrap()).unwrap();
        assert_eq!(replayed, m.load_image(r).unwrap());
    }
}

#[test]
fn inversion_twice_quadruples_and_restores_originals() {
    let scratch = tempfile::tempdir().unwrap();
    let dir = scratch.path();
    fs::create_dir_all(dir.join("images")).unwrap();
    let records: Vec<ManifestRecord> = (0..10)
        .map(|i| {
            let rel = format!("images/g{i}.png");
            to_gray(&noise_image(16, 8, 3, i))
                .unwrap()
                .save_png(&dir.join(&rel))
                .unwrap();
            ManifestRecord::new(
                format!("g{i}"),
                rel,
                plategen::sample_label(i, &PlateAlphabet),
                SourceTag::Script,
                i,
            )
        })
        .collect();
    let m = Manifest::new(dir, records);
    let once = expand_with_inversion(&m).unwrap();
    assert_eq!(once.len(), 20);
    assert_eq!(once.records.iter().filter(|r| r.inverted).count(), 10);
    let twice = expand_with_inversion(&once).unwrap();
    assert_eq!(twice.len(), 40);
    for r in &twice.records {
        let src = m.records.iter().find(|s| r.id.starts_with(&s.id)).unwrap();
        assert_eq!(r.label, src.label);
        let flips = r.id.matches("~inv").count();
        assert_eq!(r.inverted, flips % 2 == 1);
        if flips % 2 == 0 {
            assert_eq!(
                twice.load_image(r).unwrap(),
                m.load_image(src).unwrap(),
                "{}",
                r.id
            );
        }
    }
}

#[test]
fn inversion_requires_gray_images() {
    let scratch = tempfile::tempdir().unwrap();
    let real = tiny_real_pool(scratch.path(), 2);
    assert!(matches!(
        expand_with_inversion(&real),
        Err(Error::WrongChannelCount {
            expected: 1,
            actual: 3
        })
    ));
}

#[test]
fn ingest_then_select_is_seeded() {
    let scratch = tempfile::tempdir().unwrap();
    let real = tiny_real_pool(scratch.path(), 50);
    let tsv: String = real
        .records
        .iter()
        .map(|r| format!("{}\t{}\n", r.path, r.label))
        .collect();
    fs::write(scratch.path().join("labels.tsv"), tsv).unwrap();
    let ingested = ingest_real(scratch.path(), &scratch.path().join("labels.tsv")).unwrap();
    assert_eq!(ingested.len(), 50);
    assert!(plategen::verify(&ingested).ok());
    let labels: Vec<_> = ingested.records.iter().map(|r| &r.label).collect();
    assert_eq!(
        labels,
        real.records.iter().map(|r| &r.label).collect::<Vec<_>>()
    );

    let a = select_real(&ingested.records, 20, 9).unwrap();
    assert_eq!(a, select_real(&ingested.records, 20, 9).unwrap());
    assert_ne!(a, select_real(&ingested.records, 20, 10).unwrap());
    let mut ids: Vec<_> = a.iter().map(|r| &r.id).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), 20);
    assert!(matches!(
        select_real(&ingested.records, 51, 0),
        Err(Error::NotEnoughRecords {
            requested: 51,
            available: 50
        })
    ));
}
