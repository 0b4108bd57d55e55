//! Corpus manifests: one JSON object per line, image paths relative to the
//! manifest's directory.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alphabet::PlateLabel;
use crate::augment::TransformLog;
use crate::error::{Error, Result};
use crate::image::ImageBuffer;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTag {
    Script,
    Cyclewgan,
    CyclewganGp,
    AugmentedReal,
    Real,
}

impl SourceTag {
    pub const ALL: [SourceTag; 5] = [
        SourceTag::Script,
        SourceTag::Cyclewgan,
        SourceTag::CyclewganGp,
        SourceTag::AugmentedReal,
        SourceTag::Real,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SourceTag::Script => "script",
            SourceTag::Cyclewgan => "cyclewgan",
            SourceTag::CyclewganGp => "cyclewgan_gp",
            SourceTag::AugmentedReal => "augmented_real",
            SourceTag::Real => "real",
        }
    }
}

impl fmt::Display for SourceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SourceTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown source tag {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub id: String,
    /// Relative to the directory holding the manifest, `/`-separated.
    pub path: String,
    pub label: PlateLabel,
    pub source: SourceTag,
    pub seed: u64,
    #[serde(default)]
    pub transforms: TransformLog,
    #[serde(default)]
    pub inverted: bool,
    /// Id of the record this one was derived from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

impl ManifestRecord {
    pub fn new(
        id: impl Into<String>,
        path: impl Into<String>,
        label: PlateLabel,
        source: SourceTag,
        seed: u64,
    ) -> Self {
        Self {
            id: id.into(),
            path: path.into(),
            label,
            source,
            seed,
            transforms: TransformLog::default(),
            inverted: false,
            origin: None,
        }
    }
}

/// Records plus the directory their paths are relative to.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub root: PathBuf,
    pub records: Vec<ManifestRecord>,
}

impl Manifest {
    pub fn new(root: impl Into<PathBuf>, records: Vec<ManifestRecord>) -> Self {
        Self {
            root: root.into(),
            records,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn resolve(&self, record: &ManifestRecord) -> PathBuf {
        self.root.join(&record.path)
    }

    pub fn load_image(&self, record: &ManifestRecord) -> Result<ImageBuffer> {
        ImageBuffer::load(&self.resolve(record))
    }

    pub fn count(&self, tag: SourceTag) -> usize {
        self.records.iter().filter(|r| r.source == tag).count()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse_jsonl(root: impl Into<PathBuf>, text: &str, origin: &Path) -> Result<Self> {
        let mut records = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record = serde_json::from_str(line).map_err(|e| Error::ManifestParse {
                path: origin.to_path_buf(),
                line: n + 1,
                reason: e.to_string(),
            })?;
            records.push(record);
        }
        Ok(Self::new(root, records))
    }

    /// Read a JSONL manifest; its parent directory becomes the root.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::io(format!("read {}", path.display()), e))?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse_jsonl(root, &text, path)
    }

    /// Write to `path` via a temporary file and rename.
    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("jsonl.tmp");
        let ctx = |e| Error::io(format!("write {}", path.display()), e);
        {
            let mut f = fs::File::create(&tmp).map_err(ctx)?;
            f.write_all(self.to_jsonl().as_bytes()).map_err(ctx)?;
            f.sync_all().map_err(ctx)?;
        }
        fs::rename(&tmp, path).map_err(ctx)
    }
}

/// Outcome of checking a manifest's references.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    pub problems: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Check that every row's image exists and decodes, ids are unique, and
/// inverted rows are grayscale.
pub fn verify(manifest: &Manifest) -> VerifyReport {
    use rayon::prelude::*;
    use std::collections::HashSet;

    let mut problems = Vec::new();
    let mut seen = HashSet::new();
    for r in &manifest.records {
        if !seen.insert(r.id.as_str()) {
            problems.push(format!("{}: duplicate id", r.id));
        }
    }
    let per_row: Vec<Option<String>> = manifest
        .records
        .par_iter()
        .map(|r| match manifest.load_image(r) {
            Err(e) => Some(format!("{}: {e}", r.id)),
            Ok(img) if r.inverted && img.channels() != 1 => {
                Some(format!("{}: inverted row is not grayscale", r.id))
            }
            Ok(_) => None,
        })
        .collect();
    problems.extend(per_row.into_iter().flatten());
    VerifyReport {
        checked: manifest.len(),
        problems,
    }
}
