//! JSON config file. Every field is optional; command-line flags win.
//! Relative paths are taken relative to the config file's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use plategen::{AugmentPolicy, CorpusRecipe, SourceTag};
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub fonts: Fonts,
    pub seeds: Seeds,
    pub render: RenderSection,
    pub augment: AugmentSection,
    pub recipe: Option<CorpusRecipe>,
    pub policy: Option<AugmentPolicy>,
    pub pools: BTreeMap<SourceTag, PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fonts {
    pub province: Option<PathBuf>,
    pub latin: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub render: Option<u64>,
    pub augment: Option<u64>,
    pub assemble: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSection {
    pub count: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub images: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub n_real: Option<usize>,
    pub target: Option<usize>,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::validation(format!("config {}: {e}", path.display())))?;
        let mut config: CliConfig = serde_json::from_str(&text)
            .map_err(|e| Failure::validation(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.rebase(base);
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out);
        fix(&mut self.fonts.province);
        fix(&mut self.fonts.latin);
        fix(&mut self.augment.images);
        fix(&mut self.augment.labels);
        for p in self.pools.values_mut() {
            *p = base.join(&*p);
        }
    }
}
