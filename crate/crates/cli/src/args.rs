use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Deterministic synthetic license-plate corpora: render, augment, assemble,
/// evaluate and verify.
#[derive(Debug, Parser)]
#[command(name = "plategen", version)]
pub struct Cli {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render labelled synthetic plates with a manifest.
    Render(RenderArgs),
    /// Expand real plates into an augmented set with transform logs.
    Augment(AugmentArgs),
    /// Assemble a mixed, network-ready training corpus from source pools.
    Assemble(AssembleArgs),
    /// Score recognizer predictions against a manifest.
    Evaluate(EvaluateArgs),
    /// Check that every manifest row resolves to a loadable image.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Number of plates to render.
    #[arg(long, value_name = "N")]
    pub count: Option<usize>,

    /// Master seed; required here or in the config.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output directory; receives images/ and manifest.jsonl.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Font for the province glyph (.hex, .ttf or .otf).
    #[arg(long, value_name = "FILE")]
    pub province_font: Option<PathBuf>,

    /// Font for letters and digits (.hex, .ttf or .otf).
    #[arg(long, value_name = "FILE")]
    pub latin_font: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Directory of real plate images referenced by --labels.
    #[arg(long, value_name = "DIR")]
    pub images: Option<PathBuf>,

    /// Tab-separated `relative_path<TAB>label` file.
    #[arg(long, value_name = "FILE")]
    pub labels: Option<PathBuf>,

    /// Use a seeded sample of this many real plates instead of all of them.
    #[arg(long, value_name = "N")]
    pub n_real: Option<usize>,

    /// Number of augmented images to produce.
    #[arg(long, value_name = "N")]
    pub target: Option<usize>,

    /// Augmentation policy as JSON (default: the built-in policy).
    #[arg(long, value_name = "FILE")]
    pub policy: Option<PathBuf>,

    /// Seed for plate selection and transform chains.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output directory; receives images/ and manifest.jsonl.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    /// Recipe as JSON with per-source counts.
    #[arg(long, value_name = "FILE")]
    pub recipe: Option<PathBuf>,

    /// Source pool as `tag=path`, where path is a manifest file or its
    /// directory. Tags: script, cyclewgan, cyclewgan_gp, augmented_real.
    /// Repeatable.
    #[arg(long = "pool", value_name = "TAG=PATH")]
    pub pools: Vec<String>,

    /// Append an inverted copy of every row.
    #[arg(long)]
    pub invert_double: bool,

    /// Seed for drawing and shuffling rows.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output directory; receives images/ and manifest.jsonl.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth manifest file or its directory.
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,

    /// Predictions as JSONL `{"id": ..., "prediction": ...}`.
    #[arg(long, value_name = "FILE")]
    pub predictions: PathBuf,

    /// Method name for the table row.
    #[arg(long, value_name = "NAME", default_value = "recognizer")]
    pub method: String,

    /// Training-data name for the table row.
    #[arg(long, value_name = "NAME", default_value = "-")]
    pub training_data: String,

    /// Also write report.json into this directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Manifest file or its directory.
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,
}
