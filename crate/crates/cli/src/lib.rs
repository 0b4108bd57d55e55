//! `plategen` command-line tool.
//!
//! Exit codes: 0 success, 1 validation error (bad arguments, config or input
//! data), 2 runtime error (I/O). Errors go to stderr as
//! `error[validation]: ...` or `error[runtime]: ...`.

mod args;
mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::Parser;
use plategen::manifest::MANIFEST_FILE;
use plategen::metrics::read_predictions;
use plategen::render::RenderConfig;
use plategen::{
    assemble, batch_render, build_augmented_set, evaluate, ingest_real, seed, select_real, verify,
    AugmentPolicy, CorpusRecipe, Manifest, RenderSpec, Scalar, SourceTag,
};

use args::{AssembleArgs, AugmentArgs, Cli, Command, EvaluateArgs, RenderArgs, VerifyArgs};
pub use config::CliConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// A failed command, classified for the exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Runtime(String),
}

impl Failure {
    fn validation(msg: impl Into<String>) -> Self {
        Failure::Validation(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "error[validation]: {m}"),
            Failure::Runtime(m) => write!(f, "error[runtime]: {m}"),
        }
    }
}

impl From<plategen::Error> for Failure {
    fn from(e: plategen::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

/// Parse `argv` (including the program name), run the subcommand and return
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let rendered = e.render().to_string();
                    let msg = rendered.strip_prefix("error: ").unwrap_or(&rendered);
                    eprint!("{}", Failure::validation(msg));
                    EXIT_VALIDATION
                }
            };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult {
    let config = match &cli.config {
        Some(path) => CliConfig::load(path)?,
        None => CliConfig::default(),
    };
    let threads = cli.threads.or(config.threads);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::validation("--threads must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Render(a) => render(a, &config),
        Command::Augment(a) => augment(a, &config),
        Command::Assemble(a) => assemble_cmd(a, &config),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Verify(a) => verify_cmd(a),
    })
}

fn required<T>(value: Option<T>, what: &str) -> CliResult<T> {
    value.ok_or_else(|| Failure::validation(format!("missing {what}")))
}

fn existing(path: &Path, what: &str) -> CliResult<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::validation(format!(
            "{what} {} does not exist",
            path.display()
        )))
    }
}

/// A manifest is named by its file or by the directory holding it.
fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

fn read_manifest(path: &Path, what: &str) -> CliResult<Manifest> {
    let file = manifest_path(path);
    existing(&file, what)?;
    Ok(Manifest::read(&file)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    existing(path, what)?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(format!("read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("{what} {}: {e}", path.display())))
}

fn create_out(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| Failure::Runtime(format!("create {}: {e}", out.display())))
}

fn write_manifest(manifest: &Manifest, out: &Path) -> CliResult<()> {
    Ok(manifest.write(&out.join(MANIFEST_FILE))?)
}

fn render(a: RenderArgs, config: &CliConfig) -> CliResult {
    let count = required(a.count.or(config.render.count), "--count")?;
    let master_seed = required(a.seed.or(config.seeds.render), "--seed")?;
    let out = required(a.out.or_else(|| config.out.clone()), "--out")?;
    let render_config = RenderConfig {
        font_province: a.province_font.or_else(|| config.fonts.province.clone()),
        font_latin: a.latin_font.or_else(|| config.fonts.latin.clone()),
        ..RenderConfig::default()
    };
    for font in [&render_config.font_province, &render_config.font_latin]
        .into_iter()
        .flatten()
    {
        existing(font, "font")?;
    }
    let spec = RenderSpec::from_config(&render_config)?;
    spec.check_fonts()?;
    create_out(&out)?;
    let manifest = batch_render(count, master_seed, &spec, &out)?;
    write_manifest(&manifest, &out)?;
    println!("rendered {} plates into {}", manifest.len(), out.display());
    Ok(())
}

fn augment(a: AugmentArgs, config: &CliConfig) -> CliResult {
    let images = required(
        a.images.or_else(|| config.augment.images.clone()),
        "--images",
    )?;
    let labels = required(
        a.labels.or_else(|| config.augment.labels.clone()),
        "--labels",
    )?;
    let target = required(a.target.or(config.augment.target), "--target")?;
    let chain_seed = required(a.seed.or(config.seeds.augment), "--seed")?;
    let out = required(a.out.or_else(|| config.out.clone()), "--out")?;
    existing(&images, "image directory")?;
    existing(&labels, "labels file")?;
    let policy = match &a.policy {
        Some(p) => read_json::<AugmentPolicy>(p, "policy")?,
        None => config.policy.clone().unwrap_or_default(),
    };
    policy.validate()?;

    let mut real = ingest_real(&images, &labels)?;
    if let Some(n) = a.n_real.or(config.augment.n_real) {
        real.records = select_real(&real.records, n, seed::mix64(chain_seed, 0))?;
    }
    create_out(&out)?;
    let manifest = build_augmented_set(&real, target, &policy, seed::mix64(chain_seed, 1), &out)?;
    write_manifest(&manifest, &out)?;
    println!(
        "augmented {} real plates into {} images in {}",
        real.len(),
        manifest.len(),
        out.display()
    );
    Ok(())
}

fn parse_pool(spec: &str) -> CliResult<(SourceTag, PathBuf)> {
    let (tag, path) = spec
        .split_once('=')
        .ok_or_else(|| Failure::validation(format!("--pool {spec}: expected TAG=PATH")))?;
    let tag =
        SourceTag::from_str(tag).map_err(|e| Failure::validation(format!("--pool {spec}: {e}")))?;
    Ok((tag, PathBuf::from(path)))
}

fn assemble_cmd(a: AssembleArgs, config: &CliConfig) -> CliResult {
    let mut recipe: CorpusRecipe = match &a.recipe {
        Some(p) => read_json(p, "recipe")?,
        None => required(config.recipe, "--recipe")?,
    };
    recipe.invert_double |= a.invert_double;
    let assemble_seed = required(a.seed.or(config.seeds.assemble), "--seed")?;
    let out = required(a.out.or_else(|| config.out.clone()), "--out")?;

    let mut pool_paths = config.pools.clone();
    for spec in &a.pools {
        let (tag, path) = parse_pool(spec)?;
        pool_paths.insert(tag, path);
    }
    let mut pools = BTreeMap::new();
    for (tag, path) in pool_paths {
        pools.insert(tag, read_manifest(&path, &format!("{tag} pool"))?);
    }
    let manifest = assemble(&recipe, &pools, assemble_seed, &out)?;
    println!("assembled {} rows into {}", manifest.len(), out.display());
    for tag in SourceTag::ALL {
        let n = manifest.count(tag);
        if n > 0 {
            println!("  {tag}: {n}");
        }
    }
    Ok(())
}

fn evaluate_cmd(a: EvaluateArgs) -> CliResult {
    let manifest = read_manifest(&a.manifest, "manifest")?;
    existing(&a.predictions, "predictions file")?;
    let predictions = read_predictions(&a.predictions)?;
    let report = evaluate::<Scalar>(&manifest, &predictions)?;
    print!("{}", report.table(&a.method, &a.training_data));
    if let Some(out) = a.out {
        create_out(&out)?;
        let path = out.join("report.json");
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Failure::Runtime(format!("encode report: {e}")))?;
        fs::write(&path, json + "\n")
            .map_err(|e| Failure::Runtime(format!("write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn verify_cmd(a: VerifyArgs) -> CliResult {
    let manifest = read_manifest(&a.manifest, "manifest")?;
    let report = verify(&manifest);
    for problem in &report.problems {
        println!("{problem}");
    }
    if report.ok() {
        println!("ok: {} rows verified", report.checked);
        Ok(())
    } else {
        Err(Failure::validation(format!(
            "{} of {} rows failed verification",
            report.problems.len(),
            report.checked
        )))
    }
}
