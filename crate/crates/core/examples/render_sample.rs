//! Render one plate per seed into the given directory.

use std::path::PathBuf;

use plategen::augment::{random_chain, AugmentPolicy};
use plategen::{render_plate, sample_label, PlateAlphabet, RenderSpec};

fn main() -> plategen::Result<()> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| ".".into()).into();
    let spec = RenderSpec::standard();
    for seed in 0..4u64 {
        let label = sample_label(seed, &PlateAlphabet);
        let img = render_plate(&label, &spec, seed)?;
        img.save_png(&out.join(format!("plate-{seed}.png")))?;
        let (aug, _) = random_chain(&img, seed, &AugmentPolicy::all())?;
        aug.save_png(&out.join(format!("plate-{seed}-aug.png")))?;
        println!("{seed}: {label}");
    }
    Ok(())
}
