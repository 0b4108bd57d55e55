//! Full random-chain augmentations per second on 440×140 renders, on one
//! thread.
//!
//! `cargo run --release -p plategen-core --example chain_throughput [N]`

use plategen::augment::AugmentPolicy;
use plategen::bench::{chain_rate, sample_plates};

fn main() -> plategen::Result<()> {
    let n: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000);
    let plates = sample_plates(16)?;
    for (name, policy) in [
        ("default", AugmentPolicy::default()),
        ("all-six", AugmentPolicy::all()),
    ] {
        let rate = chain_rate(&plates, n, &policy)?;
        println!(
            "{name:>8}: {n} chains in {:.3} s = {:.0} chains/s",
            rate.seconds,
            rate.per_second()
        );
    }
    Ok(())
}
