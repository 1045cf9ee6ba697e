//! Talks to an external metric provider over the jsonl-v1 protocol.
//!
//!     cargo run --example external_provider -- [PROVIDER ARGV...]
//!
//! Defaults to the mock provider shipped with the tests, which always
//! answers 0.5.

use nvsbench::harness::synthesize_image;
use nvsbench::image::save_image;
use nvsbench::metrics::{normalize, provider_open};

fn main() -> nvsbench::Result<()> {
    let mut argv: Vec<String> = std::env::args().skip(1).collect();
    if argv.is_empty() {
        argv = vec![
            "python3".into(),
            concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/mock_provider.py").into(),
        ];
    }
    let dir = tempfile::tempdir().map_err(|e| nvsbench::Error::Io {
        path: std::env::temp_dir(),
        source: e,
    })?;
    let reference = dir.path().join("ref.png");
    save_image(&synthesize_image(96, 96, 1), &reference)?;

    let mut session = provider_open(&argv)?;
    let d = session.descriptor().clone();
    println!(
        "provider `{}`: {:?}, raw range {:?}",
        d.name, d.orientation, d.raw_range
    );
    for seed in 1..=3 {
        let test = dir.path().join(format!("test_{seed}.png"));
        save_image(&synthesize_image(96, 96, seed), &test)?;
        let raw = session.score(&reference, &test)?;
        println!(
            "scene {seed}: raw {:.4} normalized {:.4}",
            raw.value,
            normalize(&raw).value()
        );
    }
    session.close()?;
    Ok(())
}
