//! Scores two image files with every builtin metric.
//!
//!     cargo run --example score_pair -- REF.png TEST.png
//!
//! Without arguments a synthetic scene is compared to a noisy copy of itself.

use nvsbench::corrupt::{apply_corruption, CorruptionKind, CorruptionSpec};
use nvsbench::harness::synthesize_image;
use nvsbench::image::load_image;
use nvsbench::metrics::{normalize, BuiltinMetric};

fn main() -> nvsbench::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (reference, test) = match args.as_slice() {
        [a, b] => (load_image(a)?, load_image(b)?),
        _ => {
            let scene = synthesize_image(128, 128, 3);
            let noisy = apply_corruption(&scene, &CorruptionSpec::new(CorruptionKind::GaussianNoise, 6, 1)?)?;
            (scene, noisy)
        }
    };
    println!("{:<6} {:>12} {:>12}", "metric", "raw", "normalized");
    for metric in BuiltinMetric::ALL {
        let raw = metric.score(&reference, &test)?;
        println!("{:<6} {:>12.6} {:>12.6}", metric, raw.value, normalize(&raw).value());
    }
    Ok(())
}
