//! Writes every corruption kind at a few severities for one synthetic scene.
//!
//!     cargo run --example corrupt_gallery -- [OUT_DIR]

use std::path::PathBuf;

use nvsbench::corrupt::{apply_corruption, CorruptionKind, CorruptionSpec};
use nvsbench::harness::synthesize_image;
use nvsbench::image::save_image;

fn main() -> nvsbench::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "gallery".into());
    std::fs::create_dir_all(&out).map_err(|e| nvsbench::Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let scene = synthesize_image(256, 192, 42);
    save_image(&scene, out.join("original.png"))?;

    for kind in CorruptionKind::ALL {
        for severity in [5, 10, 20] {
            let img = apply_corruption(&scene, &CorruptionSpec::new(kind, severity, 42)?)?;
            save_image(&img, out.join(format!("{kind}_s{severity:02}.png")))?;
        }
    }
    println!(
        "wrote {} images to {}",
        1 + CorruptionKind::ALL.len() * 3,
        out.display()
    );
    Ok(())
}
