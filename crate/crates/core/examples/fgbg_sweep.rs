//! Splats restricted to a centered foreground ellipse or to the background,
//! at growing mask coverage. Saves the masks and corrupted images as well.
//!
//!     cargo run --example fgbg_sweep -- [OUT_DIR]

use std::path::PathBuf;

use nvsbench::corrupt::{apply_masked_corruption, mask_coverage, CorruptionKind, CorruptionSpec};
use nvsbench::harness::{generate_synthetic_mask, synthesize_image};
use nvsbench::image::save_image;
use nvsbench::metrics::{normalize, BuiltinMetric};

fn main() -> nvsbench::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "fgbg".into());
    std::fs::create_dir_all(&out).map_err(|e| nvsbench::Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let scene = synthesize_image(200, 160, 8);
    let spec = CorruptionSpec::new(CorruptionKind::Splats, 8, 8)?;

    println!("coverage  region       measured  ssim    psnr");
    for coverage in [0.1, 0.25, 0.5, 0.75] {
        let fg = generate_synthetic_mask(200, 160, coverage, 8)?;
        let bg = generate_synthetic_mask(200, 160, 1.0 - coverage, 8)?.complement();
        for (region, mask) in [("foreground", fg), ("background", bg)] {
            let img = apply_masked_corruption(&scene, &mask, &spec)?;
            let ssim = normalize(&BuiltinMetric::Ssim.score(&scene, &img)?).value();
            let psnr = normalize(&BuiltinMetric::Psnr.score(&scene, &img)?).value();
            println!(
                "{coverage:>8.2}  {region:<11}  {:>8.3}  {ssim:.4}  {psnr:.4}",
                mask_coverage(&mask)
            );
            let stem = format!("{region}_{:03}", (coverage * 100.0) as u32);
            mask.save(out.join(format!("{stem}_mask.png")))?;
            save_image(&img, out.join(format!("{stem}.png")))?;
        }
    }
    Ok(())
}
