//! Normalized SSIM / PSNR / MSE over severities 0..=20 for one corruption kind.
//!
//!     cargo run --example severity_sweep -- [KIND]      (default: blur)

use nvsbench::corrupt::{apply_corruption, CorruptionKind, CorruptionSpec};
use nvsbench::harness::synthesize_image;
use nvsbench::metrics::{normalize, BuiltinMetric};

fn main() -> nvsbench::Result<()> {
    let kind: CorruptionKind = std::env::args().nth(1).as_deref().unwrap_or("blur").parse()?;
    let scene = synthesize_image(192, 192, 11);
    println!("{kind}\nsev   ssim    psnr    mse");
    for severity in 0..=20 {
        let img = apply_corruption(&scene, &CorruptionSpec::new(kind, severity, 5)?)?;
        let [ssim, psnr, mse] = [BuiltinMetric::Ssim, BuiltinMetric::Psnr, BuiltinMetric::Mse]
            .map(|m| m.score(&scene, &img).map(|raw| normalize(&raw).value()));
        println!("{severity:>3}  {:.4}  {:.4}  {:.4}", ssim?, psnr?, mse?);
    }
    Ok(())
}
