//! How far do a few cropped border pixels move each metric?

use nvsbench::corrupt::crop_and_rescale;
use nvsbench::harness::{median, synthesize_image};
use nvsbench::metrics::{normalize, BuiltinMetric};

fn main() -> nvsbench::Result<()> {
    let scenes: Vec<_> = (0..16).map(|seed| synthesize_image(128, 128, seed)).collect();
    println!("crop   ssim    psnr    mse   (median of {} scenes)", scenes.len());
    for pixels in [0, 1, 2, 5, 10] {
        let mut cols = [Vec::new(), Vec::new(), Vec::new()];
        for scene in &scenes {
            let cropped = crop_and_rescale(scene, pixels)?;
            for (col, metric) in cols
                .iter_mut()
                .zip([BuiltinMetric::Ssim, BuiltinMetric::Psnr, BuiltinMetric::Mse])
            {
                col.push(normalize(&metric.score(scene, &cropped)?).value());
            }
        }
        let [s, p, m] = cols.map(|mut c| median(&mut c).unwrap_or(f64::NAN));
        println!("{pixels:>4}  {s:.4}  {p:.4}  {m:.4}");
    }
    Ok(())
}
