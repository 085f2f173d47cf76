//! Otsu thresholding, hyperbolization and morphology on a small synthetic
//! image.

use ctsev::imaging::{
    area_filter, connected_components, hyperbolize, open, otsu_threshold, top_hat, GrayImage,
    HyperbolizationParams, StructuringElement,
};

fn main() -> ctsev::Result<()> {
    let img = GrayImage::from_fn(64, 64, |x, y| {
        let blob = ((x as f64 - 20.0).powi(2) + (y as f64 - 30.0).powi(2)).sqrt() < 10.0;
        let line = x == 45;
        if line {
            0.9
        } else if blob {
            0.6
        } else {
            0.1 + 0.002 * y as f64
        }
    });
    let (t, fg) = otsu_threshold(&img)?;
    println!("otsu bin {t}, foreground {} px", fg.count());

    for c in [0.1, 0.5, 5.0] {
        let h = hyperbolize(&img, HyperbolizationParams::new(c)?);
        let mean = h.data().iter().sum::<f64>() / h.len() as f64;
        println!("hyperbolized with c={c}: mean {mean:.3}");
    }

    let se = StructuringElement::default();
    let opened = open(&fg, &se);
    let (_, stats) = connected_components(&opened);
    println!("after opening: {} components, {} px", stats.len(), opened.count());
    println!("after area filter 100: {} px", area_filter(&opened, 100).count());
    let th = top_hat(&img, &se);
    println!("top-hat peak on the line: {:.3}", th.get(45, 10));
    Ok(())
}
