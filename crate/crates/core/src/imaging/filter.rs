//! Separable Gaussian smoothing.

use super::image::{check_dims, BinaryMask, GrayImage};
use crate::error::{Error, Result};

/// Normalized 1-D Gaussian taps with radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    Ok(taps)
}

fn convolve_rows(src: &[f64], w: usize, h: usize, taps: &[f64]) -> Vec<f64> {
    let r = (taps.len() / 2) as isize;
    let mut out = vec![0.0; src.len()];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                let xx = (x as isize + k as isize - r).clamp(0, w as isize - 1) as usize;
                acc += t * row[xx];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

fn convolve_cols(src: &[f64], w: usize, h: usize, taps: &[f64]) -> Vec<f64> {
    let r = (taps.len() / 2) as isize;
    let mut out = vec![0.0; src.len()];
    for y in 0..h {
        for (k, t) in taps.iter().enumerate() {
            let yy = (y as isize + k as isize - r).clamp(0, h as isize - 1) as usize;
            let src_row = &src[yy * w..(yy + 1) * w];
            let dst_row = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst_row.iter_mut().zip(src_row) {
                *d += t * s;
            }
        }
    }
    out
}

fn separable(src: &[f64], w: usize, h: usize, taps: &[f64]) -> Vec<f64> {
    convolve_cols(&convolve_rows(src, w, h, taps), w, h, taps)
}

/// Gaussian blur with edge replication; output clamped to `[0, 1]`.
pub fn gaussian_smooth(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    let taps = gaussian_kernel(sigma)?;
    let (w, h) = img.dims();
    Ok(GrayImage::from_clamped(w, h, separable(img.data(), w, h, &taps)))
}

/// Gaussian blur restricted to a region (normalized convolution).
///
/// Inside `region` each output pixel is the Gaussian-weighted mean of the
/// region pixels around it, so the zero background outside the region does
/// not bleed into it. Pixels outside the region are 0.
pub fn masked_gaussian_smooth(
    img: &GrayImage,
    region: &BinaryMask,
    sigma: f64,
) -> Result<GrayImage> {
    check_dims(img.dims(), region.dims())?;
    let taps = gaussian_kernel(sigma)?;
    let (w, h) = img.dims();
    let weights: Vec<f64> = region.bits().iter().map(|&b| f64::from(u8::from(b))).collect();
    let values: Vec<f64> = img
        .data()
        .iter()
        .zip(&weights)
        .map(|(v, m)| v * m)
        .collect();
    let num = separable(&values, w, h, &taps);
    let den = separable(&weights, w, h, &taps);
    let data = region
        .bits()
        .iter()
        .enumerate()
        .map(|(i, &inside)| {
            if inside && den[i] > 0.0 {
                num[i] / den[i]
            } else {
                0.0
            }
        })
        .collect();
    Ok(GrayImage::from_clamped(w, h, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_normalized_with_expected_radius() {
        let k = gaussian_kernel(1.0).unwrap();
        assert_eq!(k.len(), 7);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(gaussian_kernel(0.4).unwrap().len(), 5);
    }

    #[test]
    fn rejects_non_positive_sigma() {
        let img = GrayImage::filled(3, 3, 0.5).unwrap();
        assert!(matches!(gaussian_smooth(&img, 0.0), Err(Error::InvalidParameter(_))));
        assert!(gaussian_smooth(&img, -1.0).is_err());
        assert!(gaussian_smooth(&img, f64::NAN).is_err());
    }

    #[test]
    fn constant_image_is_preserved() {
        let img = GrayImage::filled(11, 7, 0.5).unwrap();
        let out = gaussian_smooth(&img, 1.0).unwrap();
        assert!(out.data().iter().all(|v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn single_pixel_image_is_preserved() {
        let img = GrayImage::filled(1, 1, 0.37).unwrap();
        for sigma in [0.3, 1.0, 4.0] {
            let out = gaussian_smooth(&img, sigma).unwrap();
            assert!((out.get(0, 0) - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn impulse_matches_direct_2d_kernel() {
        let mut img = GrayImage::filled(9, 9, 0.0).unwrap();
        img.set(4, 4, 1.0);
        let out = gaussian_smooth(&img, 1.0).unwrap();
        // direct, non-separable evaluation of the 2-D kernel
        let mut direct = [[0.0f64; 7]; 7];
        let mut total = 0.0;
        for (j, row) in direct.iter_mut().enumerate() {
            for (i, cell) in row.iter_mut().enumerate() {
                let (dx, dy) = (i as f64 - 3.0, j as f64 - 3.0);
                *cell = (-(dx * dx + dy * dy) / 2.0).exp();
                total += *cell;
            }
        }
        for j in 0..7 {
            for i in 0..7 {
                assert!((out.get(i + 1, j + 1) - direct[j][i] / total).abs() < 1e-12);
            }
        }
        assert!((out.get(4, 4) - direct[3][3] / total).abs() < 1e-12);
        assert!((out.data().iter().sum::<f64>() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn masked_smooth_keeps_region_constant() {
        let img = GrayImage::from_fn(12, 12, |x, _| if x < 6 { 0.4 } else { 0.0 });
        let region = BinaryMask::from_fn(12, 12, |x, _| x < 6);
        let out = masked_gaussian_smooth(&img, &region, 1.0).unwrap();
        for y in 0..12 {
            for x in 0..12 {
                let expect = if x < 6 { 0.4 } else { 0.0 };
                assert!((out.get(x, y) - expect).abs() < 1e-12);
            }
        }
    }
}
