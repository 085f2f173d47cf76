//! Global thresholding: Otsu's method and intensity band filters.

use super::histogram::{histogram, Histogram};
use super::image::{check_dims, intensity_bin, BinaryMask, GrayImage};
use crate::error::{Error, Result};

/// Outcome of Otsu's method on a 256-bin histogram.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OtsuResult {
    /// Largest bin of the lower class; pixels with a bin above it are foreground.
    pub threshold: usize,
    /// Between-class variance at `threshold`, in normalized intensity units.
    pub between_class_variance: f64,
}

/// Threshold maximizing the between-class variance. Ties resolve to the
/// smallest maximizing threshold.
pub fn otsu_from_histogram(hist: &Histogram) -> Result<OtsuResult> {
    let occupied = hist.iter().filter(|&&h| h > 0).count();
    if occupied < 2 {
        return Err(Error::DegenerateHistogram(format!(
            "otsu needs at least two occupied bins, found {occupied}"
        )));
    }
    let total: u64 = hist.iter().sum();
    let weighted: u64 = hist.iter().enumerate().map(|(b, &h)| b as u64 * h).sum();
    let (n, s) = (total as i128, weighted as i128);

    // Variance at t is proportional to d^2 / (n0 n1) with d = S n0 - N s0.
    // Candidates are compared as exact fractions so ties are real ties.
    let mut best: Option<(usize, u128, u128)> = None;
    let (mut n0, mut s0) = (0i128, 0i128);
    for (t, &h) in hist.iter().enumerate().take(255) {
        n0 += h as i128;
        s0 += t as i128 * h as i128;
        let n1 = n - n0;
        let (num, den) = if n0 == 0 || n1 == 0 {
            (0u128, 1u128)
        } else {
            let d = (s * n0 - n * s0).unsigned_abs();
            (d * d, (n0 * n1) as u128)
        };
        let better = match best {
            None => true,
            Some((_, bn, bd)) => match (num.checked_mul(bd), bn.checked_mul(den)) {
                (Some(a), Some(b)) => a > b,
                _ => num as f64 / den as f64 > bn as f64 / bd as f64,
            },
        };
        if better {
            best = Some((t, num, den));
        }
    }
    let (threshold, num, den) = best.expect("255 candidate thresholds");
    let mut best = OtsuResult {
        threshold,
        between_class_variance: num as f64 / den as f64 / (n as f64 * n as f64),
    };
    best.between_class_variance /= 255.0 * 255.0;
    Ok(best)
}

fn binarize(img: &GrayImage, threshold: usize, region: Option<&BinaryMask>) -> BinaryMask {
    let (w, h) = img.dims();
    BinaryMask::from_fn(w, h, |x, y| {
        region.map_or(true, |r| r.get(x, y)) && intensity_bin(img.get(x, y)) > threshold
    })
}

/// Otsu binarization of the whole image.
pub fn otsu_threshold(img: &GrayImage) -> Result<(usize, BinaryMask)> {
    let res = otsu_from_histogram(&histogram(img, None)?)?;
    Ok((res.threshold, binarize(img, res.threshold, None)))
}

/// Otsu binarization using only the pixels of `region`; the output mask is
/// confined to the region.
pub fn otsu_threshold_in(img: &GrayImage, region: &BinaryMask) -> Result<(OtsuResult, BinaryMask)> {
    let res = otsu_from_histogram(&histogram(img, Some(region))?)?;
    Ok((res, binarize(img, res.threshold, Some(region))))
}

/// Pixels with `lo <= v <= hi`.
pub fn intensity_band_filter(img: &GrayImage, lo: f64, hi: f64) -> Result<BinaryMask> {
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "intensity band requires 0 <= lo < hi <= 1, got [{lo}, {hi}]"
        )));
    }
    let (w, h) = img.dims();
    Ok(BinaryMask::from_fn(w, h, |x, y| {
        let v = img.get(x, y);
        lo <= v && v <= hi
    }))
}

/// Band filter restricted to a region.
pub fn intensity_band_filter_in(
    img: &GrayImage,
    region: &BinaryMask,
    lo: f64,
    hi: f64,
) -> Result<BinaryMask> {
    check_dims(img.dims(), region.dims())?;
    intensity_band_filter(img, lo, hi)?.intersection(region)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level(a: f64, b: f64) -> GrayImage {
        GrayImage::from_fn(10, 10, |x, _| if x < 5 { a } else { b })
    }

    #[test]
    fn split_histogram_takes_smallest_maximizer() {
        let img = two_level(50.0 / 255.0, 200.0 / 255.0);
        let (t, mask) = otsu_threshold(&img).unwrap();
        assert_eq!(t, 50);
        assert_eq!(mask.count(), 50);
        assert!(mask.iter_true().all(|(x, _)| x >= 5));
    }

    #[test]
    fn extreme_bins() {
        let img = two_level(0.0, 1.0);
        let (t, mask) = otsu_threshold(&img).unwrap();
        assert_eq!(t, 0);
        assert!(mask.iter_true().all(|(x, _)| x >= 5));
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = GrayImage::filled(5, 5, 0.3).unwrap();
        assert!(matches!(otsu_threshold(&img), Err(Error::DegenerateHistogram(_))));
    }

    #[test]
    fn region_restricted_otsu_ignores_outside() {
        // outside region has a third level that would change the threshold
        let img = GrayImage::from_fn(12, 4, |x, _| match x {
            0..=3 => 0.1,
            4..=7 => 0.5,
            _ => 0.95,
        });
        let region = BinaryMask::from_fn(12, 4, |x, _| x < 8);
        let (res, mask) = otsu_threshold_in(&img, &region).unwrap();
        assert_eq!(res.threshold, intensity_bin(0.1));
        assert_eq!(mask.count(), 16);
        assert!(mask.is_subset_of(&region));
    }

    #[test]
    fn band_filter() {
        let img = GrayImage::from_fn(3, 1, |x, _| [0.05, 0.5, 0.95][x]);
        let m = intensity_band_filter(&img, 0.1, 0.9).unwrap();
        assert_eq!(m.bits(), &[false, true, false]);
        assert_eq!(intensity_band_filter(&img, 0.0, 1.0).unwrap().count(), 3);
        assert!(intensity_band_filter(&img, 0.5, 0.5).is_err());
        assert!(intensity_band_filter(&img, -0.1, 0.5).is_err());
    }
}
