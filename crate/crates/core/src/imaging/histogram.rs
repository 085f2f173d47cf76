//! Intensity histograms and histogram hyperbolization.

use super::image::{check_dims, intensity_bin, BinaryMask, GrayImage, BINS};
use crate::error::{Error, Result};

pub type Histogram = [u64; BINS];

/// 256-bin histogram, optionally restricted to the pixels of `region`.
pub fn histogram(img: &GrayImage, region: Option<&BinaryMask>) -> Result<Histogram> {
    let mut hist = [0u64; BINS];
    match region {
        None => img.data().iter().for_each(|&v| hist[intensity_bin(v)] += 1),
        Some(region) => {
            check_dims(img.dims(), region.dims())?;
            img.data()
                .iter()
                .zip(region.bits())
                .filter(|(_, &m)| m)
                .for_each(|(&v, _)| hist[intensity_bin(v)] += 1);
        }
    }
    Ok(hist)
}

/// Normalized cumulative distribution of a histogram. All zeros when empty.
pub fn cdf_of(hist: &Histogram) -> [f64; BINS] {
    let total: u64 = hist.iter().sum();
    let mut cdf = [0.0; BINS];
    if total == 0 {
        return cdf;
    }
    let mut running = 0u64;
    for (c, &h) in cdf.iter_mut().zip(hist) {
        running += h;
        *c = running as f64 / total as f64;
    }
    cdf
}

/// Normalized cumulative intensity histogram of the whole image.
pub fn histogram_cdf(img: &GrayImage) -> [f64; BINS] {
    cdf_of(&histogram(img, None).expect("unrestricted histogram"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolizationParams {
    c: f64,
}

impl HyperbolizationParams {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "hyperbolization constant must be positive, got {c}"
            )));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for HyperbolizationParams {
    fn default() -> Self {
        Self { c: 0.5 }
    }
}

/// `c * (exp(ln(1 + 1/c) * normcm) - 1)`; maps 0 to 0 and 1 to 1.
#[inline]
pub fn hyperbolic_response(c: f64, normcm: f64) -> f64 {
    let v = c * ((1.0 + 1.0 / c).ln() * normcm).exp_m1();
    if normcm >= 1.0 {
        // exp(ln(1 + 1/c)) - 1 rounds away from 1/c for some c
        1.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Histogram hyperbolization: each pixel is replaced by the hyperbolic
/// response of its bin's cumulative frequency.
pub fn hyperbolize(img: &GrayImage, params: HyperbolizationParams) -> GrayImage {
    let cdf = histogram_cdf(img);
    let lut: Vec<f64> = cdf.iter().map(|&n| hyperbolic_response(params.c, n)).collect();
    let (w, h) = img.dims();
    GrayImage::from_clamped(w, h, img.data().iter().map(|&v| lut[intensity_bin(v)]).collect())
}
