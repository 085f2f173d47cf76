//! Per-slice infection segmentation and the scan-level driver.
//!
//! The slice pipeline, in order:
//!
//! 1. restrict the slice to the lung mask;
//! 2. keep only lung pixels inside the intensity band (drops air-dark
//!    parenchyma and bone-bright structures);
//! 3. smooth inside the lung and hyperbolize the histogram;
//! 4. Otsu-binarize the enhanced lung, open, drop small components;
//! 5. build a vessel mask from an Otsu-binarized top-hat, drop small components;
//! 6. subtract vessels from the candidates;
//! 7. fill holes, dilate, and clip to the lung.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imaging::{
    area_filter, dilate, fill_holes, hyperbolize, intensity_band_filter_in,
    masked_gaussian_smooth, open, otsu_threshold_in, top_hat, BinaryMask, GrayImage,
    HyperbolizationParams, StructuringElement,
};
use crate::lung::{slice_gate, split_left_right, GateParams, MaskSource, ScanVolume};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfectionParams {
    pub hyperbolization: HyperbolizationParams,
    pub sigma: f64,
    pub band_lo: f64,
    pub band_hi: f64,
    /// Minimum component area of infection candidates after opening.
    pub noise_min_area: usize,
    /// Minimum component area of the vessel mask.
    pub vessel_min_area: usize,
    pub kernel: StructuringElement,
    /// Otsu results with a smaller between-class variance are treated as
    /// "nothing to separate" and produce an empty mask.
    pub otsu_min_variance: f64,
}

impl Default for InfectionParams {
    fn default() -> Self {
        Self {
            hyperbolization: HyperbolizationParams::default(),
            sigma: 1.0,
            band_lo: 0.08,
            band_hi: 0.90,
            noise_min_area: 50,
            vessel_min_area: 30,
            kernel: StructuringElement::default(),
            otsu_min_variance: 1e-6,
        }
    }
}

impl InfectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0)
            || !(0.0 <= self.band_lo && self.band_lo < self.band_hi && self.band_hi <= 1.0)
            || self.noise_min_area == 0
            || self.vessel_min_area == 0
            || !(self.otsu_min_variance >= 0.0)
        {
            return Err(Error::InvalidParameter(format!("invalid infection parameters {self:?}")));
        }
        Ok(())
    }
}

/// Every intermediate raster of one slice run.
#[derive(Clone, Debug)]
pub struct InfectionTrace {
    /// Lung-restricted slice after the intensity band filter.
    pub seg_img: GrayImage,
    pub band_mask: BinaryMask,
    pub ct_hyper: GrayImage,
    /// Opened, area-filtered Otsu foreground of `ct_hyper`.
    pub candidates: BinaryMask,
    pub vessel_mask: BinaryMask,
    pub infection_mask: BinaryMask,
}

fn guarded_otsu(img: &GrayImage, region: &BinaryMask, min_variance: f64) -> Result<BinaryMask> {
    let (w, h) = img.dims();
    match otsu_threshold_in(img, region) {
        Ok((res, mask)) if res.between_class_variance >= min_variance => Ok(mask),
        Ok(_) | Err(Error::DegenerateHistogram(_)) => Ok(BinaryMask::empty(w, h)),
        Err(e) => Err(e),
    }
}

pub fn segment_infection_traced(
    slice: &GrayImage,
    lung: &BinaryMask,
    params: &InfectionParams,
) -> Result<InfectionTrace> {
    if slice.dims() != lung.dims() {
        return Err(Error::GeometryMismatch {
            expected: slice.dims(),
            found: lung.dims(),
        });
    }
    let se = &params.kernel;
    let lung_only = slice.masked(lung)?;
    let band_mask = intensity_band_filter_in(&lung_only, lung, params.band_lo, params.band_hi)?;
    let seg_img = lung_only.masked(&band_mask)?;

    let smoothed = masked_gaussian_smooth(&seg_img, lung, params.sigma)?;
    let ct_hyper = hyperbolize(&smoothed, params.hyperbolization);

    let foreground = guarded_otsu(&ct_hyper, lung, params.otsu_min_variance)?;
    let candidates = area_filter(&open(&foreground, se), params.noise_min_area);

    let vessels = guarded_otsu(&top_hat(&ct_hyper, se), lung, params.otsu_min_variance)?;
    let vessel_mask = area_filter(&vessels, params.vessel_min_area);

    let temp = candidates.difference(&vessel_mask)?;
    let infection_mask = dilate(&fill_holes(&temp), se).intersection(lung)?;

    Ok(InfectionTrace {
        seg_img,
        band_mask,
        ct_hyper,
        candidates,
        vessel_mask,
        infection_mask,
    })
}

/// Infection mask of one slice; always a subset of `lung`.
pub fn segment_infection(slice: &GrayImage, lung: &BinaryMask, params: &InfectionParams) -> Result<BinaryMask> {
    Ok(segment_infection_traced(slice, lung, params)?.infection_mask)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceResult {
    pub index: usize,
    pub lung_mask: BinaryMask,
    /// Empty for slices the gate rejected.
    pub infection_mask: BinaryMask,
    pub left_rate: f64,
    pub right_rate: f64,
    pub retained: bool,
}

impl SliceResult {
    /// Infected fraction of the whole lung on this slice.
    pub fn infection_rate(&self) -> f64 {
        ratio(self.infection_mask.count(), self.lung_mask.count())
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-side infected fractions `(left, right)`; 0 for an empty side.
pub fn side_rates(lung: &BinaryMask, infection: &BinaryMask) -> Result<(f64, f64)> {
    let sides = split_left_right(lung);
    let left = ratio(infection.intersection(&sides.left)?.count(), sides.left.count());
    let right = ratio(infection.intersection(&sides.right)?.count(), sides.right.count());
    Ok((left, right))
}

fn process_slice(
    index: usize,
    slice: &GrayImage,
    lung: &BinaryMask,
    n_slices: usize,
    gate: &GateParams,
    params: &InfectionParams,
    keep_trace: bool,
) -> Result<(SliceResult, Option<InfectionTrace>)> {
    let (w, h) = slice.dims();
    if !slice_gate(lung, index, n_slices, gate) {
        let result = SliceResult {
            index,
            lung_mask: lung.clone(),
            infection_mask: BinaryMask::empty(w, h),
            left_rate: 0.0,
            right_rate: 0.0,
            retained: false,
        };
        return Ok((result, None));
    }
    let trace = segment_infection_traced(slice, lung, params)?;
    let (left_rate, right_rate) = side_rates(lung, &trace.infection_mask)?;
    let result = SliceResult {
        index,
        lung_mask: lung.clone(),
        infection_mask: trace.infection_mask.clone(),
        left_rate,
        right_rate,
        retained: true,
    };
    Ok((result, keep_trace.then_some(trace)))
}

/// Run gate and segmentation over every slice with precomputed lung masks.
/// With `keep_traces`, retained slices also return their intermediates.
pub fn process_scan_with_masks(
    scan: &ScanVolume,
    lung_masks: &[BinaryMask],
    gate: &GateParams,
    params: &InfectionParams,
    keep_traces: bool,
) -> Result<Vec<(SliceResult, Option<InfectionTrace>)>> {
    if scan.is_empty() {
        return Err(Error::InvalidParameter("scan has no slices".into()));
    }
    if lung_masks.len() != scan.len() {
        return Err(Error::MaskSource(format!(
            "{} lung masks for {} slices",
            lung_masks.len(),
            scan.len()
        )));
    }
    gate.validate()?;
    params.validate()?;
    let n = scan.len();
    scan.slices
        .par_iter()
        .zip(lung_masks.par_iter())
        .enumerate()
        .map(|(i, (slice, lung))| process_slice(i, slice, lung, n, gate, params, keep_traces))
        .collect()
}

pub fn process_scan(
    scan: &ScanVolume,
    source: &MaskSource,
    gate: &GateParams,
    params: &InfectionParams,
) -> Result<Vec<SliceResult>> {
    let masks = source.lung_masks(scan)?;
    Ok(process_scan_with_masks(scan, &masks, gate, params, false)?
        .into_iter()
        .map(|(r, _)| r)
        .collect())
}

/// Mean whole-lung infection rate over retained slices.
pub fn mean_retained_rate(results: &[SliceResult]) -> Option<f64> {
    let rates: Vec<f64> = results
        .iter()
        .filter(|r| r.retained)
        .map(SliceResult::infection_rate)
        .collect();
    (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
}
