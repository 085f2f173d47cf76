//! Lung masks: scan loading, the classical fallback segmenter, the slice
//! retention gate and the left/right split.

use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imaging::{
    self, clear_border, close, connected_components, fill_holes, keep_largest, BinaryMask,
    GrayImage, StructuringElement,
};

const SLICE_EXTENSIONS: &[&str] = &["png", "pgm", "pnm", "jpg", "jpeg"];

/// The slices of one patient's scan, in natural filename order.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanVolume {
    pub patient_id: String,
    pub slices: Vec<GrayImage>,
    /// Source filename of each slice; used to pair external masks.
    pub names: Vec<String>,
}

impl ScanVolume {
    pub fn new(patient_id: impl Into<String>, slices: Vec<GrayImage>, names: Vec<String>) -> Result<Self> {
        let Some(first) = slices.first() else {
            return Err(Error::InvalidParameter("scan needs at least one slice".into()));
        };
        if names.len() != slices.len() {
            return Err(Error::InvalidParameter(format!(
                "{} slice names for {} slices",
                names.len(),
                slices.len()
            )));
        }
        let dims = first.dims();
        if let Some(other) = slices.iter().find(|s| s.dims() != dims) {
            return Err(Error::GeometryMismatch {
                expected: dims,
                found: other.dims(),
            });
        }
        Ok(Self {
            patient_id: patient_id.into(),
            slices,
            names,
        })
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.slices[0].dims()
    }
}

fn chunks(s: &str) -> Vec<(bool, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..=bytes.len() {
        if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
            out.push((bytes[start].is_ascii_digit(), &s[start..i]));
            start = i;
        }
    }
    out
}

/// Numeric-aware string ordering: digit runs compare by value.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(&cb) {
        let ord = match (x, y) {
            ((true, dx), (true, dy)) => {
                let (tx, ty) = (dx.trim_start_matches('0'), dy.trim_start_matches('0'));
                tx.len().cmp(&ty.len()).then_with(|| tx.cmp(ty))
            }
            ((_, sx), (_, sy)) => sx.cmp(sy),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

fn is_slice_file(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| SLICE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Image files in `dir`, sorted with [`natural_cmp`].
pub fn list_slice_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::ScanNotFound(dir.to_path_buf()));
    }
    let entries = fs::read_dir(dir).map_err(|e| Error::io(format!("listing {}", dir.display()), e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(format!("listing {}", dir.display()), e))?.path();
        if is_slice_file(&path) {
            files.push(path);
        }
    }
    files.sort_by(|a, b| {
        natural_cmp(
            &a.file_name().unwrap_or_default().to_string_lossy(),
            &b.file_name().unwrap_or_default().to_string_lossy(),
        )
    });
    Ok(files)
}

/// Read every slice image in `dir`.
pub fn load_scan(dir: &Path) -> Result<ScanVolume> {
    let files = list_slice_files(dir)?;
    if files.is_empty() {
        return Err(Error::EmptyDirectory(dir.to_path_buf()));
    }
    let slices = files
        .iter()
        .map(|p| imaging::io::read_gray(p))
        .collect::<Result<Vec<_>>>()?;
    let first = slices[0].dims();
    if let Some(other) = slices.iter().find(|s| s.dims() != first) {
        return Err(Error::MixedGeometry {
            path: dir.to_path_buf(),
            first,
            other: other.dims(),
        });
    }
    let names = files
        .iter()
        .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let patient_id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scan".to_string());
    ScanVolume::new(patient_id, slices, names)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalLungParams {
    /// Normalized intensity below which a pixel counts as air-like.
    pub air_threshold: f64,
}

impl Default for ClassicalLungParams {
    fn default() -> Self {
        Self { air_threshold: 0.35 }
    }
}

/// Where per-slice lung masks come from.
#[derive(Clone, Debug, PartialEq)]
pub enum MaskSource {
    /// One mask image per slice, same filename as the slice; nonzero = lung.
    ExternalDirectory(PathBuf),
    Classical(ClassicalLungParams),
}

impl MaskSource {
    pub fn lung_masks(&self, scan: &ScanVolume) -> Result<Vec<BinaryMask>> {
        match self {
            MaskSource::ExternalDirectory(dir) => {
                if !dir.is_dir() {
                    return Err(Error::MaskSource(format!(
                        "mask directory {} not found",
                        dir.display()
                    )));
                }
                let dims = scan.dims();
                scan.names
                    .iter()
                    .map(|name| {
                        let path = dir.join(name);
                        if !path.is_file() {
                            return Err(Error::MaskSource(format!(
                                "no mask {} for slice {name}",
                                path.display()
                            )));
                        }
                        let mask = imaging::io::read_mask(&path)?;
                        if mask.dims() != dims {
                            return Err(Error::GeometryMismatch {
                                expected: dims,
                                found: mask.dims(),
                            });
                        }
                        Ok(mask)
                    })
                    .collect()
            }
            MaskSource::Classical(params) => Ok(scan
                .slices
                .par_iter()
                .map(|s| classical_lung_segment(s, params))
                .collect()),
        }
    }
}

/// Threshold-and-clean lung segmentation for slices without external masks.
///
/// Air-like pixels touching the image border are the outside of the body
/// and are dropped; the two largest remaining regions are kept, their holes
/// filled, and the result closed with a 3x3 kernel.
pub fn classical_lung_segment(img: &GrayImage, params: &ClassicalLungParams) -> BinaryMask {
    let (w, h) = img.dims();
    let air = BinaryMask::from_fn(w, h, |x, y| img.get(x, y) < params.air_threshold);
    let interior = clear_border(&air);
    let lungs = fill_holes(&keep_largest(&interior, 2));
    close(&lungs, &StructuringElement::default())
}

/// Slice retention rule.
///
/// A slice is kept when its lung mask is large enough and the slice lies in
/// the middle band of the scan, or when the lung mask covers most of the
/// image regardless of position. Area thresholds are stated for a
/// `reference_area` image and scaled to the actual image size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateParams {
    pub min_mask_area: f64,
    /// Middle band as fractions `(numerator, denominator)` of the slice count.
    pub band_start: (usize, usize),
    pub band_end: (usize, usize),
    pub large_area_fraction: f64,
    pub reference_area: f64,
}

impl Default for GateParams {
    fn default() -> Self {
        Self {
            min_mask_area: 10_000.0,
            band_start: (1, 3),
            band_end: (2, 3),
            large_area_fraction: 0.7,
            reference_area: 512.0 * 512.0,
        }
    }
}

impl GateParams {
    pub fn validate(&self) -> Result<()> {
        let ok_frac = |(n, d): (usize, usize)| d > 0 && n <= d;
        if !(self.min_mask_area > 0.0)
            || !(self.large_area_fraction > 0.0 && self.large_area_fraction <= 1.0)
            || !(self.reference_area > 0.0)
            || !ok_frac(self.band_start)
            || !ok_frac(self.band_end)
        {
            return Err(Error::InvalidParameter(format!("invalid gate parameters {self:?}")));
        }
        Ok(())
    }

    /// Minimum lung area for a middle-band slice of an image with `image_area` pixels.
    pub fn scaled_min_area(&self, image_area: usize) -> f64 {
        self.min_mask_area * image_area as f64 / self.reference_area
    }

    pub fn retains(&self, area: usize, image_area: usize, index: usize, n_slices: usize) -> bool {
        // index >= n*a/b  <=>  index*b >= n*a, kept in integers
        let (sa, sb) = self.band_start;
        let (ea, eb) = self.band_end;
        let in_band = index * sb >= n_slices * sa && index * eb <= n_slices * ea;
        let big_enough = area as f64 >= self.scaled_min_area(image_area);
        let dominant = area as f64 >= self.large_area_fraction * image_area as f64;
        (big_enough && in_band) || dominant
    }
}

pub fn slice_gate(mask: &BinaryMask, index: usize, n_slices: usize, params: &GateParams) -> bool {
    params.retains(mask.count(), mask.width() * mask.height(), index, n_slices)
}

/// Lung mask split by side. `right` is the patient's right lung, which is
/// on the viewer's left in radiological display.
#[derive(Clone, Debug, PartialEq)]
pub struct LungSides {
    pub left: BinaryMask,
    pub right: BinaryMask,
}

/// Assign every lung pixel to a side.
///
/// With two or more components, each component goes to the side of the
/// foreground centroid its own centroid falls on. A single component is
/// cut at the vertical midline of its bounding box.
pub fn split_left_right(mask: &BinaryMask) -> LungSides {
    let (w, h) = mask.dims();
    let (labels, stats) = connected_components(mask);
    match stats.len() {
        0 => LungSides {
            left: BinaryMask::empty(w, h),
            right: BinaryMask::empty(w, h),
        },
        1 => {
            let (x0, _, x1, _) = stats[0].bbox;
            let mid = (x0 + x1) as f64 / 2.0;
            LungSides {
                right: BinaryMask::from_fn(w, h, |x, y| mask.get(x, y) && x as f64 <= mid),
                left: BinaryMask::from_fn(w, h, |x, y| mask.get(x, y) && x as f64 > mid),
            }
        }
        _ => {
            let total: usize = stats.iter().map(|s| s.area).sum();
            let cx = stats.iter().map(|s| s.centroid.0 * s.area as f64).sum::<f64>() / total as f64;
            let on_right: Vec<bool> = stats.iter().map(|s| s.centroid.0 < cx).collect();
            LungSides {
                right: labels.select(|l| on_right[l as usize - 1]),
                left: labels.select(|l| !on_right[l as usize - 1]),
            }
        }
    }
}
