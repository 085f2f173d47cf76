//! Binary and grayscale morphology with rectangular structuring elements.
//!
//! Binary operators read out-of-bounds pixels as false. Grayscale operators
//! replicate the image edge.

use super::image::{BinaryMask, GrayImage};
use crate::error::{Error, Result};

/// Rectangular structuring element anchored at its center pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuringElement {
    width: usize,
    height: usize,
}

impl StructuringElement {
    pub fn rect(width: usize, height: usize) -> Result<Self> {
        if width % 2 == 0 || height % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "structuring element must have odd dimensions, got {width}x{height}"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn radii(&self) -> (isize, isize) {
        ((self.width / 2) as isize, (self.height / 2) as isize)
    }
}

impl Default for StructuringElement {
    fn default() -> Self {
        Self {
            width: 3,
            height: 3,
        }
    }
}

fn binary_pass(mask: &BinaryMask, se: &StructuringElement, any: bool) -> BinaryMask {
    let (w, h) = mask.dims();
    let (rx, ry) = se.radii();
    // `any`: dilation (OR, out-of-bounds false). Otherwise erosion (AND,
    // out-of-bounds false, so any window leaving the image fails).
    let reduce = |vals: &mut dyn FnMut(isize) -> bool, r: isize| {
        if any {
            (-r..=r).any(|d| vals(d))
        } else {
            (-r..=r).all(|d| vals(d))
        }
    };
    let rows = BinaryMask::from_fn(w, h, |x, y| {
        reduce(&mut |dx| mask.get_or_false(x as isize + dx, y as isize), rx)
    });
    BinaryMask::from_fn(w, h, |x, y| {
        reduce(&mut |dy| rows.get_or_false(x as isize, y as isize + dy), ry)
    })
}

pub fn dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    binary_pass(mask, se, true)
}

pub fn erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    binary_pass(mask, se, false)
}

/// Erosion followed by dilation.
pub fn open(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    dilate(&erode(mask, se), se)
}

/// Dilation followed by erosion.
pub fn close(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    erode(&dilate(mask, se), se)
}

fn gray_pass(img: &GrayImage, se: &StructuringElement, take_max: bool) -> GrayImage {
    let (w, h) = img.dims();
    let (rx, ry) = se.radii();
    let pick = |a: f64, b: f64| if take_max { a.max(b) } else { a.min(b) };
    let clamp_x = |x: isize| x.clamp(0, w as isize - 1) as usize;
    let clamp_y = |y: isize| y.clamp(0, h as isize - 1) as usize;
    let rows = GrayImage::from_fn(w, h, |x, y| {
        (-rx..=rx)
            .map(|dx| img.get(clamp_x(x as isize + dx), y))
            .reduce(pick)
            .unwrap_or(0.0)
    });
    GrayImage::from_fn(w, h, |x, y| {
        (-ry..=ry)
            .map(|dy| rows.get(x, clamp_y(y as isize + dy)))
            .reduce(pick)
            .unwrap_or(0.0)
    })
}

pub fn gray_erode(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    gray_pass(img, se, false)
}

pub fn gray_dilate(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    gray_pass(img, se, true)
}

pub fn gray_open(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    gray_dilate(&gray_erode(img, se), se)
}

/// White top-hat: `img - gray_open(img)`, never negative.
pub fn top_hat(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    let opened = gray_open(img, se);
    let (w, h) = img.dims();
    GrayImage::from_fn(w, h, |x, y| (img.get(x, y) - opened.get(x, y)).max(0.0))
}
