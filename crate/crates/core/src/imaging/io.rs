//! PNG / PGM (P5) raster I/O.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, GrayImage as Luma8, ImageEncoder, ImageFormat};

use super::image::{BinaryMask, GrayImage};
use crate::error::{Error, Result};

fn decode(path: &Path) -> Result<Luma8> {
    let img = image::open(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(format!("reading {}", path.display()), io),
        other => Error::Decode {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    })?;
    Ok(img.into_luma8())
}

/// Load an 8-bit grayscale slice; intensities are scaled to `[0, 1]`.
pub fn read_gray(path: &Path) -> Result<GrayImage> {
    let luma = decode(path)?;
    GrayImage::from_u8(luma.width() as usize, luma.height() as usize, luma.as_raw())
}

/// Load a mask image; any nonzero sample is foreground.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let luma = decode(path)?;
    BinaryMask::new(
        luma.width() as usize,
        luma.height() as usize,
        luma.as_raw().iter().map(|&v| v != 0).collect(),
    )
}

fn save(path: &Path, width: usize, height: usize, samples: Vec<u8>, format: ImageFormat) -> Result<()> {
    let buf = Luma8::from_raw(width as u32, height as u32, samples)
        .ok_or_else(|| Error::Invariant("raster buffer size mismatch".into()))?;
    buf.save_with_format(path, format).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(format!("writing {}", path.display()), io),
        other => Error::Decode {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    })
}

pub fn write_gray_png(img: &GrayImage, path: &Path) -> Result<()> {
    save(path, img.width(), img.height(), img.to_u8(), ImageFormat::Png)
}

/// Binary PGM (P5), 8-bit.
pub fn write_gray_pgm(img: &GrayImage, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    let mut out = BufWriter::new(file);
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&img.to_u8(), img.width() as u32, img.height() as u32, ExtendedColorType::L8)
        .map_err(|e| Error::Decode {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    out.flush().map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Mask as PNG with 0 / 255 samples.
pub fn write_mask_png(mask: &BinaryMask, path: &Path) -> Result<()> {
    let samples = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    save(path, mask.width(), mask.height(), samples, ImageFormat::Png)
}
