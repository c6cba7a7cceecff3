//! Real annotated pairs in, generated dataset out: image loading, tiling
//! with per-tile blob counts, reference tile selection, blob statistics,
//! mask flattening, and the dataset manifest.

mod manifest;
mod stats;
mod tiles;

pub use manifest::{
    DatasetCounts, DatasetManifest, ManifestEntry, PriorSpec, TileRecord, MANIFEST_FILE,
    MANIFEST_SCHEMA_VERSION,
};
pub use stats::{aspect_ratio, blob_stats, quantile, BlobStats};
pub use tiles::{select_reference, tile_counts, tile_grid, tile_image, Tile};

use std::path::Path;

use image::DynamicImage;

use crate::codec;
use crate::error::{Error, Result};
use crate::mask::InstanceMask;

/// 8-bit image with 1 (gray) or 3 (RGB) interleaved channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidArgument(format!(
                "images have 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(Error::DimensionMismatch(format!(
                "{} bytes for a {height}x{width}x{channels} image",
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Accepts 8-bit gray or RGB PNGs.
    pub fn decode_png(bytes: &[u8]) -> Result<Self> {
        match codec::decode_image(bytes)? {
            DynamicImage::ImageLuma8(img) => {
                let (w, h) = img.dimensions();
                Self::new(h as usize, w as usize, 1, img.into_raw())
            }
            DynamicImage::ImageRgb8(img) => {
                let (w, h) = img.dimensions();
                Self::new(h as usize, w as usize, 3, img.into_raw())
            }
            other => Err(Error::UnsupportedFormat(format!(
                "images must be 8-bit grayscale or RGB, got {:?}",
                other.color()
            ))),
        }
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let (w, h) = (self.width as u32, self.height as u32);
        let img = if self.channels == 1 {
            DynamicImage::ImageLuma8(
                image::GrayImage::from_raw(w, h, self.data.clone()).expect("validated length"),
            )
        } else {
            DynamicImage::ImageRgb8(
                image::RgbImage::from_raw(w, h, self.data.clone()).expect("validated length"),
            )
        };
        codec::encode_png(&img)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::decode_png(&codec::read_file(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        codec::write_file(path, &self.encode_png()?)
    }

    /// Sub-image; the window must lie inside the image.
    pub fn crop(&self, row0: usize, col0: usize, height: usize, width: usize) -> RasterImage {
        assert!(row0 + height <= self.height && col0 + width <= self.width);
        let ch = self.channels;
        let mut data = Vec::with_capacity(height * width * ch);
        for r in row0..row0 + height {
            let start = (r * self.width + col0) * ch;
            data.extend_from_slice(&self.data[start..start + width * ch]);
        }
        RasterImage {
            height,
            width,
            channels: ch,
            data,
        }
    }
}

/// Foreground (any nonzero label) to 255, background to 0.
pub fn flatten(mask: &InstanceMask) -> RasterImage {
    let data = mask
        .labels()
        .iter()
        .map(|&l| if l != 0 { 255 } else { 0 })
        .collect();
    RasterImage {
        height: mask.height(),
        width: mask.width(),
        channels: 1,
        data,
    }
}

/// Loads an image and its label mask, requiring equal dimensions.
pub fn load_annotated_pair(
    image_path: &Path,
    mask_path: &Path,
) -> Result<(RasterImage, InstanceMask)> {
    let image = RasterImage::load(image_path)?;
    let mask = InstanceMask::load(mask_path)?;
    if image.height() != mask.height() || image.width() != mask.width() {
        return Err(Error::DimensionMismatch(format!(
            "image {} is {}x{} but mask {} is {}x{}",
            image_path.display(),
            image.height(),
            image.width(),
            mask_path.display(),
            mask.height(),
            mask.width()
        )));
    }
    Ok((image, mask))
}
