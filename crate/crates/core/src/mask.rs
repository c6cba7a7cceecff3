use std::collections::BTreeMap;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};

use crate::codec;
use crate::error::{Error, Result};
use crate::grid::BitGrid;

/// Integer-labelled instance mask; `0` is background, every other value is
/// one instance. One label per pixel, so instances are disjoint by
/// construction. The one-channel-per-object view is [`Self::label_grid`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InstanceMask {
    height: usize,
    width: usize,
    labels: Vec<u32>,
}

impl InstanceMask {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            labels: vec![0; height * width],
        }
    }

    pub fn from_labels(height: usize, width: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for a {height}x{width} mask",
                labels.len()
            )));
        }
        Ok(Self {
            height,
            width,
            labels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, label: u32) {
        self.labels[row * self.width + col] = label;
    }

    /// Pixels of every nonzero label, keyed by label in ascending order.
    pub fn instances(&self) -> BTreeMap<u32, Vec<(usize, usize)>> {
        let mut out: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, &l) in self.labels.iter().enumerate() {
            if l != 0 {
                out.entry(l)
                    .or_default()
                    .push((i / self.width, i % self.width));
            }
        }
        out
    }

    pub fn instance_count(&self) -> usize {
        let mut ids: Vec<u32> = self.labels.iter().copied().filter(|&l| l != 0).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    pub fn foreground(&self) -> BitGrid {
        BitGrid::from_fn(self.height, self.width, |r, c| self.get(r, c) != 0)
    }

    pub fn label_grid(&self, label: u32) -> BitGrid {
        BitGrid::from_fn(self.height, self.width, |r, c| self.get(r, c) == label)
    }

    /// Decodes an 8- or 16-bit single-channel PNG; any other pixel layout is
    /// rejected because it cannot carry exact integer labels.
    pub fn decode_png(bytes: &[u8]) -> Result<Self> {
        match codec::decode_image(bytes)? {
            DynamicImage::ImageLuma8(img) => {
                let (w, h) = img.dimensions();
                let labels = img.into_raw().into_iter().map(u32::from).collect();
                Self::from_labels(h as usize, w as usize, labels)
            }
            DynamicImage::ImageLuma16(img) => {
                let (w, h) = img.dimensions();
                let labels = img.into_raw().into_iter().map(u32::from).collect();
                Self::from_labels(h as usize, w as usize, labels)
            }
            other => Err(Error::UnsupportedFormat(format!(
                "mask must be single-channel 8/16-bit integer, got {:?}",
                other.color()
            ))),
        }
    }

    /// Encodes as a 16-bit grayscale PNG holding the raw label values.
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut raw = Vec::with_capacity(self.labels.len());
        for &l in &self.labels {
            raw.push(u16::try_from(l).map_err(|_| {
                Error::InvalidArgument(format!("label {l} does not fit a 16-bit mask"))
            })?);
        }
        let img: ImageBuffer<Luma<u16>, Vec<u16>> =
            ImageBuffer::from_raw(self.width as u32, self.height as u32, raw)
                .expect("buffer length matches dimensions");
        codec::encode_png(&DynamicImage::ImageLuma16(img))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::decode_png(&codec::read_file(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        codec::write_file(path, &self.encode_png()?)
    }
}
