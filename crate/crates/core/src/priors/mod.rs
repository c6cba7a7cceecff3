//! Placement priors: the per-pixel density map and the blob spacing
//! distribution.

mod fit;
mod perlin;
mod spacing;

pub use fit::{default_candidate_grid, fit_prior, score_candidate, DEFAULT_BLUR_SIGMA};
pub use perlin::{perlin2d, GradientNoise, PerlinParams, NOISE_GAIN};
pub use spacing::{fit_spacing, sample_spacing, SpacingDist};

use image::DynamicImage;

use crate::codec;
use crate::error::{Error, Result};
use crate::grid::RealGrid;

/// Per-pixel relative likelihood of a blob covering that location, in
/// `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorMap {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl PriorMap {
    /// Fails on a length mismatch or any value outside `[0, 1]`.
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {height}x{width} prior",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!(
                "prior value {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            height,
            width,
            values,
        })
    }

    pub fn uniform(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            values: vec![1.0; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// True when no pixel has positive mass; placement then yields nothing.
    pub fn is_degenerate(&self) -> bool {
        self.values.iter().all(|&v| v <= 0.0)
    }

    pub fn as_grid(&self) -> RealGrid {
        RealGrid {
            height: self.height,
            width: self.width,
            values: self.values.clone(),
        }
    }

    /// Loads an expert-drawn prior from an 8- or 16-bit grayscale PNG,
    /// scaling the full code range onto `[0, 1]`.
    pub fn decode_png(bytes: &[u8]) -> Result<Self> {
        let (h, w, values): (u32, u32, Vec<f64>) = match codec::decode_image(bytes)? {
            DynamicImage::ImageLuma8(img) => {
                let (w, h) = img.dimensions();
                (
                    h,
                    w,
                    img.into_raw()
                        .into_iter()
                        .map(|v| v as f64 / 255.0)
                        .collect(),
                )
            }
            DynamicImage::ImageLuma16(img) => {
                let (w, h) = img.dimensions();
                (
                    h,
                    w,
                    img.into_raw()
                        .into_iter()
                        .map(|v| v as f64 / 65535.0)
                        .collect(),
                )
            }
            other => {
                return Err(Error::UnsupportedFormat(format!(
                    "prior must be 8/16-bit grayscale, got {:?}",
                    other.color()
                )))
            }
        };
        let prior = Self::new(h as usize, w as usize, values)?;
        if prior.is_degenerate() {
            return Err(Error::InvalidArgument(
                "prior image is entirely zero".into(),
            ));
        }
        Ok(prior)
    }

    /// 8-bit grayscale rendering, for inspection.
    pub fn encode_png8(&self) -> Result<Vec<u8>> {
        let px = self
            .values
            .iter()
            .map(|v| (v * 255.0).round() as u8)
            .collect();
        codec::encode_png(&codec::gray8(self.height, self.width, px))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(PriorMap::new(1, 2, vec![0.5, 1.5]).is_err());
        assert!(PriorMap::new(1, 2, vec![0.5, f64::NAN]).is_err());
        assert!(PriorMap::new(1, 2, vec![0.5]).is_err());
    }

    #[test]
    fn png_scaling() {
        let img = codec::gray8(1, 3, vec![0, 51, 255]);
        let p = PriorMap::decode_png(&codec::encode_png(&img).unwrap()).unwrap();
        assert_eq!(p.values(), &[0.0, 0.2, 1.0]);
        let zero = codec::gray8(2, 2, vec![0; 4]);
        assert!(PriorMap::decode_png(&codec::encode_png(&zero).unwrap()).is_err());
    }
}
