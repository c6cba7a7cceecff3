//! Generation settings, read from a TOML document.
//!
//! Every key is optional; see [`GenConfig::default`] for defaults.
//!
//! ```toml
//! seed = 7
//! images = 500          # generated images
//! blobs = 1000          # generated blobs
//! contour_points = 64
//! height = 256
//! width = 256
//! min_blob_area = 16
//! blur_sigma = 8.0
//! tile_size = 256
//! termination = "exhaust"   # or "first_miss"
//!
//! [prior]
//! source = "fitted"     # or "file" (path), "fixed" (Perlin knobs), "uniform"
//!
//! [spacing]
//! source = "fitted"     # or "file" (path)
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::blobs::DEFAULT_MIN_BLOB_AREA;
use crate::codec::{self, MAX_SIDE};
use crate::error::{Error, Result};
use crate::placement::Termination;
use crate::priors::DEFAULT_BLUR_SIGMA;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorSource {
    /// Perlin parameters fitted to the real masks.
    Fitted,
    /// Grayscale PNG with the output image dimensions.
    File {
        path: PathBuf,
    },
    /// Perlin parameters given directly; each image gets its own noise seed.
    Fixed {
        base_frequency: f64,
        octaves: u32,
        #[serde(default = "default_persistence")]
        persistence: f64,
        #[serde(default)]
        threshold_shift: f64,
    },
    Uniform,
}

fn default_persistence() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpacingSource {
    /// Gaps measured between neighbouring blobs in the real masks.
    Fitted,
    /// JSON spacing distribution, as written by `fit-spacing`.
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub images: usize,
    pub blobs: usize,
    pub contour_points: usize,
    pub height: usize,
    pub width: usize,
    pub min_blob_area: usize,
    pub blur_sigma: f64,
    pub tile_size: usize,
    pub termination: Termination,
    pub prior: PriorSource,
    pub spacing: SpacingSource,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            images: 500,
            blobs: 1000,
            contour_points: 64,
            height: 256,
            width: 256,
            min_blob_area: DEFAULT_MIN_BLOB_AREA,
            blur_sigma: DEFAULT_BLUR_SIGMA,
            tile_size: 256,
            termination: Termination::default(),
            prior: PriorSource::Fitted,
            spacing: SpacingSource::Fitted,
        }
    }
}

impl GenConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: GenConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses `path` and resolves relative paths inside it against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = codec::read_file(path)?;
        let text = String::from_utf8(bytes).map_err(|e| Error::Malformed {
            what: "config",
            reason: e.to_string(),
        })?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        if let PriorSource::File { path } = &mut self.prior {
            *path = base.join(&*path);
        }
        if let SpacingSource::File { path } = &mut self.spacing {
            *path = base.join(&*path);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.images < 1 {
            return bad("images must be at least 1".into());
        }
        if self.blobs < 1 {
            return bad("blobs must be at least 1".into());
        }
        if self.contour_points < 8 {
            return bad(format!(
                "contour_points must be at least 8, got {}",
                self.contour_points
            ));
        }
        let max = MAX_SIDE as usize;
        if !(1..=max).contains(&self.height) || !(1..=max).contains(&self.width) {
            return bad(format!(
                "image size {}x{} outside 1..={max}",
                self.height, self.width
            ));
        }
        if self.min_blob_area < 1 {
            return bad("min_blob_area must be at least 1".into());
        }
        if !(self.blur_sigma.is_finite() && self.blur_sigma > 0.0) {
            return bad(format!(
                "blur_sigma must be positive, got {}",
                self.blur_sigma
            ));
        }
        if self.tile_size < 1 || self.tile_size > self.height.min(self.width) {
            return bad(format!(
                "tile_size {} must be in 1..={}",
                self.tile_size,
                self.height.min(self.width)
            ));
        }
        if let PriorSource::Fixed {
            base_frequency,
            octaves,
            persistence,
            threshold_shift,
        } = &self.prior
        {
            crate::priors::PerlinParams {
                base_frequency: *base_frequency,
                octaves: *octaves,
                persistence: *persistence,
                threshold_shift: *threshold_shift,
                seed: 0,
            }
            .validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(GenConfig::from_toml_str("").unwrap(), GenConfig::default());
        assert_eq!(GenConfig::default().images, 500);
    }

    #[test]
    fn full_document() {
        let cfg = GenConfig::from_toml_str(
            r#"
            seed = 42
            images = 3
            blobs = 20
            contour_points = 32
            height = 128
            width = 96
            tile_size = 64
            termination = "first_miss"
            [prior]
            source = "fixed"
            base_frequency = 4.0
            octaves = 2
            [spacing]
            source = "file"
            path = "s.json"
            "#,
        )
        .unwrap();
        assert_eq!((cfg.seed, cfg.images, cfg.width), (42, 3, 96));
        assert_eq!(cfg.termination, Termination::FirstMiss);
        assert_eq!(
            cfg.prior,
            PriorSource::Fixed {
                base_frequency: 4.0,
                octaves: 2,
                persistence: 0.5,
                threshold_shift: 0.0
            }
        );
        assert_eq!(
            cfg.spacing,
            SpacingSource::File {
                path: "s.json".into()
            }
        );
    }

    #[test]
    fn invalid_documents() {
        for doc in [
            "images = 0",
            "contour_points = 7",
            "tile_size = 512",
            "blur_sigma = -1.0",
            "unknown_key = 1",
            "[prior]\nsource = \"bogus\"",
            "[prior]\nsource = \"fixed\"\nbase_frequency = 2.0\noctaves = 0",
            "images = \"many\"",
        ] {
            assert!(GenConfig::from_toml_str(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gen.toml");
        std::fs::write(&path, "[prior]\nsource = \"file\"\npath = \"p.png\"\n").unwrap();
        let cfg = GenConfig::load(&path).unwrap();
        assert_eq!(
            cfg.prior,
            PriorSource::File {
                path: dir.path().join("p.png")
            }
        );
    }
}
