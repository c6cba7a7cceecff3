use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blobs::check_relative;
use crate::codec;
use crate::error::{Error, Result};
use crate::priors::PerlinParams;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Where the prior for one generated image came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorSpec {
    /// Perlin realization; `params.seed` identifies the realization.
    Perlin {
        params: PerlinParams,
    },
    /// Expert-supplied map, copied into the output tree.
    File {
        path: String,
    },
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub generated_mask_path: String,
    pub content_image_path: String,
    pub reference_tile_path: String,
    /// Seed of the placement stream for this image.
    pub seed: u64,
    pub prior_params: PriorSpec,
    /// Placement log; its blob ids index the pool under `blob_pool`.
    pub blob_provenance_path: String,
    pub instances: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetCounts {
    pub real_images: usize,
    pub generated_images: usize,
    pub real_blobs: usize,
    pub generated_blobs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileRecord {
    pub path: String,
    pub source_image: usize,
    pub blob_count: usize,
}

/// Index of a generated dataset. All paths are relative to the directory
/// holding the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub master_seed: u64,
    pub counts: DatasetCounts,
    pub blob_pool: String,
    /// Spacing distribution used for every entry.
    pub spacing: String,
    pub tiles: Vec<TileRecord>,
    pub entries: Vec<ManifestEntry>,
}

const WHAT: &str = "dataset manifest";

impl DatasetManifest {
    fn paths(&self) -> impl Iterator<Item = &str> {
        [self.blob_pool.as_str(), self.spacing.as_str()]
            .into_iter()
            .chain(self.tiles.iter().map(|t| t.path.as_str()))
            .chain(self.entries.iter().flat_map(|e| {
                let prior = match &e.prior_params {
                    PriorSpec::File { path } => Some(path.as_str()),
                    _ => None,
                };
                [
                    e.generated_mask_path.as_str(),
                    e.content_image_path.as_str(),
                    e.reference_tile_path.as_str(),
                    e.blob_provenance_path.as_str(),
                ]
                .into_iter()
                .chain(prior)
            }))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::Malformed {
                what: WHAT,
                reason: format!("unsupported schema_version {}", self.schema_version),
            });
        }
        if self.counts.generated_images != self.entries.len() {
            return Err(Error::Malformed {
                what: WHAT,
                reason: format!(
                    "counts.generated_images is {} but there are {} entries",
                    self.counts.generated_images,
                    self.entries.len()
                ),
            });
        }
        for p in self.paths() {
            check_relative(p, WHAT)?;
        }
        for e in &self.entries {
            if let PriorSpec::Perlin { params } = &e.prior_params {
                params.validate()?;
            }
        }
        Ok(())
    }

    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let m: DatasetManifest = serde_json::from_slice(bytes)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self)?;
        v.push(b'\n');
        Ok(v)
    }

    /// Writes `dir/manifest.json` after checking every referenced path
    /// exists under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        self.validate()?;
        if let Some(missing) = self.paths().find(|p| !dir.join(p).exists()) {
            return Err(Error::Malformed {
                what: WHAT,
                reason: format!("referenced path {missing} does not exist"),
            });
        }
        codec::write_file(&dir.join(MANIFEST_FILE), &self.to_json()?)
    }

    /// Reads a manifest file, or `manifest.json` inside a directory.
    pub fn load(path: &Path) -> Result<Self> {
        let file = if path.is_dir() {
            path.join(MANIFEST_FILE)
        } else {
            path.to_path_buf()
        };
        Self::from_json_slice(&codec::read_file(&file)?)
    }
}
