//! On-disk blob pools: one single-channel PNG per footprint plus a JSON
//! index carrying offsets, areas, and provenance.

use std::path::{Component, Path};

use image::DynamicImage;
use serde::{Deserialize, Serialize};

use super::Blob;
use crate::codec;
use crate::error::{Error, Result};
use crate::grid::BitGrid;

pub const POOL_INDEX_FILE: &str = "index.json";
pub const POOL_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Extracted from an annotated mask.
    Real { source: String, label: u32 },
    /// Blended from two pool blobs; `alpha` weights the first parent.
    Interpolated { parents: [usize; 2], alpha: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolEntry {
    pub file: String,
    pub offset: [i64; 2],
    pub area: usize,
    pub height: usize,
    pub width: usize,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolIndex {
    pub schema_version: u32,
    pub blobs: Vec<PoolEntry>,
}

impl PoolIndex {
    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let index: PoolIndex = serde_json::from_slice(bytes)?;
        if index.schema_version != POOL_SCHEMA_VERSION {
            return Err(Error::Malformed {
                what: "blob pool index",
                reason: format!("unsupported schema_version {}", index.schema_version),
            });
        }
        for e in &index.blobs {
            check_relative(&e.file, "blob pool index")?;
            if e.area == 0 || e.area > e.height.saturating_mul(e.width) {
                return Err(Error::Malformed {
                    what: "blob pool index",
                    reason: format!(
                        "{}: area {} impossible for {}x{}",
                        e.file, e.area, e.height, e.width
                    ),
                });
            }
        }
        Ok(index)
    }
}

/// Rejects absolute paths and `..` so index files cannot point outside their
/// directory.
pub(crate) fn check_relative(path: &str, what: &'static str) -> Result<()> {
    let p = Path::new(path);
    if path.is_empty()
        || p.components()
            .any(|c| !matches!(c, Component::Normal(_) | Component::CurDir))
    {
        return Err(Error::Malformed {
            what,
            reason: format!("path {path:?} must be relative and stay inside its directory"),
        });
    }
    Ok(())
}

/// Encodes a footprint as 8-bit grayscale, 255 = foreground.
pub fn encode_footprint(blob: &Blob) -> Result<Vec<u8>> {
    let fp = blob.footprint();
    let pixels = fp
        .as_slice()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    codec::encode_png(&codec::gray8(fp.height(), fp.width(), pixels))
}

/// Decodes a footprint PNG (any nonzero gray value is foreground).
pub fn decode_footprint(bytes: &[u8], offset: (i64, i64)) -> Result<Blob> {
    let gray = match codec::decode_image(bytes)? {
        DynamicImage::ImageLuma8(img) => img,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "footprint must be 8-bit grayscale, got {:?}",
                other.color()
            )))
        }
    };
    let (w, h) = gray.dimensions();
    let raw = gray.into_raw();
    let grid = BitGrid::from_fn(h as usize, w as usize, |r, c| raw[r * w as usize + c] != 0);
    Blob::from_footprint(&grid, offset)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlobPool {
    pub blobs: Vec<Blob>,
    pub provenance: Vec<Provenance>,
}

impl BlobPool {
    pub fn len(&self) -> usize {
        self.blobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blobs.is_empty()
    }

    pub fn push(&mut self, blob: Blob, provenance: Provenance) {
        self.blobs.push(blob);
        self.provenance.push(provenance);
    }

    pub fn index(&self) -> PoolIndex {
        PoolIndex {
            schema_version: POOL_SCHEMA_VERSION,
            blobs: self
                .blobs
                .iter()
                .zip(&self.provenance)
                .enumerate()
                .map(|(i, (b, p))| PoolEntry {
                    file: format!("blob_{i:05}.png"),
                    offset: [b.offset().0, b.offset().1],
                    area: b.area(),
                    height: b.height(),
                    width: b.width(),
                    provenance: p.clone(),
                })
                .collect(),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let index = self.index();
        for (blob, entry) in self.blobs.iter().zip(&index.blobs) {
            codec::write_file(&dir.join(&entry.file), &encode_footprint(blob)?)?;
        }
        let json = serde_json::to_vec_pretty(&index)?;
        codec::write_file(&dir.join(POOL_INDEX_FILE), &json)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let index = PoolIndex::from_json_slice(&codec::read_file(&dir.join(POOL_INDEX_FILE))?)?;
        let mut pool = BlobPool::default();
        for e in index.blobs {
            let blob = decode_footprint(
                &codec::read_file(&dir.join(&e.file))?,
                (e.offset[0], e.offset[1]),
            )?;
            if blob.area() != e.area || blob.height() != e.height || blob.width() != e.width {
                return Err(Error::Malformed {
                    what: "blob pool",
                    reason: format!("{} does not match its index entry", e.file),
                });
            }
            pool.push(blob, e.provenance);
        }
        Ok(pool)
    }
}
