//! Real-blob extraction and synthetic blob generation by contour
//! interpolation.
//!
//! The generation path for one new blob is:
//! [`get_contour_points`] on two pool blobs, [`register`] the first onto the
//! second, [`interpolate`] the paired points, then [`rasterize_and_close`].
//! [`interpolate_blobs`] runs that loop `L` times with bounded retries.

mod contour;
mod interpolate;
mod pool;
mod raster;
mod register;

pub use contour::{get_contour_points, trace_boundary, Contour, Point};
pub use interpolate::{interpolate, interpolate_blobs, GeneratedBlob, GenerationParams};
pub(crate) use pool::check_relative;
pub use pool::{
    decode_footprint, encode_footprint, BlobPool, PoolEntry, PoolIndex, Provenance,
    POOL_INDEX_FILE, POOL_SCHEMA_VERSION,
};
pub use raster::{rasterize_and_close, scanline_fill};
pub use register::{
    normalize_angle, paired_cost, register, register_with, IcpParams, Registration, RigidTransform,
};

use crate::error::{Error, Result};
use crate::grid::BitGrid;
use crate::mask::InstanceMask;

/// Labels whose largest 4-connected component is smaller than this are
/// treated as annotation specks.
pub const DEFAULT_MIN_BLOB_AREA: usize = 16;

/// A single instance footprint cropped to its bounding box.
///
/// `offset` is the `(row, col)` of the bounding-box origin in the frame the
/// blob came from: the source image for extracted blobs, the contour
/// coordinate frame for rasterized ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Blob {
    footprint: BitGrid,
    offset: (i64, i64),
    area: usize,
}

impl Blob {
    /// Builds a blob from a footprint, cropping it tight. Fails unless the
    /// footprint is a single nonempty 4-connected component.
    pub fn from_footprint(footprint: &BitGrid, offset: (i64, i64)) -> Result<Self> {
        let Some((r0, c0, r1, c1)) = footprint.bounding_box() else {
            return Err(Error::InvalidArgument("blob footprint is empty".into()));
        };
        let cropped = footprint.crop(r0, c0, r1 - r0 + 1, c1 - c0 + 1);
        let comps = cropped.components4();
        if comps.len() != 1 {
            return Err(Error::InvalidArgument(format!(
                "blob footprint has {} 4-connected components",
                comps.len()
            )));
        }
        let area = comps[0].len();
        Ok(Self {
            footprint: cropped,
            offset: (offset.0 + r0 as i64, offset.1 + c0 as i64),
            area,
        })
    }

    pub fn footprint(&self) -> &BitGrid {
        &self.footprint
    }

    pub fn offset(&self) -> (i64, i64) {
        self.offset
    }

    pub fn area(&self) -> usize {
        self.area
    }

    pub fn height(&self) -> usize {
        self.footprint.height()
    }

    pub fn width(&self) -> usize {
        self.footprint.width()
    }

    pub fn with_offset(mut self, offset: (i64, i64)) -> Self {
        self.offset = offset;
        self
    }

    /// Set pixels in the blob's own frame (offset applied).
    pub fn pixels(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (or, oc) = self.offset;
        self.footprint
            .ones()
            .map(move |(r, c)| (or + r as i64, oc + c as i64))
    }

    /// Centroid `(row, col)` in the blob's own frame.
    pub fn centroid(&self) -> (f64, f64) {
        let (mut sr, mut sc) = (0.0, 0.0);
        for (r, c) in self.pixels() {
            sr += r as f64;
            sc += c as f64;
        }
        let n = self.area as f64;
        (sr / n, sc / n)
    }
}

/// Intersection over union of two blobs placed by their offsets.
pub fn iou(a: &Blob, b: &Blob) -> f64 {
    let mut inter = 0usize;
    for (r, c) in a.pixels() {
        let (lr, lc) = (r - b.offset.0, c - b.offset.1);
        if b.footprint.get_signed(lr, lc) {
            inter += 1;
        }
    }
    let union = a.area + b.area - inter;
    inter as f64 / union as f64
}

/// Like [`iou`] after translating `b` so both centroids coincide (rounded to
/// whole pixels).
pub fn iou_centered(a: &Blob, b: &Blob) -> f64 {
    let (ar, ac) = a.centroid();
    let (br, bc) = b.centroid();
    let shift = ((ar - br).round() as i64, (ac - bc).round() as i64);
    let moved = b
        .clone()
        .with_offset((b.offset.0 + shift.0, b.offset.1 + shift.1));
    iou(a, &moved)
}

/// One blob per label, reduced to its largest 4-connected component, keeping
/// only those with at least `min_area` pixels. Output is in ascending label
/// order.
pub fn extract_labeled_blobs(mask: &InstanceMask, min_area: usize) -> Vec<(u32, Blob)> {
    let mut out = Vec::new();
    for (label, pixels) in mask.instances() {
        let r0 = pixels.iter().map(|p| p.0).min().expect("nonempty instance");
        let r1 = pixels.iter().map(|p| p.0).max().expect("nonempty instance");
        let c0 = pixels.iter().map(|p| p.1).min().expect("nonempty instance");
        let c1 = pixels.iter().map(|p| p.1).max().expect("nonempty instance");
        let mut local = BitGrid::new(r1 - r0 + 1, c1 - c0 + 1);
        for &(r, c) in &pixels {
            local.set(r - r0, c - c0, true);
        }
        let largest = local.largest_component();
        if largest.count() < min_area.max(1) {
            continue;
        }
        let blob = Blob::from_footprint(&largest, (r0 as i64, c0 as i64))
            .expect("largest component is a single nonempty component");
        out.push((label, blob));
    }
    out
}

pub fn extract_blobs(mask: &InstanceMask, min_area: usize) -> Vec<Blob> {
    extract_labeled_blobs(mask, min_area)
        .into_iter()
        .map(|(_, b)| b)
        .collect()
}
