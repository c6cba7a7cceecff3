use serde::{Deserialize, Serialize};

use crate::blobs::Blob;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlobStats {
    pub count: usize,
    pub median_area: f64,
    pub iqr_area: f64,
    pub median_aspect_ratio: f64,
    pub iqr_aspect_ratio: f64,
}

/// Linear-interpolation quantile of sorted data (position `(n − 1)·p`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Major over minor axis of the second-moment ellipse. Each pixel is
/// treated as a unit square, adding 1/12 to both variances, so the ratio is
/// finite for lines and exactly 1 for a single pixel.
pub fn aspect_ratio(blob: &Blob) -> f64 {
    let n = blob.area() as f64;
    let (mut sr, mut sc) = (0.0, 0.0);
    for (r, c) in blob.footprint().ones() {
        sr += r as f64;
        sc += c as f64;
    }
    let (mr, mc) = (sr / n, sc / n);
    let (mut vrr, mut vcc, mut vrc) = (0.0, 0.0, 0.0);
    for (r, c) in blob.footprint().ones() {
        let (dr, dc) = (r as f64 - mr, c as f64 - mc);
        vrr += dr * dr;
        vcc += dc * dc;
        vrc += dr * dc;
    }
    let (a, b, c) = (vrr / n + 1.0 / 12.0, vcc / n + 1.0 / 12.0, vrc / n);
    let mean = 0.5 * (a + b);
    let spread = (0.25 * (a - b) * (a - b) + c * c).sqrt();
    ((mean + spread) / (mean - spread)).sqrt()
}

fn median_iqr(mut v: Vec<f64>) -> (f64, f64) {
    v.sort_by(f64::total_cmp);
    (quantile(&v, 0.5), quantile(&v, 0.75) - quantile(&v, 0.25))
}

pub fn blob_stats(blobs: &[Blob]) -> Result<BlobStats> {
    if blobs.is_empty() {
        return Err(Error::InvalidArgument(
            "blob statistics need at least one blob".into(),
        ));
    }
    let (median_area, iqr_area) = median_iqr(blobs.iter().map(|b| b.area() as f64).collect());
    let (median_aspect_ratio, iqr_aspect_ratio) =
        median_iqr(blobs.iter().map(aspect_ratio).collect());
    Ok(BlobStats {
        count: blobs.len(),
        median_area,
        iqr_area,
        median_aspect_ratio,
        iqr_aspect_ratio,
    })
}
