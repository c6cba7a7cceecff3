use super::contour::{Contour, Point};
use super::Blob;
use crate::error::{Error, Result};
use crate::grid::BitGrid;

const MAX_RASTER_PIXELS: usize = 1 << 26;

/// Even-odd scanline fill of a closed polygon sampled at pixel centers.
///
/// A pixel is set when its center is strictly enclosed (even-odd rule,
/// half-open crossing test) or lies within half a pixel of an edge, so a
/// polygon traced through boundary pixel centers reproduces those boundary
/// pixels. Returns the raster and the `(row, col)` of its origin.
pub fn scanline_fill(points: &[Point]) -> Result<(BitGrid, (i64, i64))> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument("polygon needs 3 points".into()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(Error::InvalidArgument(
                "polygon has non-finite point".into(),
            ));
        }
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let (c0, c1) = ((x0 - 0.5).floor() as i64, (x1 + 0.5).ceil() as i64);
    let (r0, r1) = ((y0 - 0.5).floor() as i64, (y1 + 0.5).ceil() as i64);
    let (h, w) = ((r1 - r0 + 1) as usize, (c1 - c0 + 1) as usize);
    if h.saturating_mul(w) > MAX_RASTER_PIXELS {
        return Err(Error::InvalidArgument(format!(
            "polygon spans {h}x{w} pixels"
        )));
    }
    let mut grid = BitGrid::new(h, w);
    let n = points.len();

    let mut xs = Vec::new();
    for row in r0..=r1 {
        let y = row as f64;
        xs.clear();
        for i in 0..n {
            let (a, b) = (points[i], points[(i + 1) % n]);
            if (a.y <= y && y < b.y) || (b.y <= y && y < a.y) {
                xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        xs.sort_by(|a, b| a.total_cmp(b));
        for span in xs.chunks_exact(2) {
            let (from, to) = (span[0].ceil() as i64, span[1].floor() as i64);
            for col in from.max(c0)..=to.min(c1) {
                grid.set((row - r0) as usize, (col - c0) as usize, true);
            }
        }
    }

    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        let (ec0, ec1) = (
            (a.x.min(b.x) - 0.5).floor() as i64,
            (a.x.max(b.x) + 0.5).ceil() as i64,
        );
        let (er0, er1) = (
            (a.y.min(b.y) - 0.5).floor() as i64,
            (a.y.max(b.y) + 0.5).ceil() as i64,
        );
        for row in er0.max(r0)..=er1.min(r1) {
            for col in ec0.max(c0)..=ec1.min(c1) {
                let p = Point::new(col as f64, row as f64);
                if segment_dist_sq(p, a, b) <= 0.25 + 1e-9 {
                    grid.set((row - r0) as usize, (col - c0) as usize, true);
                }
            }
        }
    }
    Ok((grid, (r0, c0)))
}

fn segment_dist_sq(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm_squared()
}

/// Fills the contour, closes it with a 3×3 square, and keeps the largest
/// 4-connected component. Fails when that component has fewer than
/// `min_area` pixels.
pub fn rasterize_and_close(contour: &Contour, min_area: usize) -> Result<Blob> {
    let (filled, origin) = scanline_fill(contour.points())?;
    let kept = filled.close3().largest_component();
    let area = kept.count();
    if area < min_area.max(1) {
        return Err(Error::RejectedBlob { area, min_area });
    }
    Blob::from_footprint(&kept, origin)
}
