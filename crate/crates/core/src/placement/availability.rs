use crate::blobs::Blob;
use crate::grid::BitGrid;

/// Locations still open for placement. Bits only ever go from 1 to 0
/// during a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvailabilityMask {
    grid: BitGrid,
}

impl AvailabilityMask {
    /// Everything available.
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            grid: BitGrid::filled(height, width),
        }
    }

    pub fn from_grid(grid: BitGrid) -> Self {
        Self { grid }
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn grid(&self) -> &BitGrid {
        &self.grid
    }

    #[inline]
    pub fn is_available(&self, row: usize, col: usize) -> bool {
        self.grid.get(row, col)
    }

    pub fn available_count(&self) -> usize {
        self.grid.count()
    }

    /// Marks a pixel unavailable; returns whether it was available before.
    fn take(&mut self, row: usize, col: usize) -> bool {
        let was = self.grid.get(row, col);
        self.grid.set(row, col, false);
        was
    }
}

/// Top-left `(row, col)` of `blob` when its bounding-box center sits at
/// `(y, x)`. For even sizes the center rounds toward the top-left.
pub fn anchor(blob: &Blob, y: usize, x: usize) -> (i64, i64) {
    (
        y as i64 - (blob.height() as i64 - 1) / 2,
        x as i64 - (blob.width() as i64 - 1) / 2,
    )
}

/// True iff the footprint centered at `(y, x)` is fully inside the image and
/// covers only available pixels.
pub fn can_host(a: &AvailabilityMask, blob: &Blob, y: usize, x: usize) -> bool {
    let (top, left) = anchor(blob, y, x);
    if top < 0
        || left < 0
        || top as usize + blob.height() > a.height()
        || left as usize + blob.width() > a.width()
    {
        return false;
    }
    let (top, left) = (top as usize, left as usize);
    blob.footprint()
        .ones()
        .all(|(r, c)| a.is_available(top + r, left + c))
}

/// Zeroes the footprint centered at `(y, x)` and the disk
/// `(i − y)² + (j − x)² ≤ z²`, clipped to the image. Returns the flat
/// indices that flipped from available to unavailable.
pub fn update_available(
    a: &mut AvailabilityMask,
    blob: &Blob,
    y: usize,
    x: usize,
    z: f64,
) -> Vec<usize> {
    let (h, w) = (a.height() as i64, a.width() as i64);
    let mut flipped = Vec::new();
    let (top, left) = anchor(blob, y, x);
    for (r, c) in blob.footprint().ones() {
        let (rr, cc) = (top + r as i64, left + c as i64);
        if (0..h).contains(&rr) && (0..w).contains(&cc) && a.take(rr as usize, cc as usize) {
            flipped.push(rr as usize * w as usize + cc as usize);
        }
    }
    let z = z.max(0.0);
    let z2 = z * z;
    let reach = z.floor() as i64;
    let (y, x) = (y as i64, x as i64);
    for rr in (y - reach).max(0)..=(y + reach).min(h - 1) {
        let dy = (rr - y) as f64;
        let span = (z2 - dy * dy).max(0.0).sqrt().floor() as i64;
        for cc in (x - span).max(0)..=(x + span).min(w - 1) {
            let dx = (cc - x) as f64;
            if dx * dx + dy * dy <= z2 && a.take(rr as usize, cc as usize) {
                flipped.push(rr as usize * w as usize + cc as usize);
            }
        }
    }
    flipped
}
