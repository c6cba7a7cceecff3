use super::RasterImage;
use crate::error::{Error, Result};
use crate::mask::InstanceMask;

#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    /// Row-major position in the tile grid.
    pub index: usize,
    pub grid_row: usize,
    pub grid_col: usize,
    pub image: RasterImage,
}

/// Number of whole tiles along each axis; partial border tiles are dropped.
pub fn tile_grid(height: usize, width: usize, tile_size: usize) -> Result<(usize, usize)> {
    if tile_size == 0 || tile_size > height.min(width) {
        return Err(Error::InvalidArgument(format!(
            "tile size {tile_size} must be in 1..={} for a {height}x{width} image",
            height.min(width)
        )));
    }
    Ok((height / tile_size, width / tile_size))
}

/// Non-overlapping `tile_size²` tiles in row-major order.
pub fn tile_image(image: &RasterImage, tile_size: usize) -> Result<Vec<Tile>> {
    let (rows, cols) = tile_grid(image.height(), image.width(), tile_size)?;
    Ok((0..rows * cols)
        .map(|index| {
            let (grid_row, grid_col) = (index / cols, index % cols);
            Tile {
                index,
                grid_row,
                grid_col,
                image: image.crop(
                    grid_row * tile_size,
                    grid_col * tile_size,
                    tile_size,
                    tile_size,
                ),
            }
        })
        .collect())
}

/// Tile index along one axis for a centroid given as `sum / count` of pixel
/// indices. Pixel `i` spans `[i, i + 1)`, so the centroid sits at
/// `sum / count + 0.5` and a tile border at a multiple of `tile_size`. A
/// centroid exactly on a border goes to the lower tile. Exact integer
/// arithmetic keeps the border test free of rounding.
fn axis_tile(sum: u128, count: u128, tile_size: u128) -> usize {
    let num = 2 * sum + count;
    let den = 2 * count * tile_size;
    let k = num / den;
    if k > 0 && num.is_multiple_of(den) {
        (k - 1) as usize
    } else {
        k as usize
    }
}

/// Instances per tile (row-major), attributing each instance to the tile
/// holding its pixel centroid. Instances centered in the discarded border
/// strip count for no tile.
pub fn tile_counts(mask: &InstanceMask, tile_size: usize) -> Result<Vec<usize>> {
    let (rows, cols) = tile_grid(mask.height(), mask.width(), tile_size)?;
    let mut counts = vec![0usize; rows * cols];
    for pixels in mask.instances().values() {
        let n = pixels.len() as u128;
        let sr: u128 = pixels.iter().map(|&(r, _)| r as u128).sum();
        let sc: u128 = pixels.iter().map(|&(_, c)| c as u128).sum();
        let (tr, tc) = (
            axis_tile(sr, n, tile_size as u128),
            axis_tile(sc, n, tile_size as u128),
        );
        if tr < rows && tc < cols {
            counts[tr * cols + tc] += 1;
        }
    }
    Ok(counts)
}

/// Index of the count closest to `instances`; lowest index on ties.
/// `None` for an empty list.
pub fn select_reference(counts: &[usize], instances: usize) -> Option<usize> {
    counts
        .iter()
        .enumerate()
        .min_by_key(|&(i, &c)| (c.abs_diff(instances), i))
        .map(|(i, _)| i)
}
