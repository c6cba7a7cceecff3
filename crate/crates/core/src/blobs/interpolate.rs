use rand::Rng;
use rayon::prelude::*;

use super::contour::{get_contour_points, Contour, Point};
use super::raster::rasterize_and_close;
use super::register::{register_with, IcpParams};
use super::{Blob, DEFAULT_MIN_BLOB_AREA};
use crate::error::{Error, Result};
use crate::seed;

/// Pointwise blend `alpha·p1 + (1 − alpha)·p2` of two index-paired contours.
pub fn interpolate(p1: &Contour, p2: &Contour, alpha: f64) -> Result<Contour> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha {alpha} outside [0, 1]"
        )));
    }
    if p1.len() != p2.len() {
        return Err(Error::InvalidArgument(format!(
            "contours differ in length: {} vs {}",
            p1.len(),
            p2.len()
        )));
    }
    let points: Vec<Point> = p1
        .points()
        .iter()
        .zip(p2.points())
        .map(|(&a, &b)| a * alpha + b * (1.0 - alpha))
        .collect();
    Contour::new(points)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationParams {
    /// Points per contour (`E`).
    pub contour_points: usize,
    pub min_area: usize,
    pub icp: IcpParams,
    /// Pair draws allowed per generated blob before giving up.
    pub attempts_per_blob: usize,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            contour_points: 64,
            min_area: DEFAULT_MIN_BLOB_AREA,
            icp: IcpParams::default(),
            attempts_per_blob: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedBlob {
    /// Footprint in the coordinate frame of the second parent.
    pub blob: Blob,
    /// Pool indices of the two interpolated blobs (first, second).
    pub parents: (usize, usize),
    /// Weight of the first parent.
    pub alpha: f64,
    /// Pair draws spent, including the successful one.
    pub attempts: usize,
}

/// Generates `count` blobs from `pool`.
///
/// Blob `l` uses its own random stream (`blobgen/l` under `master_seed`):
/// it draws two distinct pool blobs uniformly, draws `alpha` uniformly from
/// `[0, 1)`, registers the first contour onto the second, blends, and
/// rasterizes. A rejected rasterization draws a fresh pair, up to
/// `attempts_per_blob` times. Output is independent of thread count.
///
/// Pool blobs whose contour cannot be traced are never drawn.
pub fn interpolate_blobs(
    pool: &[Blob],
    count: usize,
    params: &GenerationParams,
    master_seed: u64,
) -> Result<Vec<GeneratedBlob>> {
    let contours: Vec<Option<Contour>> = pool
        .par_iter()
        .map(|b| get_contour_points(b, params.contour_points).ok())
        .collect();
    let usable: Vec<usize> = (0..pool.len()).filter(|&i| contours[i].is_some()).collect();
    if usable.len() < pool.len() {
        log::warn!(
            "{} of {} pool blobs have degenerate contours and are skipped",
            pool.len() - usable.len(),
            pool.len()
        );
    }
    if usable.len() < 2 {
        return Err(Error::NotEnoughBlobs {
            required: 2,
            found: usable.len(),
        });
    }

    let results: Vec<Option<GeneratedBlob>> = (0..count)
        .into_par_iter()
        .map(|l| {
            let mut rng = seed::stream_rng(master_seed, seed::BLOBGEN, l as u64);
            for attempt in 1..=params.attempts_per_blob {
                let a = rng.random_range(0..usable.len());
                let mut b = rng.random_range(0..usable.len() - 1);
                if b >= a {
                    b += 1;
                }
                let alpha: f64 = rng.random();
                let (i, j) = (usable[a], usable[b]);
                let c1 = contours[i].as_ref().expect("usable");
                let c2 = contours[j].as_ref().expect("usable");
                let Ok(reg) = register_with(c1, c2, &params.icp) else {
                    continue;
                };
                let Ok(blend) = interpolate(&reg.contour, c2, alpha) else {
                    continue;
                };
                if let Ok(blob) = rasterize_and_close(&blend, params.min_area) {
                    return Some(GeneratedBlob {
                        blob,
                        parents: (i, j),
                        alpha,
                        attempts: attempt,
                    });
                }
            }
            None
        })
        .collect();

    let produced = results.iter().filter(|r| r.is_some()).count();
    if produced < count {
        return Err(Error::RetryBudgetExhausted {
            produced,
            requested: count,
        });
    }
    Ok(results
        .into_iter()
        .map(|r| r.expect("all produced"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blobs::iou_centered;
    use crate::grid::BitGrid;

    fn disk(radius: f64) -> Blob {
        let n = (2.0 * radius) as usize + 3;
        let c = (n / 2) as f64;
        let g = BitGrid::from_fn(n, n, |r, col| {
            let (dy, dx) = (r as f64 - c, col as f64 - c);
            dx * dx + dy * dy <= radius * radius
        });
        Blob::from_footprint(&g, (0, 0)).unwrap()
    }

    fn unit_square(dx: f64) -> Contour {
        let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        // Corners listed twice to meet the minimum contour length.
        let pts = (0..8)
            .map(|k| Point::new(corners[k % 4].0 + dx, corners[k % 4].1))
            .collect();
        Contour::new(pts).unwrap()
    }

    #[test]
    fn endpoints_are_exact() {
        let a = unit_square(0.0);
        let b = unit_square(2.0);
        assert_eq!(interpolate(&a, &b, 1.0).unwrap(), a);
        assert_eq!(interpolate(&a, &b, 0.0).unwrap(), b);
    }

    #[test]
    fn midpoint_is_halfway_shift() {
        let mid = interpolate(&unit_square(0.0), &unit_square(2.0), 0.5).unwrap();
        assert_eq!(mid, unit_square(1.0));
    }

    #[test]
    fn alpha_out_of_range() {
        let a = unit_square(0.0);
        for alpha in [-0.01, 1.01, f64::NAN] {
            assert_eq!(
                interpolate(&a, &a, alpha).unwrap_err().kind(),
                "invalid_argument"
            );
        }
    }

    #[test]
    fn identical_disks_reproduce_the_disk() {
        let pool = vec![disk(9.0), disk(9.0)];
        let out = interpolate_blobs(&pool, 10, &GenerationParams::default(), 3).unwrap();
        assert_eq!(out.len(), 10);
        for g in &out {
            assert!(iou_centered(&pool[0], &g.blob) >= 0.9);
        }
    }

    #[test]
    fn needs_two_usable_blobs() {
        let line = Blob::from_footprint(&BitGrid::filled(1, 40), (0, 0)).unwrap();
        let err =
            interpolate_blobs(&[disk(8.0), line], 3, &GenerationParams::default(), 0).unwrap_err();
        assert_eq!(err.kind(), "not_enough_blobs");
    }

    #[test]
    fn exhausted_budget_reports_progress() {
        let params = GenerationParams {
            min_area: 100_000,
            ..GenerationParams::default()
        };
        let err = interpolate_blobs(&[disk(8.0), disk(10.0)], 4, &params, 0).unwrap_err();
        match err {
            Error::RetryBudgetExhausted {
                produced,
                requested,
            } => {
                assert_eq!((produced, requested), (0, 4))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let pool = vec![disk(6.0), disk(9.0), disk(12.0)];
        let p = GenerationParams::default();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| interpolate_blobs(&pool, 12, &p, 99).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| interpolate_blobs(&pool, 12, &p, 99).unwrap());
        assert_eq!(one, many);
    }
}
