use crate::error::{Error, Result};
use crate::grid::RealGrid;
use crate::mask::InstanceMask;
use crate::priors::PriorMap;

/// Pearson correlation between the Gaussian-blurred foreground of `mask`
/// and `prior`. Defined as 0 when either side has zero variance.
pub fn prior_adherence(mask: &InstanceMask, prior: &PriorMap, blur_sigma: f64) -> Result<f64> {
    if mask.height() != prior.height() || mask.width() != prior.width() {
        return Err(Error::DimensionMismatch(format!(
            "mask {}x{} vs prior {}x{}",
            mask.height(),
            mask.width(),
            prior.height(),
            prior.width()
        )));
    }
    let density = RealGrid::from_bits(&mask.foreground()).gaussian_blur(blur_sigma);
    Ok(pearson(&density.values, prior.values()))
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    if a.is_empty() {
        return 0.0;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    // Relative floor: blurred constants carry rounding noise.
    let floor = 1e-24 * n;
    if va <= floor || vb <= floor {
        return 0.0;
    }
    (cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk_mask(h: usize, w: usize, centers: &[(f64, f64)], radius: f64) -> InstanceMask {
        let mut m = InstanceMask::new(h, w);
        for (k, &(cy, cx)) in centers.iter().enumerate() {
            for r in 0..h {
                for c in 0..w {
                    if (r as f64 - cy).powi(2) + (c as f64 - cx).powi(2) <= radius * radius {
                        m.set(r, c, k as u32 + 1);
                    }
                }
            }
        }
        m
    }

    #[test]
    fn self_correlation_is_one() {
        let m = disk_mask(40, 40, &[(10.0, 10.0), (28.0, 30.0)], 5.0);
        let density = RealGrid::from_bits(&m.foreground()).gaussian_blur(3.0);
        let prior = PriorMap::new(40, 40, density.values).unwrap();
        let a = prior_adherence(&m, &prior, 3.0).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_prior_scores_zero() {
        let m = disk_mask(20, 20, &[(10.0, 10.0)], 4.0);
        let prior = PriorMap::new(20, 20, vec![0.4; 400]).unwrap();
        assert_eq!(prior_adherence(&m, &prior, 2.0).unwrap(), 0.0);
        assert_eq!(
            prior_adherence(&InstanceMask::new(20, 20), &PriorMap::uniform(20, 20), 2.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn checkerboard_favours_blobs_on_high_cells() {
        // 16-px cells: high where (row/16 + col/16) is even.
        let (h, w, cell) = (64, 64, 16);
        let values = (0..h * w)
            .map(|i| {
                if ((i / w) / cell + (i % w) / cell) % 2 == 0 {
                    1.0
                } else {
                    0.1
                }
            })
            .collect();
        let prior = PriorMap::new(h, w, values).unwrap();
        let mut high = Vec::new();
        let mut everywhere = Vec::new();
        for br in 0..4 {
            for bc in 0..4 {
                let center = ((br * cell) as f64 + 7.5, (bc * cell) as f64 + 7.5);
                if (br + bc) % 2 == 0 {
                    high.push(center);
                }
                if everywhere.len() < 8 {
                    everywhere.push(center);
                }
            }
        }
        let on_high = prior_adherence(&disk_mask(h, w, &high, 5.0), &prior, 4.0).unwrap();
        let uniform = prior_adherence(&disk_mask(h, w, &everywhere, 5.0), &prior, 4.0).unwrap();
        assert!(on_high > uniform, "{on_high} vs {uniform}");
        assert!(on_high > 0.5);
    }

    #[test]
    fn dimension_mismatch() {
        let err =
            prior_adherence(&InstanceMask::new(4, 4), &PriorMap::uniform(4, 5), 1.0).unwrap_err();
        assert_eq!(err.kind(), "dimension_mismatch");
    }
}
