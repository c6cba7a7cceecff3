use rayon::prelude::*;

use super::perlin::{perlin2d, PerlinParams};
use crate::error::{Error, Result};
use crate::grid::RealGrid;
use crate::mask::InstanceMask;

/// Blur applied to binary foregrounds before comparing them with a prior.
pub const DEFAULT_BLUR_SIGMA: f64 = 8.0;

const HIST_BINS: usize = 20;

/// The candidate grid searched by default: base frequency × octaves ×
/// threshold shift, persistence 0.5, all sharing `seed`.
pub fn default_candidate_grid(seed: u64) -> Vec<PerlinParams> {
    let mut grid = Vec::new();
    for base_frequency in [1.0, 2.0, 4.0, 8.0] {
        for octaves in 1..=3 {
            for step in -5..=3 {
                grid.push(PerlinParams {
                    base_frequency,
                    octaves,
                    persistence: 0.5,
                    threshold_shift: step as f64 / 10.0,
                    seed,
                });
            }
        }
    }
    grid
}

fn histogram(values: &[f64]) -> [f64; HIST_BINS] {
    let mut h = [0.0; HIST_BINS];
    for &v in values {
        let bin = ((v.clamp(0.0, 1.0) * HIST_BINS as f64) as usize).min(HIST_BINS - 1);
        h[bin] += 1.0;
    }
    let n = values.len().max(1) as f64;
    h.iter_mut().for_each(|x| *x /= n);
    h
}

/// Dissimilarity between one candidate realization and one blurred mask:
/// `|mean(a) − mean(b)| + (1 − Σ min(hist_a, hist_b))` over 20 equal bins
/// on `[0, 1]`.
fn dissimilarity(candidate: &[f64], target: &RealGrid, target_hist: &[f64; HIST_BINS]) -> f64 {
    let mean_c = candidate.iter().sum::<f64>() / candidate.len().max(1) as f64;
    let hist_c = histogram(candidate);
    let overlap: f64 = hist_c.iter().zip(target_hist).map(|(a, b)| a.min(*b)).sum();
    (mean_c - target.mean()).abs() + (1.0 - overlap)
}

struct Target {
    blurred: RealGrid,
    hist: [f64; HIST_BINS],
}

fn targets(masks: &[InstanceMask], blur_sigma: f64) -> Result<Vec<Target>> {
    if masks.is_empty() {
        return Err(Error::InvalidArgument("no masks to fit a prior to".into()));
    }
    if masks.iter().all(|m| m.labels().iter().all(|&l| l == 0)) {
        return Err(Error::EmptyMasks);
    }
    Ok(masks
        .iter()
        .map(|m| {
            let blurred = RealGrid::from_bits(&m.foreground()).gaussian_blur(blur_sigma);
            let hist = histogram(&blurred.values);
            Target { blurred, hist }
        })
        .collect())
}

/// Summed dissimilarity of `candidate` against every mask's blurred
/// foreground.
pub fn score_candidate(
    masks: &[InstanceMask],
    candidate: &PerlinParams,
    blur_sigma: f64,
) -> Result<f64> {
    let t = targets(masks, blur_sigma)?;
    score_against(&t, candidate)
}

fn score_against(targets: &[Target], candidate: &PerlinParams) -> Result<f64> {
    let mut total = 0.0;
    for t in targets {
        let map = perlin2d(t.blurred.height, t.blurred.width, candidate)?;
        total += dissimilarity(map.values(), &t.blurred, &t.hist);
    }
    Ok(total)
}

/// Picks the grid candidate whose realizations best match the blurred real
/// foregrounds. Ties go to fewer octaves, then lower base frequency, then
/// earlier grid position. Always returns a grid element.
pub fn fit_prior(
    masks: &[InstanceMask],
    candidates: &[PerlinParams],
    blur_sigma: f64,
) -> Result<PerlinParams> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("empty candidate grid".into()));
    }
    let t = targets(masks, blur_sigma)?;
    let scores: Vec<f64> = candidates
        .par_iter()
        .map(|c| score_against(&t, c))
        .collect::<Result<_>>()?;
    let best = (0..candidates.len())
        .min_by(|&a, &b| {
            scores[a]
                .total_cmp(&scores[b])
                .then(candidates[a].octaves.cmp(&candidates[b].octaves))
                .then(
                    candidates[a]
                        .base_frequency
                        .total_cmp(&candidates[b].base_frequency),
                )
        })
        .expect("nonempty grid");
    log::debug!("prior fit: candidate {best} scored {:.4}", scores[best]);
    Ok(candidates[best].clone())
}
