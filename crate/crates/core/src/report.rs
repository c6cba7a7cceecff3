//! Evaluation harnesses: real-vs-generated blob statistics with prior
//! adherence, and a seeded greedy-vs-baseline placement comparison.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::blobs::{extract_blobs, Blob, BlobPool};
use crate::codec;
use crate::dataset::{blob_stats, BlobStats, DatasetManifest};
use crate::error::Result;
use crate::mask::InstanceMask;
use crate::pipeline::{prior_from_spec, real_prefix};
use crate::placement::{
    greedy_placement_with, prior_adherence, random_weighted_placement, Termination,
};
use crate::priors::{PriorMap, SpacingDist};
use crate::seed;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdherenceRow {
    pub mask: String,
    pub instances: usize,
    pub greedy: f64,
    pub baseline_instances: usize,
    pub baseline: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    pub real: BlobStats,
    pub generated: BlobStats,
    pub adherence: Vec<AdherenceRow>,
    pub mean_greedy_adherence: f64,
    pub mean_baseline_adherence: f64,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Compares blobs in `real_masks` with blobs in the generated masks of the
/// dataset at `dataset_dir`, and scores each generated mask's adherence to
/// its prior next to a random weighted baseline run on the same prior,
/// pool, and spacing (one attempt per pool blob, `baseline/n` stream).
pub fn run_stats(
    real_masks: &[InstanceMask],
    dataset_dir: &Path,
    min_area: usize,
    blur_sigma: f64,
) -> Result<StatsReport> {
    let manifest = DatasetManifest::load(dataset_dir)?;
    let real_blobs: Vec<Blob> = real_masks
        .iter()
        .flat_map(|m| extract_blobs(m, min_area))
        .collect();
    let pool = BlobPool::load(&dataset_dir.join(&manifest.blob_pool))?;
    let generated_pool = &pool.blobs[real_prefix(&pool)..];
    let spacing =
        SpacingDist::from_json_slice(&codec::read_file(&dataset_dir.join(&manifest.spacing))?)?;

    let rows: Vec<(AdherenceRow, Vec<Blob>)> = manifest
        .entries
        .par_iter()
        .enumerate()
        .map(|(n, e)| {
            let mask = InstanceMask::load(&dataset_dir.join(&e.generated_mask_path))?;
            let prior = prior_from_spec(&e.prior_params, dataset_dir, mask.height(), mask.width())?;
            let mut rng = seed::stream_rng(manifest.master_seed, seed::BASELINE, n as u64);
            let base = random_weighted_placement(
                &prior,
                generated_pool,
                &spacing,
                &mut rng,
                generated_pool.len(),
            );
            let row = AdherenceRow {
                mask: e.generated_mask_path.clone(),
                instances: mask.instance_count(),
                greedy: prior_adherence(&mask, &prior, blur_sigma)?,
                baseline_instances: base.mask.instance_count(),
                baseline: prior_adherence(&base.mask, &prior, blur_sigma)?,
            };
            Ok((row, extract_blobs(&mask, 1)))
        })
        .collect::<Result<_>>()?;

    let generated_blobs: Vec<Blob> = rows.iter().flat_map(|(_, b)| b.iter().cloned()).collect();
    let adherence: Vec<AdherenceRow> = rows.into_iter().map(|(r, _)| r).collect();
    Ok(StatsReport {
        real: blob_stats(&real_blobs)?,
        generated: blob_stats(&generated_blobs)?,
        mean_greedy_adherence: mean(adherence.iter().map(|r| r.greedy)),
        mean_baseline_adherence: mean(adherence.iter().map(|r| r.baseline)),
        adherence,
    })
}

impl StatsReport {
    pub fn to_table(&self) -> String {
        let mut t = String::new();
        let _ = writeln!(t, "{:<22}{:>12}{:>12}", "", "real", "generated");
        let _ = writeln!(
            t,
            "{:<22}{:>12}{:>12}",
            "blobs", self.real.count, self.generated.count
        );
        for (name, a, b) in [
            (
                "median area (px)",
                self.real.median_area,
                self.generated.median_area,
            ),
            ("IQR area (px)", self.real.iqr_area, self.generated.iqr_area),
            (
                "median aspect ratio",
                self.real.median_aspect_ratio,
                self.generated.median_aspect_ratio,
            ),
            (
                "IQR aspect ratio",
                self.real.iqr_aspect_ratio,
                self.generated.iqr_aspect_ratio,
            ),
        ] {
            let _ = writeln!(t, "{name:<22}{a:>12.3}{b:>12.3}");
        }
        let _ = writeln!(t);
        let _ = writeln!(
            t,
            "{:<28}{:>10}{:>10}{:>10}{:>10}",
            "mask", "blobs", "greedy", "baseline", "blobs"
        );
        for r in &self.adherence {
            let _ = writeln!(
                t,
                "{:<28}{:>10}{:>10.3}{:>10.3}{:>10}",
                r.mask, r.instances, r.greedy, r.baseline, r.baseline_instances
            );
        }
        let _ = writeln!(
            t,
            "{:<28}{:>10}{:>10.3}{:>10.3}",
            "mean", "", self.mean_greedy_adherence, self.mean_baseline_adherence
        );
        t
    }
}

/// One-sided sign test: probability of at least `wins` successes in
/// `wins + losses` fair coin flips.
pub fn sign_test(wins: usize, losses: usize) -> f64 {
    let n = wins + losses;
    if n == 0 {
        return 1.0;
    }
    // Binomial pmf computed in log space to stay finite for large n.
    let ln_choose =
        |k: usize| -> f64 { (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum() };
    let ln_half_n = n as f64 * 0.5f64.ln();
    (wins..=n)
        .map(|k| (ln_choose(k) + ln_half_n).exp())
        .sum::<f64>()
        .min(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRun {
    pub seed_index: usize,
    pub greedy_instances: usize,
    pub greedy_adherence: f64,
    pub baseline_instances: usize,
    pub baseline_adherence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub runs: Vec<ComparisonRun>,
    pub mean_greedy_adherence: f64,
    pub mean_baseline_adherence: f64,
    /// Runs where greedy adherence beat the baseline, and the reverse.
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    pub p_value: f64,
}

/// Runs greedy placement and the random weighted baseline side by side for
/// `runs` seeds. Run `s` uses the prior `prior_for(s)` and the streams
/// `placement/s` and `baseline/s` under `master_seed`; the baseline gets
/// `baseline_attempts` proposals.
#[allow(clippy::too_many_arguments)]
pub fn compare_placement<F>(
    prior_for: F,
    pool: &[Blob],
    spacing: &SpacingDist,
    runs: usize,
    master_seed: u64,
    blur_sigma: f64,
    baseline_attempts: usize,
    termination: Termination,
) -> Result<ComparisonReport>
where
    F: Fn(usize) -> Result<PriorMap> + Sync,
{
    let runs: Vec<ComparisonRun> = (0..runs)
        .into_par_iter()
        .map(|s| {
            let prior = prior_for(s)?;
            let mut rng = seed::stream_rng(master_seed, seed::PLACEMENT, s as u64);
            let g = greedy_placement_with(&prior, pool, spacing, &mut rng, termination);
            let mut rng = seed::stream_rng(master_seed, seed::BASELINE, s as u64);
            let b = random_weighted_placement(&prior, pool, spacing, &mut rng, baseline_attempts);
            Ok(ComparisonRun {
                seed_index: s,
                greedy_instances: g.log.len(),
                greedy_adherence: prior_adherence(&g.mask, &prior, blur_sigma)?,
                baseline_instances: b.log.len(),
                baseline_adherence: prior_adherence(&b.mask, &prior, blur_sigma)?,
            })
        })
        .collect::<Result<_>>()?;
    let wins = runs
        .iter()
        .filter(|r| r.greedy_adherence > r.baseline_adherence)
        .count();
    let losses = runs
        .iter()
        .filter(|r| r.greedy_adherence < r.baseline_adherence)
        .count();
    Ok(ComparisonReport {
        mean_greedy_adherence: mean(runs.iter().map(|r| r.greedy_adherence)),
        mean_baseline_adherence: mean(runs.iter().map(|r| r.baseline_adherence)),
        wins,
        losses,
        ties: runs.len() - wins - losses,
        p_value: sign_test(wins, losses),
        runs,
    })
}
