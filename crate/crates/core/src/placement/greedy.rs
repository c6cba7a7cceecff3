use std::collections::VecDeque;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::availability::{anchor, can_host, update_available, AvailabilityMask};
use super::log::{PlacementLog, PlacementRecord};
use super::sampler::PixelSampler;
use crate::blobs::Blob;
use crate::error::{Error, Result};
use crate::mask::InstanceMask;
use crate::priors::{sample_spacing, PriorMap, SpacingDist};

/// When a greedy run stops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Stop the first time no remaining blob fits at the sampled pixel.
    FirstMiss,
    /// Drop a pixel that cannot host any remaining blob from the sampling
    /// distribution and draw again; stop once no mass is left. Availability
    /// and the pool only shrink, so such a pixel can never host a blob
    /// later in the run, and this equals sampling from the pixels that can
    /// still host one.
    #[default]
    Exhaust,
}

impl FromStr for Termination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first_miss" => Ok(Self::FirstMiss),
            "exhaust" => Ok(Self::Exhaust),
            _ => Err(Error::InvalidArgument(format!(
                "unknown termination {s:?}, expected \"exhaust\" or \"first_miss\""
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    pub mask: InstanceMask,
    pub log: PlacementLog,
}

fn stamp(mask: &mut InstanceMask, blob: &Blob, y: usize, x: usize, label: u32) {
    let (top, left) = anchor(blob, y, x);
    for (r, c) in blob.footprint().ones() {
        mask.set(top as usize + r, left as usize + c, label);
    }
}

/// Greedy placement with [`Termination::Exhaust`].
pub fn greedy_placement<R: Rng + ?Sized>(
    prior: &PriorMap,
    pool: &[Blob],
    spacing: &SpacingDist,
    rng: &mut R,
) -> Placement {
    greedy_placement_with(prior, pool, spacing, rng, Termination::default())
}

/// Greedy placement.
///
/// Starting from an empty mask and full availability `A`, each round draws
/// a pixel from `prior · A` (normalized), draws an exclusion radius `z` from
/// `spacing`, and scans the remaining pool (shuffled once up front) for the
/// first blob that fits there. The blob is stamped with the next label and
/// its footprint plus the disk of radius `z` around the drawn pixel become
/// unavailable. A draw where nothing fits is handled per `termination`. The
/// run also ends when the pool is empty or no prior mass remains available.
pub fn greedy_placement_with<R: Rng + ?Sized>(
    prior: &PriorMap,
    pool: &[Blob],
    spacing: &SpacingDist,
    rng: &mut R,
    termination: Termination,
) -> Placement {
    let (h, w) = (prior.height(), prior.width());
    let mut mask = InstanceMask::new(h, w);
    let mut log = PlacementLog::default();
    let mut avail = AvailabilityMask::new(h, w);
    let mut sampler = PixelSampler::from_prior(prior);

    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(rng);

    while !order.is_empty() {
        let Some((y, x)) = sampler.sample(rng) else {
            break;
        };
        let z = sample_spacing(spacing, rng);
        let Some(pos) = order.iter().position(|&i| can_host(&avail, &pool[i], y, x)) else {
            match termination {
                Termination::FirstMiss => break,
                Termination::Exhaust => {
                    sampler.remove(y * w + x);
                    continue;
                }
            }
        };
        let id = order.remove(pos);
        let label = log.len() as u32 + 1;
        stamp(&mut mask, &pool[id], y, x, label);
        for idx in update_available(&mut avail, &pool[id], y, x, z) {
            sampler.remove(idx);
        }
        log.records.push(PlacementRecord {
            label,
            blob_id: id,
            scan_position: pos,
            y,
            x,
            z,
        });
    }
    Placement { mask, log }
}

/// Baseline: proposals come from the normalized prior alone, ignoring
/// availability. Each of up to `attempts` rounds proposes a pixel and a
/// radius for the blob at the head of the (shuffled) queue. The blob is
/// placed if the proposed pixel is still available and the footprint fits,
/// so disjointness and exclusion hold as in [`greedy_placement`]; otherwise
/// it moves to the back of the queue.
pub fn random_weighted_placement<R: Rng + ?Sized>(
    prior: &PriorMap,
    pool: &[Blob],
    spacing: &SpacingDist,
    rng: &mut R,
    attempts: usize,
) -> Placement {
    let (h, w) = (prior.height(), prior.width());
    let mut mask = InstanceMask::new(h, w);
    let mut log = PlacementLog::default();
    let mut avail = AvailabilityMask::new(h, w);
    let sampler = PixelSampler::from_prior(prior);

    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(rng);
    let mut queue: VecDeque<usize> = order.into();

    for _ in 0..attempts {
        let Some(&id) = queue.front() else {
            break;
        };
        let Some((y, x)) = sampler.sample(rng) else {
            break;
        };
        let z = sample_spacing(spacing, rng);
        queue.pop_front();
        if avail.is_available(y, x) && can_host(&avail, &pool[id], y, x) {
            let label = log.len() as u32 + 1;
            stamp(&mut mask, &pool[id], y, x, label);
            update_available(&mut avail, &pool[id], y, x, z);
            log.records.push(PlacementRecord {
                label,
                blob_id: id,
                scan_position: 0,
                y,
                x,
                z,
            });
        } else {
            queue.push_back(id);
        }
    }
    Placement { mask, log }
}
