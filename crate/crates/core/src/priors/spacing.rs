use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::InstanceMask;

/// Empirical distribution of gaps between neighbouring blobs, in pixels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpacing", into = "RawSpacing")]
pub struct SpacingDist {
    samples: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpacing {
    samples: Vec<f64>,
}

impl TryFrom<RawSpacing> for SpacingDist {
    type Error = Error;
    fn try_from(raw: RawSpacing) -> Result<Self> {
        SpacingDist::new(raw.samples)
    }
}

impl From<SpacingDist> for RawSpacing {
    fn from(s: SpacingDist) -> Self {
        RawSpacing { samples: s.samples }
    }
}

impl SpacingDist {
    /// Sorts the samples; fails if empty, negative, or non-finite.
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument(
                "spacing distribution is empty".into(),
            ));
        }
        if let Some(v) = samples.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "invalid spacing sample {v}"
            )));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn constant(z: f64) -> Result<Self> {
        Self::new(vec![z])
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Inverse CDF at `u ∈ [0, 1]`, interpolating linearly between order
    /// statistics (`u = 0` is the minimum, `u = 1` the maximum).
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.samples.len();
        let pos = u.clamp(0.0, 1.0) * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let t = pos - lo as f64;
        self.samples[lo] + t * (self.samples[hi] - self.samples[lo])
    }

    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }
}

/// One draw of the spacing offset `z`.
pub fn sample_spacing<R: Rng + ?Sized>(s: &SpacingDist, rng: &mut R) -> f64 {
    s.quantile(rng.random::<f64>())
}

struct Instance {
    boundary: Vec<(i64, i64)>,
    bbox: (i64, i64, i64, i64),
}

fn instances_with_boundaries(mask: &InstanceMask) -> Vec<Instance> {
    let (h, w) = (mask.height() as i64, mask.width() as i64);
    let label_at = |r: i64, c: i64| {
        if r < 0 || c < 0 || r >= h || c >= w {
            0
        } else {
            mask.get(r as usize, c as usize)
        }
    };
    mask.instances()
        .into_iter()
        .map(|(label, pixels)| {
            let mut boundary = Vec::new();
            let mut bbox = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
            for (r, c) in pixels {
                let (r, c) = (r as i64, c as i64);
                bbox = (bbox.0.min(r), bbox.1.min(c), bbox.2.max(r), bbox.3.max(c));
                let edge = [(-1, 0), (1, 0), (0, -1), (0, 1)]
                    .iter()
                    .any(|(dr, dc)| label_at(r + dr, c + dc) != label);
                if edge {
                    boundary.push((r, c));
                }
            }
            Instance { boundary, bbox }
        })
        .collect()
}

fn bbox_gap_sq(a: (i64, i64, i64, i64), b: (i64, i64, i64, i64)) -> i64 {
    let dr = (b.0 - a.2).max(a.0 - b.2).max(0);
    let dc = (b.1 - a.3).max(a.1 - b.3).max(0);
    dr * dr + dc * dc
}

/// Boundary-to-boundary gap from every instance to its nearest neighbour in
/// the same mask, pooled over all masks with at least two instances.
///
/// The gap between two instances is the smallest pixel-center distance
/// between them minus one, so 4-adjacent instances are 0 apart and two
/// pixels ten columns apart have a gap of 9.
pub fn fit_spacing(masks: &[InstanceMask]) -> Result<SpacingDist> {
    let mut samples = Vec::new();
    for mask in masks {
        let inst = instances_with_boundaries(mask);
        if inst.len() < 2 {
            continue;
        }
        for (i, a) in inst.iter().enumerate() {
            let mut order: Vec<(i64, usize)> = inst
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, b)| (bbox_gap_sq(a.bbox, b.bbox), j))
                .collect();
            order.sort_unstable();
            let mut best = i64::MAX;
            for (lower, j) in order {
                if lower >= best {
                    break;
                }
                for &(pr, pc) in &a.boundary {
                    for &(qr, qc) in &inst[j].boundary {
                        let d = (pr - qr).pow(2) + (pc - qc).pow(2);
                        best = best.min(d);
                    }
                }
            }
            samples.push(((best as f64).sqrt() - 1.0).max(0.0));
        }
    }
    if samples.is_empty() {
        return Err(Error::NoSpacingSamples);
    }
    SpacingDist::new(samples)
}
