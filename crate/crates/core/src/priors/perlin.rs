//! Improved gradient noise (quintic fade, hashed gradients) and its fractal
//! sum as a density prior.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PriorMap;
use crate::error::{Error, Result};

/// Scale from normalized fractal noise to prior units before shifting.
pub const NOISE_GAIN: f64 = 1.5;

/// Lattice gradient noise with a seeded permutation table.
#[derive(Clone, Debug)]
pub struct GradientNoise {
    perm: [u8; 512],
}

impl GradientNoise {
    pub fn new(seed: u64) -> Self {
        let mut table: Vec<u8> = (0..=255).collect();
        table.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut perm = [0u8; 512];
        for i in 0..512 {
            perm[i] = table[i & 255];
        }
        Self { perm }
    }

    /// Noise value at `(x, y)`; exactly zero on integer lattice points.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let (fx, fy) = (x.floor(), y.floor());
        let xi = (fx as i64 & 255) as usize;
        let yi = (fy as i64 & 255) as usize;
        let (xf, yf) = (x - fx, y - fy);
        let (u, v) = (fade(xf), fade(yf));
        let p = &self.perm;
        let a = p[xi] as usize + yi;
        let b = p[xi + 1] as usize + yi;
        let (aa, ab) = (p[a], p[a + 1]);
        let (ba, bb) = (p[b], p[b + 1]);
        lerp(
            v,
            lerp(u, grad(aa, xf, yf), grad(ba, xf - 1.0, yf)),
            lerp(u, grad(ab, xf, yf - 1.0), grad(bb, xf - 1.0, yf - 1.0)),
        )
    }
}

#[inline]
fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

#[inline]
fn lerp(t: f64, a: f64, b: f64) -> f64 {
    a + t * (b - a)
}

#[inline]
fn grad(hash: u8, x: f64, y: f64) -> f64 {
    match hash & 7 {
        0 => x + y,
        1 => -x + y,
        2 => x - y,
        3 => -x - y,
        4 => x,
        5 => -x,
        6 => y,
        _ => -y,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerlinParams {
    /// Lattice cycles across the image side at the first octave.
    pub base_frequency: f64,
    pub octaves: u32,
    /// Amplitude ratio between successive octaves, in `(0, 1]`.
    pub persistence: f64,
    /// Added to the mapped noise before clamping; negative values carve out
    /// empty regions.
    pub threshold_shift: f64,
    pub seed: u64,
}

impl PerlinParams {
    pub fn validate(&self) -> Result<()> {
        if self.octaves < 1 || self.octaves > 16 {
            return Err(Error::InvalidArgument(format!(
                "octaves must be in 1..=16, got {}",
                self.octaves
            )));
        }
        if !(self.base_frequency > 0.0 && self.base_frequency <= 1024.0) {
            return Err(Error::InvalidArgument(format!(
                "base_frequency must be in (0, 1024], got {}",
                self.base_frequency
            )));
        }
        if !(self.persistence > 0.0 && self.persistence <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "persistence must be in (0, 1], got {}",
                self.persistence
            )));
        }
        if !self.threshold_shift.is_finite() {
            return Err(Error::InvalidArgument(
                "threshold_shift must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let p: PerlinParams = serde_json::from_slice(bytes)?;
        p.validate()?;
        Ok(p)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

/// Fractal sum of `octaves` noise layers (frequency doubling, amplitude
/// `persistence^o`), normalized by the total amplitude, then mapped to
/// `clamp(0.5 + NOISE_GAIN·n + threshold_shift, 0, 1)`.
pub fn perlin2d(height: usize, width: usize, params: &PerlinParams) -> Result<PriorMap> {
    params.validate()?;
    let noise = GradientNoise::new(params.seed);
    let mut values = vec![0.0; height * width];
    let octaves: Vec<(f64, f64, f64)> = (0..params.octaves)
        .map(|o| {
            let freq = params.base_frequency * f64::powi(2.0, o as i32);
            let amp = params.persistence.powi(o as i32);
            // Decorrelate octaves that share the permutation table.
            let shift = 17.31 * o as f64;
            (freq, amp, shift)
        })
        .collect();
    let total_amp: f64 = octaves.iter().map(|o| o.1).sum();
    for r in 0..height {
        for c in 0..width {
            let mut sum = 0.0;
            for &(freq, amp, shift) in &octaves {
                let x = (c as f64 + 0.5) / width as f64 * freq + shift;
                let y = (r as f64 + 0.5) / height as f64 * freq + shift;
                sum += amp * noise.sample(x, y);
            }
            let n = sum / total_amp;
            values[r * width + c] = (0.5 + NOISE_GAIN * n + params.threshold_shift).clamp(0.0, 1.0);
        }
    }
    PriorMap::new(height, width, values)
}
