//! Synthetic stand-in for a small annotated nucleus dataset: gray images of
//! elliptical cells (area around 150 px, aspect ratio around 1.35) that
//! cluster according to a Perlin density.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::RasterImage;
use crate::error::Result;
use crate::grid::BitGrid;
use crate::mask::InstanceMask;
use crate::placement::PixelSampler;
use crate::priors::{perlin2d, PerlinParams};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemoParams {
    pub height: usize,
    pub width: usize,
    /// Target number of cells per image.
    pub cells: usize,
    pub mean_area: f64,
    pub sd_area: f64,
    pub mean_aspect_ratio: f64,
    pub sd_aspect_ratio: f64,
}

impl Default for DemoParams {
    fn default() -> Self {
        Self {
            height: 256,
            width: 256,
            cells: 45,
            mean_area: 150.0,
            sd_area: 28.0,
            mean_aspect_ratio: 1.35,
            sd_aspect_ratio: 0.15,
        }
    }
}

/// Filled ellipse with semi-axes `a ≥ b`, rotated by `theta`, centered in a
/// square grid just large enough to hold it.
pub fn ellipse(a: f64, b: f64, theta: f64) -> BitGrid {
    let half = a.ceil() as usize + 1;
    let n = 2 * half + 1;
    let (s, c) = theta.sin_cos();
    let g = BitGrid::from_fn(n, n, |r, col| {
        let dy = r as f64 - half as f64;
        let dx = col as f64 - half as f64;
        let u = (dx * c + dy * s) / a;
        let v = (-dx * s + dy * c) / b;
        u * u + v * v <= 1.0
    });
    let (r0, c0, r1, c1) = g.bounding_box().expect("nonempty ellipse");
    g.crop(r0, c0, r1 - r0 + 1, c1 - c0 + 1)
}

fn random_cell<R: Rng + ?Sized>(p: &DemoParams, rng: &mut R) -> BitGrid {
    let area = Normal::new(p.mean_area, p.sd_area).expect("finite sd");
    let ar = Normal::new(p.mean_aspect_ratio, p.sd_aspect_ratio).expect("finite sd");
    loop {
        let area = area.sample(rng).clamp(0.4 * p.mean_area, 2.0 * p.mean_area);
        let ar: f64 = ar.sample(rng).clamp(1.0, 2.5);
        let a = (area * ar / std::f64::consts::PI).sqrt();
        let b = (area / (ar * std::f64::consts::PI)).sqrt();
        if b >= 2.0 {
            return ellipse(a, b, rng.random_range(0.0..std::f64::consts::PI));
        }
    }
}

/// One image/mask pair. Cells keep at least one background pixel between
/// each other so every instance stays a separate component.
pub fn demo_pair(
    params: &DemoParams,
    master_seed: u64,
    index: u64,
) -> Result<(RasterImage, InstanceMask)> {
    let (h, w) = (params.height, params.width);
    let mut rng = seed::stream_rng(master_seed, seed::DEMO, index);
    let density = perlin2d(
        h,
        w,
        &PerlinParams {
            base_frequency: 3.0,
            octaves: 2,
            persistence: 0.5,
            threshold_shift: -0.1,
            seed: rng.random(),
        },
    )?;
    let sampler = PixelSampler::from_prior(&density);
    let mut mask = InstanceMask::new(h, w);
    let mut label = 0u32;
    for _ in 0..params.cells * 40 {
        if label as usize >= params.cells {
            break;
        }
        let cell = random_cell(params, &mut rng);
        let Some((y, x)) = sampler.sample(&mut rng) else {
            break;
        };
        let top = y as i64 - cell.height() as i64 / 2;
        let left = x as i64 - cell.width() as i64 / 2;
        if top < 1
            || left < 1
            || top as usize + cell.height() + 1 > h
            || left as usize + cell.width() + 1 > w
        {
            continue;
        }
        let (top, left) = (top as usize, left as usize);
        let clear = cell.ones().all(|(r, c)| {
            (-1i64..=1).all(|dr| {
                (-1i64..=1).all(|dc| {
                    let rr = (top + r) as i64 + dr;
                    let cc = (left + c) as i64 + dc;
                    mask.get(rr as usize, cc as usize) == 0
                })
            })
        });
        if !clear {
            continue;
        }
        label += 1;
        for (r, c) in cell.ones() {
            mask.set(top + r, left + c, label);
        }
    }

    let bg = Normal::new(35.0, 6.0).expect("finite sd");
    let fg = Normal::new(175.0, 18.0).expect("finite sd");
    let pixels = mask
        .labels()
        .iter()
        .map(|&l| {
            let v: f64 = if l == 0 {
                bg.sample(&mut rng)
            } else {
                fg.sample(&mut rng)
            };
            v.clamp(0.0, 255.0).round() as u8
        })
        .collect();
    Ok((RasterImage::new(h, w, 1, pixels)?, mask))
}

pub fn demo_dataset(
    count: usize,
    params: &DemoParams,
    master_seed: u64,
) -> Result<Vec<(RasterImage, InstanceMask)>> {
    (0..count as u64)
        .map(|j| demo_pair(params, master_seed, j))
        .collect()
}
