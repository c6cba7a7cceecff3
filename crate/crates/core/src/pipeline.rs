//! End-to-end generation: real pairs in, dataset tree out.
//!
//! ```text
//! out/
//!   manifest.json
//!   spacing.json
//!   prior.json | prior.png     (fitted or fixed Perlin template | expert map)
//!   blobs/                     real blobs first, then generated ones
//!   tiles/tile_00000.png ...   reference tiles cut from the real images
//!   masks/mask_00000.png ...   16-bit label masks
//!   content/content_00000.png  flattened masks
//!   logs/placement_00000.jsonl
//! ```

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::blobs::{
    extract_labeled_blobs, interpolate_blobs, BlobPool, GenerationParams, Provenance,
};
use crate::codec;
use crate::config::{GenConfig, PriorSource, SpacingSource};
use crate::dataset::{
    flatten, select_reference, tile_counts, tile_image, DatasetCounts, DatasetManifest,
    ManifestEntry, PriorSpec, RasterImage, TileRecord, MANIFEST_SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::mask::InstanceMask;
use crate::placement::{greedy_placement_with, PlacementLog};
use crate::priors::{
    default_candidate_grid, fit_prior, fit_spacing, perlin2d, PerlinParams, PriorMap, SpacingDist,
};
use crate::seed;

/// One annotated real image.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPair {
    /// Label used in blob provenance, usually the mask file name.
    pub name: String,
    pub image: RasterImage,
    pub mask: InstanceMask,
}

/// Real blobs from named masks, in input order then label order.
pub fn extract_pool<'a>(
    masks: impl IntoIterator<Item = (&'a str, &'a InstanceMask)>,
    min_area: usize,
) -> BlobPool {
    let mut pool = BlobPool::default();
    for (name, mask) in masks {
        for (label, blob) in extract_labeled_blobs(mask, min_area) {
            pool.push(
                blob,
                Provenance::Real {
                    source: name.to_string(),
                    label,
                },
            );
        }
    }
    pool
}

/// Appends `count` interpolated blobs to a pool of real blobs. Parents
/// index the real part.
pub fn grow_pool(
    real: &BlobPool,
    count: usize,
    params: &GenerationParams,
    master_seed: u64,
) -> Result<BlobPool> {
    let generated = interpolate_blobs(&real.blobs, count, params, master_seed)?;
    let mut pool = real.clone();
    for g in generated {
        pool.push(
            g.blob,
            Provenance::Interpolated {
                parents: [g.parents.0, g.parents.1],
                alpha: g.alpha,
            },
        );
    }
    Ok(pool)
}

/// Number of real blobs at the head of a pool written by [`grow_pool`].
pub fn real_prefix(pool: &BlobPool) -> usize {
    pool.provenance
        .iter()
        .take_while(|p| matches!(p, Provenance::Real { .. }))
        .count()
}

/// The per-image prior recipe.
#[derive(Clone, Debug, PartialEq)]
pub enum PriorModel {
    /// Each image gets a fresh noise seed from the `prior` stream.
    Perlin(PerlinParams),
    /// Fixed map plus the encoded file it came from.
    Map(PriorMap, Vec<u8>),
    Uniform,
}

pub const PRIOR_PNG: &str = "prior.png";
pub const PRIOR_JSON: &str = "prior.json";
pub const SPACING_JSON: &str = "spacing.json";

pub fn prior_seed(master_seed: u64, n: u64) -> u64 {
    seed::stream_seed(master_seed, seed::PRIOR, n)
}

pub fn placement_seed(master_seed: u64, n: u64) -> u64 {
    seed::stream_seed(master_seed, seed::PLACEMENT, n)
}

/// Generator driving placement for an entry with the given seed.
pub fn placement_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

impl PriorModel {
    pub fn from_config(cfg: &GenConfig, masks: &[InstanceMask]) -> Result<Self> {
        Ok(match &cfg.prior {
            PriorSource::Fitted => {
                let grid = default_candidate_grid(seed::stream_seed(cfg.seed, seed::PRIOR_FIT, 0));
                let best = fit_prior(masks, &grid, cfg.blur_sigma)?;
                log::info!(
                    "fitted prior: base_frequency {} octaves {} threshold_shift {:.1}",
                    best.base_frequency,
                    best.octaves,
                    best.threshold_shift
                );
                PriorModel::Perlin(best)
            }
            PriorSource::Fixed {
                base_frequency,
                octaves,
                persistence,
                threshold_shift,
            } => PriorModel::Perlin(PerlinParams {
                base_frequency: *base_frequency,
                octaves: *octaves,
                persistence: *persistence,
                threshold_shift: *threshold_shift,
                seed: 0,
            }),
            PriorSource::File { path } => {
                let bytes = codec::read_file(path)?;
                let map = PriorMap::decode_png(&bytes)?;
                if map.height() != cfg.height || map.width() != cfg.width {
                    return Err(Error::DimensionMismatch(format!(
                        "prior {} is {}x{} but output images are {}x{}",
                        path.display(),
                        map.height(),
                        map.width(),
                        cfg.height,
                        cfg.width
                    )));
                }
                PriorModel::Map(map, bytes)
            }
            PriorSource::Uniform => PriorModel::Uniform,
        })
    }

    /// Prior for image `n` and its manifest description.
    pub fn realize(
        &self,
        master_seed: u64,
        n: u64,
        height: usize,
        width: usize,
    ) -> Result<(PriorMap, PriorSpec)> {
        Ok(match self {
            PriorModel::Perlin(p) => {
                let params = p.with_seed(prior_seed(master_seed, n));
                (
                    perlin2d(height, width, &params)?,
                    PriorSpec::Perlin { params },
                )
            }
            PriorModel::Map(map, _) => (
                map.clone(),
                PriorSpec::File {
                    path: PRIOR_PNG.into(),
                },
            ),
            PriorModel::Uniform => (PriorMap::uniform(height, width), PriorSpec::Uniform),
        })
    }
}

/// Rebuilds the prior recorded for one manifest entry.
pub fn prior_from_spec(
    spec: &PriorSpec,
    dataset_dir: &Path,
    height: usize,
    width: usize,
) -> Result<PriorMap> {
    match spec {
        PriorSpec::Perlin { params } => perlin2d(height, width, params),
        PriorSpec::File { path } => {
            PriorMap::decode_png(&codec::read_file(&dataset_dir.join(path))?)
        }
        PriorSpec::Uniform => Ok(PriorMap::uniform(height, width)),
    }
}

pub fn spacing_from_config(cfg: &GenConfig, masks: &[InstanceMask]) -> Result<SpacingDist> {
    match &cfg.spacing {
        SpacingSource::Fitted => fit_spacing(masks),
        SpacingSource::File { path } => SpacingDist::from_json_slice(&codec::read_file(path)?),
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    codec::write_file(path, &v)
}

/// Runs every stage and writes the dataset tree under `out`. The result
/// depends only on `cfg` and `pairs`, never on thread count.
pub fn run_pipeline(cfg: &GenConfig, pairs: &[RealPair], out: &Path) -> Result<DatasetManifest> {
    cfg.validate()?;
    if pairs.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one real image/mask pair is required".into(),
        ));
    }
    let masks: Vec<InstanceMask> = pairs.iter().map(|p| p.mask.clone()).collect();

    let real = extract_pool(
        pairs.iter().map(|p| (p.name.as_str(), &p.mask)),
        cfg.min_blob_area,
    );
    log::info!(
        "extracted {} real blobs from {} masks",
        real.len(),
        pairs.len()
    );
    if real.len() < 2 {
        return Err(Error::NotEnoughBlobs {
            required: 2,
            found: real.len(),
        });
    }
    let params = GenerationParams {
        contour_points: cfg.contour_points,
        min_area: cfg.min_blob_area,
        ..GenerationParams::default()
    };
    let pool = grow_pool(&real, cfg.blobs, &params, cfg.seed)?;
    let k = real.len();
    log::info!("generated {} blobs", pool.len() - k);
    pool.save(&out.join("blobs"))?;

    let prior = PriorModel::from_config(cfg, &masks)?;
    match &prior {
        PriorModel::Perlin(p) => write_json(&out.join(PRIOR_JSON), p)?,
        PriorModel::Map(_, bytes) => codec::write_file(&out.join(PRIOR_PNG), bytes)?,
        PriorModel::Uniform => {}
    }
    let spacing = spacing_from_config(cfg, &masks)?;
    write_json(&out.join(SPACING_JSON), &spacing)?;

    let mut tiles = Vec::new();
    for (j, pair) in pairs.iter().enumerate() {
        if pair.image.height().min(pair.image.width()) < cfg.tile_size {
            log::warn!(
                "{} is smaller than one tile; no reference tiles from it",
                pair.name
            );
            continue;
        }
        let counts = tile_counts(&pair.mask, cfg.tile_size)?;
        for (tile, count) in tile_image(&pair.image, cfg.tile_size)?
            .into_iter()
            .zip(counts)
        {
            let path = format!("tiles/tile_{:05}.png", tiles.len());
            tile.image.save(&out.join(&path))?;
            tiles.push(TileRecord {
                path,
                source_image: j,
                blob_count: count,
            });
        }
    }
    if tiles.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no real image holds a full {0}x{0} tile",
            cfg.tile_size
        )));
    }
    let tile_blob_counts: Vec<usize> = tiles.iter().map(|t| t.blob_count).collect();

    let generated = &pool.blobs[k..];
    let entries: Vec<ManifestEntry> = (0..cfg.images as u64)
        .into_par_iter()
        .map(|n| {
            let (prior_map, prior_params) = prior.realize(cfg.seed, n, cfg.height, cfg.width)?;
            let seed = placement_seed(cfg.seed, n);
            let placed = greedy_placement_with(
                &prior_map,
                generated,
                &spacing,
                &mut placement_rng(seed),
                cfg.termination,
            );
            let log = PlacementLog {
                records: placed
                    .log
                    .records
                    .into_iter()
                    .map(|mut r| {
                        r.blob_id += k;
                        r
                    })
                    .collect(),
            };
            let instances = placed.mask.instance_count();
            let reference = select_reference(&tile_blob_counts, instances).expect("tiles nonempty");

            let entry = ManifestEntry {
                generated_mask_path: format!("masks/mask_{n:05}.png"),
                content_image_path: format!("content/content_{n:05}.png"),
                reference_tile_path: tiles[reference].path.clone(),
                seed,
                prior_params,
                blob_provenance_path: format!("logs/placement_{n:05}.jsonl"),
                instances,
            };
            placed.mask.save(&out.join(&entry.generated_mask_path))?;
            flatten(&placed.mask).save(&out.join(&entry.content_image_path))?;
            codec::write_file(
                &out.join(&entry.blob_provenance_path),
                log.to_jsonl()?.as_bytes(),
            )?;
            Ok(entry)
        })
        .collect::<Result<_>>()?;

    let manifest = DatasetManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        master_seed: cfg.seed,
        counts: DatasetCounts {
            real_images: pairs.len(),
            generated_images: entries.len(),
            real_blobs: k,
            generated_blobs: pool.len() - k,
        },
        blob_pool: "blobs".into(),
        spacing: SPACING_JSON.into(),
        tiles,
        entries,
    };
    manifest.write(out)?;
    log::info!(
        "wrote {} entries to {}",
        manifest.entries.len(),
        out.display()
    );
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{demo_dataset, DemoParams};

    fn pairs(count: usize) -> Vec<RealPair> {
        let p = DemoParams {
            height: 96,
            width: 96,
            cells: 12,
            ..DemoParams::default()
        };
        demo_dataset(count, &p, 11)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(j, (image, mask))| RealPair {
                name: format!("real_{j}.png"),
                image,
                mask,
            })
            .collect()
    }

    fn small_config() -> GenConfig {
        GenConfig {
            seed: 3,
            images: 3,
            blobs: 30,
            height: 96,
            width: 96,
            tile_size: 48,
            ..GenConfig::default()
        }
    }

    #[test]
    fn writes_a_consistent_tree() {
        let dir = tempfile::tempdir().unwrap();
        let m = run_pipeline(&small_config(), &pairs(2), dir.path()).unwrap();
        assert_eq!(m.entries.len(), 3);
        assert_eq!(m.counts.generated_blobs, 30);
        assert_eq!(m.tiles.len(), 8);
        let pool = BlobPool::load(&dir.path().join("blobs")).unwrap();
        assert_eq!(real_prefix(&pool), m.counts.real_blobs);
        for e in &m.entries {
            let mask = InstanceMask::load(&dir.path().join(&e.generated_mask_path)).unwrap();
            assert_eq!(mask.instance_count(), e.instances);
            let text = std::fs::read_to_string(dir.path().join(&e.blob_provenance_path)).unwrap();
            let log = PlacementLog::from_jsonl(&text).unwrap();
            assert_eq!(log.len(), e.instances);
            assert!(log.records.iter().all(|r| r.blob_id >= m.counts.real_blobs));
        }
        assert_eq!(DatasetManifest::load(dir.path()).unwrap(), m);
    }

    #[test]
    fn too_few_blobs() {
        let mut p = pairs(1);
        p[0].mask = InstanceMask::new(96, 96);
        p[0].mask.set(10, 10, 1);
        let dir = tempfile::tempdir().unwrap();
        let err = run_pipeline(&small_config(), &p, dir.path()).unwrap_err();
        assert_eq!(err.kind(), "not_enough_blobs");
    }

    #[test]
    fn single_generated_blob() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = GenConfig {
            images: 1,
            blobs: 1,
            ..small_config()
        };
        let m = run_pipeline(&cfg, &pairs(1), dir.path()).unwrap();
        assert!(m.entries[0].instances <= 1);
    }

    #[test]
    fn prior_file_must_match_output_size() {
        let dir = tempfile::tempdir().unwrap();
        let prior = dir.path().join("p.png");
        codec::write_file(&prior, &PriorMap::uniform(10, 10).encode_png8().unwrap()).unwrap();
        let cfg = GenConfig {
            prior: PriorSource::File { path: prior },
            ..small_config()
        };
        let err = run_pipeline(&cfg, &pairs(1), &dir.path().join("out")).unwrap_err();
        assert_eq!(err.kind(), "dimension_mismatch");
    }
}
