use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use nucleogen::blobs::{BlobPool, GenerationParams, DEFAULT_MIN_BLOB_AREA};
use nucleogen::codec;
use nucleogen::config::{GenConfig, PriorSource, SpacingSource};
use nucleogen::dataset::flatten;
use nucleogen::demo::{demo_dataset, DemoParams};
use nucleogen::mask::InstanceMask;
use nucleogen::pipeline::{
    extract_pool, grow_pool, placement_rng, placement_seed, real_prefix, run_pipeline, PriorModel,
    RealPair,
};
use nucleogen::placement::{greedy_placement_with, Termination};
use nucleogen::priors::{
    default_candidate_grid, fit_prior, fit_spacing, PerlinParams, DEFAULT_BLUR_SIGMA,
};
use nucleogen::report::{compare_placement, run_stats};
use nucleogen::seed;
use nucleogen::{Error, Result};

/// Synthetic cell instance-segmentation datasets from a few annotated masks.
#[derive(Parser, Debug)]
#[command(name = "nucleogen", version)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract real blobs from label masks into a blob pool directory.
    ExtractBlobs {
        #[arg(long)]
        real_masks: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MIN_BLOB_AREA)]
        min_blob_area: usize,
    },
    /// Grow a pool of real blobs with interpolated ones.
    GenBlobs {
        /// Pool directory written by extract-blobs.
        #[arg(long)]
        blobs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(short = 'l', default_value_t = 1000)]
        l: usize,
        #[arg(short = 'e', default_value_t = 64)]
        e: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MIN_BLOB_AREA)]
        min_blob_area: usize,
    },
    /// Fit Perlin prior parameters to label masks; writes JSON.
    FitPrior {
        #[arg(long)]
        real_masks: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BLUR_SIGMA)]
        blur_sigma: f64,
        /// Also write one realization of the fitted prior as a PNG.
        #[arg(long)]
        preview: Option<PathBuf>,
    },
    /// Measure blob spacing in label masks; writes JSON.
    FitSpacing {
        #[arg(long)]
        real_masks: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Place pool blobs into new label masks.
    Place {
        #[arg(long)]
        blobs: PathBuf,
        /// `uniform`, a prior PNG, or Perlin parameters JSON.
        #[arg(long)]
        prior: String,
        #[arg(long)]
        spacing: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        height: usize,
        #[arg(long, default_value_t = 256)]
        width: usize,
        /// `exhaust` or `first_miss`.
        #[arg(long, default_value = "exhaust")]
        termination: Termination,
    },
    /// Run every stage and write a dataset tree with its manifest.
    Pipeline(PipelineArgs),
    /// Real vs generated blob statistics and prior adherence.
    Stats {
        #[arg(long)]
        real_masks: PathBuf,
        /// Dataset directory written by `pipeline`.
        #[arg(long)]
        dataset: PathBuf,
        /// Write the JSON report here; the table always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MIN_BLOB_AREA)]
        min_blob_area: usize,
        #[arg(long, default_value_t = DEFAULT_BLUR_SIGMA)]
        blur_sigma: f64,
    },
    /// Greedy placement vs the random weighted baseline over seeded runs.
    ComparePlacement {
        #[arg(long)]
        blobs: PathBuf,
        /// `uniform`, a prior PNG, or Perlin parameters JSON (reseeded per run).
        #[arg(long)]
        prior: String,
        #[arg(long)]
        spacing: PathBuf,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        height: usize,
        #[arg(long, default_value_t = 256)]
        width: usize,
        /// Baseline proposals per run (default: pool size).
        #[arg(long)]
        attempts: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BLUR_SIGMA)]
        blur_sigma: f64,
        /// `exhaust` or `first_miss`.
        #[arg(long, default_value = "exhaust")]
        termination: Termination,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a small synthetic annotated dataset (images/ and masks/).
    DemoData {
        #[arg(long)]
        out: PathBuf,
        #[arg(short = 'n', default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        size: usize,
    },
}

#[derive(Args, Debug)]
struct PipelineArgs {
    /// TOML config; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    real_images: PathBuf,
    #[arg(long)]
    real_masks: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short = 'n')]
    n: Option<usize>,
    #[arg(short = 'l')]
    l: Option<usize>,
    #[arg(short = 'e')]
    e: Option<usize>,
    /// `fitted`, `uniform`, a prior PNG, or Perlin parameters JSON.
    #[arg(long)]
    prior: Option<String>,
    /// `fitted` or a spacing JSON file.
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long)]
    tile_size: Option<usize>,
    /// `exhaust` or `first_miss`.
    #[arg(long)]
    termination: Option<Termination>,
}

fn png_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if dir.is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| io_error(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no .png files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_masks(path: &Path) -> Result<Vec<(String, InstanceMask)>> {
    png_files(path)?
        .into_iter()
        .map(|p| Ok((file_name(&p), InstanceMask::load(&p)?)))
        .collect()
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Pairs each mask with the image of the same file name.
fn load_pairs(images: &Path, masks: &Path) -> Result<Vec<RealPair>> {
    png_files(masks)?
        .into_iter()
        .map(|mask_path| {
            let name = file_name(&mask_path);
            let image_path = if images.is_file() {
                images.to_path_buf()
            } else {
                images.join(&name)
            };
            let (image, mask) = nucleogen::dataset::load_annotated_pair(&image_path, &mask_path)?;
            Ok(RealPair { name, image, mask })
        })
        .collect()
}

fn parse_prior(arg: &str) -> Result<PriorSource> {
    match arg {
        "fitted" => Ok(PriorSource::Fitted),
        "uniform" => Ok(PriorSource::Uniform),
        path if path.to_ascii_lowercase().ends_with(".json") => {
            let p = PerlinParams::from_json_slice(&codec::read_file(Path::new(path))?)?;
            Ok(PriorSource::Fixed {
                base_frequency: p.base_frequency,
                octaves: p.octaves,
                persistence: p.persistence,
                threshold_shift: p.threshold_shift,
            })
        }
        path => Ok(PriorSource::File { path: path.into() }),
    }
}

fn parse_spacing(arg: &str) -> SpacingSource {
    match arg {
        "fitted" => SpacingSource::Fitted,
        path => SpacingSource::File { path: path.into() },
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    codec::write_file(path, &v)
}

/// The blobs to place: the generated part of a grown pool, or the whole
/// pool when it holds only real blobs.
fn placeable(pool: &BlobPool) -> &[nucleogen::blobs::Blob] {
    let k = real_prefix(pool);
    if k == pool.len() {
        &pool.blobs
    } else {
        &pool.blobs[k..]
    }
}

fn prior_model_for(arg: &str, height: usize, width: usize) -> Result<PriorModel> {
    let source = parse_prior(arg)?;
    if source == PriorSource::Fitted {
        return Err(Error::InvalidArgument(
            "--prior fitted needs real masks; run fit-prior and pass its JSON".into(),
        ));
    }
    let cfg = GenConfig {
        height,
        width,
        tile_size: 1,
        prior: source,
        ..GenConfig::default()
    };
    cfg.validate()?;
    PriorModel::from_config(&cfg, &[])
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::ExtractBlobs {
            real_masks,
            out,
            min_blob_area,
        } => {
            let masks = load_masks(&real_masks)?;
            let pool = extract_pool(masks.iter().map(|(n, m)| (n.as_str(), m)), min_blob_area);
            pool.save(&out)?;
            log::info!("wrote {} blobs to {}", pool.len(), out.display());
        }
        Command::GenBlobs {
            blobs,
            out,
            l,
            e,
            seed,
            min_blob_area,
        } => {
            if e < 8 {
                return Err(Error::InvalidArgument(format!(
                    "-e must be at least 8, got {e}"
                )));
            }
            let loaded = BlobPool::load(&blobs)?;
            let real = BlobPool {
                blobs: loaded.blobs[..real_prefix(&loaded)].to_vec(),
                provenance: loaded.provenance[..real_prefix(&loaded)].to_vec(),
            };
            let params = GenerationParams {
                contour_points: e,
                min_area: min_blob_area,
                ..GenerationParams::default()
            };
            let pool = grow_pool(&real, l, &params, seed)?;
            pool.save(&out)?;
            log::info!(
                "wrote {} real + {} generated blobs to {}",
                real.len(),
                l,
                out.display()
            );
        }
        Command::FitPrior {
            real_masks,
            out,
            seed,
            blur_sigma,
            preview,
        } => {
            let masks: Vec<InstanceMask> = load_masks(&real_masks)?
                .into_iter()
                .map(|(_, m)| m)
                .collect();
            let grid = default_candidate_grid(seed::stream_seed(seed, seed::PRIOR_FIT, 0));
            let best = fit_prior(&masks, &grid, blur_sigma)?;
            write_json(&out, &best)?;
            if let Some(path) = preview {
                let m = &masks[0];
                let map = nucleogen::priors::perlin2d(m.height(), m.width(), &best)?;
                codec::write_file(&path, &map.encode_png8()?)?;
            }
        }
        Command::FitSpacing { real_masks, out } => {
            let masks: Vec<InstanceMask> = load_masks(&real_masks)?
                .into_iter()
                .map(|(_, m)| m)
                .collect();
            let s = fit_spacing(&masks)?;
            log::info!(
                "{} spacing samples, mean {:.2} px",
                s.samples().len(),
                s.mean()
            );
            write_json(&out, &s)?;
        }
        Command::Place {
            blobs,
            prior,
            spacing,
            out,
            n,
            seed,
            height,
            width,
            termination,
        } => {
            let pool = BlobPool::load(&blobs)?;
            let model = prior_model_for(&prior, height, width)?;
            let spacing =
                nucleogen::priors::SpacingDist::from_json_slice(&codec::read_file(&spacing)?)?;
            for i in 0..n as u64 {
                let (map, _) = model.realize(seed, i, height, width)?;
                let placed = greedy_placement_with(
                    &map,
                    placeable(&pool),
                    &spacing,
                    &mut placement_rng(placement_seed(seed, i)),
                    termination,
                );
                placed
                    .mask
                    .save(&out.join(format!("masks/mask_{i:05}.png")))?;
                flatten(&placed.mask).save(&out.join(format!("content/content_{i:05}.png")))?;
                codec::write_file(
                    &out.join(format!("logs/placement_{i:05}.jsonl")),
                    placed.log.to_jsonl()?.as_bytes(),
                )?;
                log::info!("mask {i}: {} blobs", placed.log.len());
            }
        }
        Command::Pipeline(args) => {
            let mut cfg = match &args.config {
                Some(path) => GenConfig::load(path)?,
                None => GenConfig::default(),
            };
            if let Some(v) = args.seed {
                cfg.seed = v;
            }
            if let Some(v) = args.n {
                cfg.images = v;
            }
            if let Some(v) = args.l {
                cfg.blobs = v;
            }
            if let Some(v) = args.e {
                cfg.contour_points = v;
            }
            if let Some(v) = args.tile_size {
                cfg.tile_size = v;
            }
            if let Some(v) = args.termination {
                cfg.termination = v;
            }
            if let Some(v) = &args.prior {
                cfg.prior = parse_prior(v)?;
            }
            if let Some(v) = &args.spacing {
                cfg.spacing = parse_spacing(v);
            }
            cfg.validate()?;
            let pairs = load_pairs(&args.real_images, &args.real_masks)?;
            let manifest = run_pipeline(&cfg, &pairs, &args.out)?;
            println!(
                "{}",
                json!({
                    "manifest": args.out.join(nucleogen::dataset::MANIFEST_FILE),
                    "entries": manifest.entries.len(),
                    "real_blobs": manifest.counts.real_blobs,
                    "generated_blobs": manifest.counts.generated_blobs,
                })
            );
        }
        Command::Stats {
            real_masks,
            dataset,
            out,
            min_blob_area,
            blur_sigma,
        } => {
            let masks: Vec<InstanceMask> = load_masks(&real_masks)?
                .into_iter()
                .map(|(_, m)| m)
                .collect();
            let report = run_stats(&masks, &dataset, min_blob_area, blur_sigma)?;
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
            print!("{}", report.to_table());
        }
        Command::ComparePlacement {
            blobs,
            prior,
            spacing,
            runs,
            seed,
            height,
            width,
            attempts,
            blur_sigma,
            termination,
            out,
        } => {
            let pool = BlobPool::load(&blobs)?;
            let model = prior_model_for(&prior, height, width)?;
            let spacing =
                nucleogen::priors::SpacingDist::from_json_slice(&codec::read_file(&spacing)?)?;
            let blobs = placeable(&pool);
            let report = compare_placement(
                |s| Ok(model.realize(seed, s as u64, height, width)?.0),
                blobs,
                &spacing,
                runs,
                seed,
                blur_sigma,
                attempts.unwrap_or(blobs.len()),
                termination,
            )?;
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
            println!(
                "{}",
                json!({
                    "mean_greedy_adherence": report.mean_greedy_adherence,
                    "mean_baseline_adherence": report.mean_baseline_adherence,
                    "wins": report.wins,
                    "losses": report.losses,
                    "ties": report.ties,
                    "p_value": report.p_value,
                })
            );
        }
        Command::DemoData { out, n, seed, size } => {
            let params = DemoParams {
                height: size,
                width: size,
                ..DemoParams::default()
            };
            for (j, (image, mask)) in demo_dataset(n, &params, seed)?.into_iter().enumerate() {
                let name = format!("real_{j:03}.png");
                image.save(&out.join("images").join(&name))?;
                mask.save(&out.join("masks").join(&name))?;
                log::info!("{name}: {} cells", mask.instance_count());
            }
        }
    }
    Ok(())
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NUCLEOGEN_LOG", "info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string(), 2),
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            return fail("invalid_argument", e.to_string(), 1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.to_string(), 1),
    }
}
