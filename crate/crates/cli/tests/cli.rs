use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nucleogen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nucleogen"))
        .args(args)
        .env("NUCLEOGEN_LOG", "warn")
        .output()
        .expect("spawn nucleogen")
}

fn ok(args: &[&str]) -> String {
    let out = nucleogen(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Runs a failing command and returns the `error` kind from stderr JSON.
fn error_kind(args: &[&str], code: i32) -> String {
    let out = nucleogen(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    let last = stderr.lines().last().expect("stderr line");
    let v: Value = serde_json::from_str(last).unwrap_or_else(|_| panic!("not JSON: {last}"));
    assert!(v["message"].is_string());
    v["error"].as_str().unwrap().to_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn demo(dir: &Path) {
    ok(&[
        "demo-data",
        "--out",
        s(dir),
        "-n",
        "2",
        "--seed",
        "1",
        "--size",
        "96",
    ]);
}

#[test]
fn usage_errors_exit_two_with_json() {
    assert_eq!(error_kind(&["no-such-command"], 2), "usage");
    assert_eq!(error_kind(&["place", "--blobs"], 2), "usage");
    assert_eq!(
        error_kind(
            &[
                "place",
                "--blobs",
                "b",
                "--prior",
                "uniform",
                "--spacing",
                "s",
                "--out",
                "o",
                "--termination",
                "later"
            ],
            2
        ),
        "usage"
    );
}

#[test]
fn runtime_errors_exit_one_with_json() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing");
    assert_eq!(
        error_kind(
            &[
                "extract-blobs",
                "--real-masks",
                s(&missing),
                "--out",
                s(tmp.path())
            ],
            1
        ),
        "io"
    );
    assert_eq!(
        error_kind(
            &[
                "gen-blobs",
                "--blobs",
                s(&missing),
                "--out",
                s(tmp.path()),
                "-e",
                "4"
            ],
            1
        ),
        "invalid_argument"
    );

    let not_png = tmp.path().join("masks");
    std::fs::create_dir(&not_png).unwrap();
    std::fs::write(not_png.join("a.png"), b"not a png").unwrap();
    assert_eq!(
        error_kind(
            &[
                "fit-spacing",
                "--real-masks",
                s(&not_png),
                "--out",
                s(&tmp.path().join("x.json"))
            ],
            1
        ),
        "image_codec"
    );

    let bad_config = tmp.path().join("bad.toml");
    std::fs::write(&bad_config, "images = 3\ncolour = 1\n").unwrap();
    let real = tmp.path().join("real");
    demo(&real);
    let (images, masks, out) = (
        real.join("images"),
        real.join("masks"),
        tmp.path().join("out"),
    );
    let pipeline = [
        "pipeline",
        "--real-images",
        s(&images),
        "--real-masks",
        s(&masks),
        "--out",
        s(&out),
    ];
    assert_eq!(
        error_kind(&[&pipeline[..], &["--config", s(&bad_config)]].concat(), 1),
        "config"
    );
    assert_eq!(
        error_kind(&[&pipeline[..], &["--tile-size", "500"]].concat(), 1),
        "invalid_argument"
    );

    // A single real blob cannot be interpolated.
    let one = tmp.path().join("one");
    let (one_images, one_masks) = (one.join("images"), one.join("masks"));
    let mut mask = nucleogen::mask::InstanceMask::new(32, 32);
    for r in 8..16 {
        for c in 8..16 {
            mask.set(r, c, 1);
        }
    }
    mask.save(&one_masks.join("m.png")).unwrap();
    nucleogen::dataset::flatten(&mask)
        .save(&one_images.join("m.png"))
        .unwrap();
    let args = [
        "pipeline",
        "--real-images",
        s(&one_images),
        "--real-masks",
        s(&one_masks),
        "--out",
        s(&out),
        "--tile-size",
        "16",
        "--prior",
        "uniform",
    ];
    let kind = error_kind(&args, 1);
    assert!(
        kind == "not_enough_blobs" || kind == "no_spacing_samples",
        "{kind}"
    );
}

#[test]
fn stages_run_standalone() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |name: &str| tmp.path().join(name);
    let real = p("real");
    demo(&real);
    let masks = real.join("masks");

    ok(&[
        "extract-blobs",
        "--real-masks",
        s(&masks),
        "--out",
        s(&p("real_pool")),
    ]);
    ok(&[
        "gen-blobs",
        "--blobs",
        s(&p("real_pool")),
        "--out",
        s(&p("pool")),
        "-l",
        "40",
        "--seed",
        "2",
    ]);
    ok(&[
        "fit-prior",
        "--real-masks",
        s(&masks),
        "--out",
        s(&p("prior.json")),
        "--preview",
        s(&p("prior.png")),
    ]);
    ok(&[
        "fit-spacing",
        "--real-masks",
        s(&masks),
        "--out",
        s(&p("spacing.json")),
    ]);
    ok(&[
        "place",
        "--blobs",
        s(&p("pool")),
        "--prior",
        s(&p("prior.json")),
        "--spacing",
        s(&p("spacing.json")),
        "--out",
        s(&p("placed")),
        "-n",
        "2",
        "--height",
        "96",
        "--width",
        "96",
    ]);
    for i in 0..2 {
        let m = nucleogen::mask::InstanceMask::load(&p(&format!("placed/masks/mask_{i:05}.png")))
            .unwrap();
        let log =
            std::fs::read_to_string(p(&format!("placed/logs/placement_{i:05}.jsonl"))).unwrap();
        let log = nucleogen::placement::PlacementLog::from_jsonl(&log).unwrap();
        assert_eq!(m.instance_count(), log.len());
        assert!(p(&format!("placed/content/content_{i:05}.png")).exists());
    }

    let prior =
        nucleogen::priors::PerlinParams::from_json_slice(&std::fs::read(p("prior.json")).unwrap())
            .unwrap();
    prior.validate().unwrap();
    let preview = nucleogen::priors::PriorMap::decode_png(&std::fs::read(p("prior.png")).unwrap());
    assert!(preview.is_ok() || preview.unwrap_err().kind() == "invalid_argument");

    let stdout = ok(&[
        "compare-placement",
        "--blobs",
        s(&p("pool")),
        "--prior",
        "uniform",
        "--spacing",
        s(&p("spacing.json")),
        "--runs",
        "4",
        "--height",
        "96",
        "--width",
        "96",
        "--out",
        s(&p("compare.json")),
    ]);
    let v: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(
        v["wins"].as_u64().unwrap() + v["losses"].as_u64().unwrap() + v["ties"].as_u64().unwrap(),
        4
    );
    let full: Value = serde_json::from_slice(&std::fs::read(p("compare.json")).unwrap()).unwrap();
    assert_eq!(full["runs"].as_array().unwrap().len(), 4);
}

#[test]
fn pipeline_config_and_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let real = tmp.path().join("real");
    demo(&real);
    let config = tmp.path().join("gen.toml");
    std::fs::write(
        &config,
        "seed = 4\nimages = 2\nblobs = 30\nheight = 96\nwidth = 96\ntile_size = 48\n\n[prior]\nsource = \"fixed\"\nbase_frequency = 2.0\noctaves = 2\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    // -n overrides `images` from the file.
    let stdout = ok(&[
        "pipeline",
        "--config",
        s(&config),
        "--real-images",
        s(&real.join("images")),
        "--real-masks",
        s(&real.join("masks")),
        "--out",
        s(&out),
        "-n",
        "3",
    ]);
    let summary: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(summary["entries"], 3);

    let manifest = nucleogen::dataset::DatasetManifest::load(&out).unwrap();
    assert_eq!(manifest.master_seed, 4);
    assert_eq!(manifest.counts.generated_blobs, 30);
    for e in &manifest.entries {
        assert!(matches!(
            e.prior_params,
            nucleogen::dataset::PriorSpec::Perlin { .. }
        ));
        let m = nucleogen::mask::InstanceMask::load(&out.join(&e.generated_mask_path)).unwrap();
        assert_eq!((m.height(), m.width()), (96, 96));
        assert_eq!(m.instance_count(), e.instances);
    }

    let report = tmp.path().join("stats.json");
    let table = ok(&[
        "stats",
        "--real-masks",
        s(&real.join("masks")),
        "--dataset",
        s(&out),
        "--out",
        s(&report),
    ]);
    assert!(table.contains("median area"));
    let v: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["adherence"].as_array().unwrap().len(), 3);
}
