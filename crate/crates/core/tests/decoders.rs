use nucleogen::blobs::{decode_footprint, encode_footprint, Blob, PoolIndex};
use nucleogen::codec;
use nucleogen::config::GenConfig;
use nucleogen::dataset::{DatasetManifest, RasterImage};
use nucleogen::grid::BitGrid;
use nucleogen::mask::InstanceMask;
use nucleogen::placement::PlacementLog;
use nucleogen::priors::{PerlinParams, PriorMap, SpacingDist};
use proptest::prelude::*;

/// Runs every decoder on the same bytes; each must return, never panic.
fn decode_all(bytes: &[u8]) {
    let _ = InstanceMask::decode_png(bytes);
    let _ = PriorMap::decode_png(bytes);
    let _ = RasterImage::decode_png(bytes);
    let _ = decode_footprint(bytes, (0, 0));
    let _ = DatasetManifest::from_json_slice(bytes);
    let _ = PoolIndex::from_json_slice(bytes);
    let _ = SpacingDist::from_json_slice(bytes);
    let _ = PerlinParams::from_json_slice(bytes);
    if let Ok(text) = std::str::from_utf8(bytes) {
        let _ = PlacementLog::from_jsonl(text);
        let _ = GenConfig::from_toml_str(text);
    }
}

fn png_prefixed() -> impl Strategy<Value = Vec<u8>> {
    let mask = {
        let mut m = InstanceMask::new(5, 7);
        m.set(2, 3, 9);
        m.encode_png().unwrap()
    };
    (prop::collection::vec(any::<u8>(), 0..64), 0usize..200).prop_map(move |(noise, cut)| {
        // A valid header followed by damage or truncation.
        let mut v = mask[..cut.min(mask.len())].to_vec();
        v.extend(noise);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        decode_all(&bytes);
    }

    #[test]
    fn damaged_pngs_never_panic(bytes in png_prefixed()) {
        decode_all(&bytes);
    }

    #[test]
    fn json_like_text_never_panics(text in "[\\[\\]{}\":,0-9a-z_. \\n-]{0,200}") {
        decode_all(text.as_bytes());
    }

    #[test]
    fn mask_png_round_trips(labels in prop::collection::vec(0u32..=65535, 12 * 9)) {
        let m = InstanceMask::from_labels(12, 9, labels).unwrap();
        prop_assert_eq!(InstanceMask::decode_png(&m.encode_png().unwrap()).unwrap(), m);
    }

    #[test]
    fn footprint_png_round_trips(bits in prop::collection::vec(any::<bool>(), 8 * 8), offset in (-50i64..50, -50i64..50)) {
        let grid = BitGrid::from_fn(8, 8, |r, c| bits[r * 8 + c]);
        if let Ok(blob) = Blob::from_footprint(&grid.largest_component(), offset) {
            let back = decode_footprint(&encode_footprint(&blob).unwrap(), blob.offset()).unwrap();
            prop_assert_eq!(back, blob);
        }
    }
}

#[test]
fn wrong_pixel_layouts_are_rejected() {
    let rgb = RasterImage::new(2, 2, 3, vec![7; 12])
        .unwrap()
        .encode_png()
        .unwrap();
    assert_eq!(
        InstanceMask::decode_png(&rgb).unwrap_err().kind(),
        "unsupported_format"
    );
    assert_eq!(
        PriorMap::decode_png(&rgb).unwrap_err().kind(),
        "unsupported_format"
    );
    assert_eq!(
        decode_footprint(&rgb, (0, 0)).unwrap_err().kind(),
        "unsupported_format"
    );
    let zero = codec::encode_png(&codec::gray8(3, 3, vec![0; 9])).unwrap();
    assert!(PriorMap::decode_png(&zero).is_err());
    assert_eq!(
        decode_footprint(&zero, (0, 0)).unwrap_err().kind(),
        "invalid_argument"
    );
}

#[test]
fn prior_png_scales_to_unit_range() {
    let png = codec::encode_png(&codec::gray8(1, 3, vec![0, 51, 255])).unwrap();
    assert_eq!(
        PriorMap::decode_png(&png).unwrap().values(),
        &[0.0, 0.2, 1.0]
    );
}

/// Every fuzz seed must decode cleanly, so the fuzzers start from valid inputs.
#[test]
fn fuzz_corpus_seeds_decode() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seen = 0;
    for dir in std::fs::read_dir(&root).unwrap() {
        let dir = dir.unwrap().path();
        let target = dir.file_name().unwrap().to_str().unwrap().to_owned();
        for file in std::fs::read_dir(&dir).unwrap() {
            let path = file.unwrap().path();
            let bytes = std::fs::read(&path).unwrap();
            let text = std::str::from_utf8(&bytes);
            let ok = match target.as_str() {
                "manifest_json" => DatasetManifest::from_json_slice(&bytes).is_ok(),
                "pool_index_json" => PoolIndex::from_json_slice(&bytes).is_ok(),
                "spacing_json" => SpacingDist::from_json_slice(&bytes).is_ok(),
                "perlin_params_json" => PerlinParams::from_json_slice(&bytes).is_ok(),
                "mask_png" => InstanceMask::decode_png(&bytes).is_ok(),
                "prior_png" => PriorMap::decode_png(&bytes).is_ok(),
                "raster_png" => RasterImage::decode_png(&bytes).is_ok(),
                "footprint_png" => decode_footprint(&bytes, (0, 0)).is_ok(),
                "placement_log_jsonl" => PlacementLog::from_jsonl(text.unwrap()).is_ok(),
                "config_toml" => GenConfig::from_toml_str(text.unwrap()).is_ok(),
                other => panic!("no decoder for corpus dir {other}"),
            };
            assert!(ok, "{} does not decode", path.display());
            seen += 1;
        }
    }
    assert!(seen >= 10);
}
