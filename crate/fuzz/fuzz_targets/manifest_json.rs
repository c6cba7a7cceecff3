#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::dataset::DatasetManifest;

fuzz_target!(|data: &[u8]| {
    let _ = DatasetManifest::from_json_slice(data);
});
