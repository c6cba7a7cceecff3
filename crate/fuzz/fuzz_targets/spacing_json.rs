#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::priors::SpacingDist;

fuzz_target!(|data: &[u8]| {
    let _ = SpacingDist::from_json_slice(data);
});
