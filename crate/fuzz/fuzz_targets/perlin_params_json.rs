#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::priors::PerlinParams;

fuzz_target!(|data: &[u8]| {
    let _ = PerlinParams::from_json_slice(data);
});
