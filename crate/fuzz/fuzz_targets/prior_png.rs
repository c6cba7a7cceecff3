#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::priors::PriorMap;

fuzz_target!(|data: &[u8]| {
    let _ = PriorMap::decode_png(data);
});
