#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::blobs::decode_footprint;

fuzz_target!(|data: &[u8]| {
    let _ = decode_footprint(data, (0, 0));
});
