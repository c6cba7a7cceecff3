#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::mask::InstanceMask;

fuzz_target!(|data: &[u8]| {
    let _ = InstanceMask::decode_png(data);
});
