#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::blobs::PoolIndex;

fuzz_target!(|data: &[u8]| {
    let _ = PoolIndex::from_json_slice(data);
});
