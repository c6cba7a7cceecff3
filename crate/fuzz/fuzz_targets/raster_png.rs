#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::dataset::RasterImage;

fuzz_target!(|data: &[u8]| {
    let _ = RasterImage::decode_png(data);
});
