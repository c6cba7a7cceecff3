#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::config::GenConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = GenConfig::from_toml_str(text);
    }
});
