#![no_main]

use libfuzzer_sys::fuzz_target;
use nucleogen::placement::PlacementLog;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = PlacementLog::from_jsonl(text);
    }
});
