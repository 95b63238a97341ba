#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::dataset::MergeReport;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = MergeReport::from_json(text);
    }
});
