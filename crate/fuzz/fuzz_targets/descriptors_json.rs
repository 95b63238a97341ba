#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::features::descriptor_formulas_from_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = descriptor_formulas_from_json(text);
    }
});
