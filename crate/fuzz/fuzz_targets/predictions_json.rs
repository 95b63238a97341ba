#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::heuristics::read_predictions;

fuzz_target!(|data: &[u8]| {
    let _ = read_predictions(data);
});
