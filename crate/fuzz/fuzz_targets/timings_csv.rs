#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::ml::read_timings_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_timings_csv(data, None);
});
