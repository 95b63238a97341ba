#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::dataset::read_labels_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_labels_csv(data);
});
