#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::smt::parse_problem_smt;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_problem_smt(text);
    }
});
