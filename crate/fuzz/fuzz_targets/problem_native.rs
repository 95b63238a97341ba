#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::problem::parse_problem_native;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pr) = parse_problem_native(text) {
        let again = parse_problem_native(&pr.to_native()).expect("printed form parses");
        assert_eq!(again, pr);
    }
});
