#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::problem::parse_corpus_jsonl;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_corpus_jsonl(text);
    }
});
