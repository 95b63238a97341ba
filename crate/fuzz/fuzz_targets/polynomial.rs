#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::poly::parse_polynomial;
use polyfeat::VariableSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let vars = VariableSet::new(["x", "y", "z"]).unwrap();
    if let Ok(p) = parse_polynomial(text, &vars) {
        // printing and re-reading is lossless
        let again = parse_polynomial(&p.display(&vars), &vars).expect("printed form parses");
        assert_eq!(again, p);
    }
});
