#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::features::FeatureMatrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = FeatureMatrix::read_csv(data) {
        // fractions are written as decimals, so only the second pass is exact
        let once = FeatureMatrix::read_csv(m.to_csv_string().as_bytes()).expect("written form reads");
        let twice = FeatureMatrix::read_csv(once.to_csv_string().as_bytes()).expect("written form reads");
        assert_eq!(twice, once);
    }
});
