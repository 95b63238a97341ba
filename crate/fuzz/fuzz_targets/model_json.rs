#![no_main]

use libfuzzer_sys::fuzz_target;
use polyfeat::ml::KnnModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = KnnModel::from_json(text) {
            // a model that loads must predict without panicking
            let _ = model.predict_row(&vec![0.0; model.serials.len()]);
        }
    }
});
