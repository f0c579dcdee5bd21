#![no_main]
use libfuzzer_sys::fuzz_target;
use qdd_core::serial::{model_to_json, parse_model};

fuzz_target!(|data: &[u8]| {
    if let Ok(model) = parse_model(data) {
        let again = parse_model(model_to_json(&model).as_bytes()).expect("emitted model parses");
        assert_eq!(again, model);
    }
});
