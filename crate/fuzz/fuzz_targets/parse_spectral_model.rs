#![no_main]
use libfuzzer_sys::fuzz_target;
use qdd_core::serial::{parse_spectral_model, spectral_to_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(sm) = parse_spectral_model(data) {
        let again = parse_spectral_model(spectral_to_json(&sm).as_bytes()).expect("emitted model parses");
        assert_eq!(again, sm);
    }
});
