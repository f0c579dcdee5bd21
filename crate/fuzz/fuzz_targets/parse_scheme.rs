#![no_main]
use libfuzzer_sys::fuzz_target;
use qdd_core::serial::{parse_scheme, scheme_to_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(scheme) = parse_scheme(data) {
        let again = parse_scheme(scheme_to_json(&scheme).as_bytes()).expect("emitted scheme parses");
        assert_eq!(again, scheme);
        // Bounded so a huge kick set cannot stall the run.
        let _ = scheme.sequence(64);
    }
});
