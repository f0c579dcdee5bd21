#![no_main]
use libfuzzer_sys::fuzz_target;
use qdd_core::serial::{parse_superop, superop_to_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = parse_superop(data) {
        let again = parse_superop(superop_to_json(&s).as_bytes()).expect("emitted superoperator parses");
        assert_eq!(again, s);
    }
});
