#![no_main]
use libfuzzer_sys::fuzz_target;
use std::path::Path;

fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = qdd_cli::parse_experiment_config(data) {
        // File references resolve against a directory that does not exist,
        // so only inline values get past this point.
        let _ = cfg.resolve(Path::new("/nonexistent/qdd-fuzz"));
    }
});
