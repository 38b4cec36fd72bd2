#![no_main]

use lambda_mixer_core::Scenario;
use libfuzzer_sys::fuzz_target;

// Any input yields a scenario or a non-empty violation list, never a panic.
fuzz_target!(|bytes: &[u8]| {
    if let Ok(text) = std::str::from_utf8(bytes) {
        match Scenario::from_toml_str(text) {
            Ok(s) => assert!(s.check().is_empty()),
            Err(errs) => {
                assert!(!errs.is_empty());
                let _ = errs.to_string();
            }
        }
    }
});
