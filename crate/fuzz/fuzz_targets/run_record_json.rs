#![no_main]

use lambda_mixer_core::record::RunRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|bytes: &[u8]| {
    let Ok(text) = std::str::from_utf8(bytes) else { return };
    if let Ok(record) = RunRecord::from_json(text) {
        let again = RunRecord::from_json(&record.to_json().unwrap()).unwrap();
        assert_eq!(again, record);
    }
});
