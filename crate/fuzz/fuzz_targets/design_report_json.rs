#![no_main]

use lambda_mixer_core::design::DesignReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|bytes: &[u8]| {
    if let Ok(report) = serde_json::from_slice::<DesignReport>(bytes) {
        let text = serde_json::to_string(&report).unwrap();
        let again: DesignReport = serde_json::from_str(&text).unwrap();
        assert_eq!(again, report);
        let _ = report.failures();
    }
});
