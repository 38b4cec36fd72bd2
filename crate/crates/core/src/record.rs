//! Self-describing record of one run, written next to CSV output.

use serde::{Deserialize, Serialize};

use crate::design::DesignReport;
use crate::scan::{FlaggedPoint, SpectrumRecord};
use crate::scenario::Scenario;

/// Noise-photon figures for a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSummary {
    pub n_fwm: f64,
    pub d_abs: f64,
    /// N_abs / N_FWM.
    pub ratio: f64,
    pub n_abs: f64,
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    DetuningScan { records: Vec<SpectrumRecord> },
    DepthScan { records: Vec<SpectrumRecord> },
    Design { report: DesignReport },
    Noise { summary: NoiseSummary },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    /// RFC 3339.
    pub timestamp: String,
    pub scenario: Scenario,
    pub results: Payload,
    pub flagged: Vec<FlaggedPoint>,
}

impl RunRecord {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::sweep_detuning;
    use crate::scenario::shipped;

    #[test]
    fn spectrum_record_round_trips_exactly() {
        let s = shipped("fig4_dabs_4.16").unwrap();
        let out = sweep_detuning(&s, s.sweep.as_ref().unwrap(), 1).unwrap();
        let r = RunRecord {
            tool: "lambda-mixer".into(),
            version: "0.0.0".into(),
            timestamp: "2026-01-01T00:00:00+00:00".into(),
            scenario: s,
            results: Payload::DetuningScan { records: out.records },
            flagged: out.flagged,
        };
        let back = RunRecord::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn garbage_rejected() {
        assert!(RunRecord::from_json("{\"tool\": 3}").is_err());
        assert!(RunRecord::from_json("").is_err());
    }
}
