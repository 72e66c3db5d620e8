use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sidon_core::alpha_lab::{CONGRUENCE_CEILING, TREND_CEILING};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_num: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prune: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_stride: Option<u64>,
    pub precision_start_bits: u32,
    pub precision_cap_bits: u32,
    /// Decimal enclosure of `β = 1 + √2` used for the class split.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<[String; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounts {
    pub elements: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duplicates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bad_tuples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedElement {
    pub p: u64,
    pub class: u32,
    pub a: String,
}

/// Ceilings used by the grid experiments. They are choices of this tool,
/// standing in for unspecified implied constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestConstants {
    pub congruence_ceiling: u64,
    pub trend_ceiling: f64,
}

impl Default for TestConstants {
    fn default() -> Self {
        TestConstants { congruence_ceiling: CONGRUENCE_CEILING, trend_ceiling: TREND_CEILING }
    }
}

/// Everything needed to rerun a command and get identical output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub version: String,
    pub params: RunParams,
    pub counts: RunCounts,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub removed: Vec<RemovedElement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    pub test_constants: TestConstants,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: Vec<String>, params: RunParams) -> Self {
        RunManifest {
            command,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            params,
            counts: RunCounts::default(),
            removed: Vec::new(),
            verified: None,
            test_constants: TestConstants::default(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn time(&mut self, stage: &str, d: Duration) {
        self.timings_ms.insert(stage.to_owned(), d.as_secs_f64() * 1e3);
    }

    pub fn write_path(&self, path: &std::path::Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(path, text + "\n")
    }
}

/// `<out>.json` beside an output file.
pub fn manifest_path(out: &std::path::Path) -> std::path::PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    s.into()
}
