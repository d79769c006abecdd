//! JSON report types. Field names are part of the published schema; bump
//! [`SCHEMA_VERSION`] when changing them.

use ca_control::blocking::{BlockingVerdict, NonControllability, VisiblyBlockingReport};
use ca_control::trace::EssentialStatus;
use ca_control::{ControlPair, RegionWord};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Name of every wall-clock field; excluded from content comparisons.
pub const TIMING_FIELD: &str = "elapsed_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub rule: String,
    pub radius: usize,
    #[serde(default)]
    pub results: Vec<RegionRecord>,
    /// Finite-level status of "regionally controllable for every n".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_n_status: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocking: Vec<BlockingRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steering: Option<SteerRecord>,
    pub elapsed_ms: f64,
}

impl AnalysisReport {
    pub fn new(command: &str, rule: &str, radius: usize) -> Self {
        AnalysisReport {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            rule: rule.to_string(),
            radius,
            results: Vec::new(),
            all_n_status: None,
            trace: Vec::new(),
            blocking: Vec::new(),
            steering: None,
            elapsed_ms: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub n: usize,
    pub vertex_count: usize,
    pub scc_count: usize,
    pub regionally_controllable: bool,
    pub period: Option<u64>,
    pub primitive: bool,
    pub primitivity_index: Option<u64>,
    pub index_capped: bool,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub n: usize,
    pub k: usize,
    pub block_count: usize,
    pub strict_transitive: bool,
    pub essential_transitive: EssentialStatus,
    pub mixing: bool,
    pub essential_period: Option<u64>,
    pub approx_equals_graph: Option<bool>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockingRecord {
    Word {
        word: RegionWord,
        p: usize,
        offset: usize,
        t_max: usize,
        /// `certified`, `refuted` or `not_refuted` (inconclusive past `t_max`).
        status: String,
        bounded: BlockingVerdict,
        certificate: BlockingVerdict,
        elapsed_ms: f64,
    },
    Visibly {
        verification: VisiblyBlockingReport,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        verdict: Option<NonControllability>,
        elapsed_ms: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteerStep {
    pub t: usize,
    pub control: ControlPair,
    /// Region word after applying `control`.
    pub row: RegionWord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteerRecord {
    pub n: usize,
    pub from: RegionWord,
    pub to: RegionWord,
    pub exact_time: Option<usize>,
    /// `REACHED` or `UNREACHABLE`.
    pub result: String,
    pub horizon: Option<usize>,
    pub steps: Vec<SteerStep>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub code: u8,
    pub rule: String,
    pub scc_count: usize,
    pub regionally_controllable: bool,
    pub period: Option<u64>,
    pub primitive: bool,
    pub primitivity_index: Option<u64>,
    pub index_capped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyTable {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    /// e.g. `elementary radius-1, all 256 rules`.
    pub family: String,
    pub radius: usize,
    pub n: usize,
    pub rows: Vec<SurveyRow>,
    pub elapsed_ms: f64,
}

/// Removes every timing field, recursively.
pub fn strip_timings(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.remove(TIMING_FIELD);
            map.values_mut().for_each(strip_timings);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}
