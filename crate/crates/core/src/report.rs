//! The JSON run report.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::catalog::{DanglingReference, ExplicitDep, Warning};
use crate::config::AnalysisConfig;
use crate::inference::ImplicitDep;
use crate::pipeline::{Analysis, ColumnSampling, StageTimings};
use crate::sampler::SamplingPolicy;

pub const REPORT_VERSION: u32 = 1;

/// Decimal places kept for floats in the serialized report.
pub const FLOAT_DECIMALS: i32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSummary {
    pub schema: String,
    pub table: String,
    pub rows: u64,
    pub empty: bool,
    pub ddl_accessible: bool,
    pub primary_key: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: u32,
    pub source: String,
    pub config: AnalysisConfig,
    pub tables: Vec<TableSummary>,
    pub explicit: Vec<ExplicitDep>,
    pub dangling: Vec<DanglingReference>,
    pub implicit: Vec<ImplicitDep>,
    pub sampling: Vec<ColumnSampling>,
    pub warnings: Vec<Warning>,
    pub notes: Vec<String>,
    /// Only present when requested; wall-clock numbers differ between runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
}

impl RunReport {
    pub fn from_analysis(analysis: &Analysis, include_timings: bool) -> Self {
        let tables = analysis
            .listing
            .tables
            .iter()
            .map(|t| TableSummary {
                schema: t.table.schema.to_serialized(),
                table: t.table.table.to_serialized(),
                rows: t.rows_all,
                empty: t.is_empty,
                ddl_accessible: t.ddl_accessible,
                primary_key: t.primary_key.iter().map(|k| k.to_serialized()).collect(),
            })
            .collect();
        RunReport {
            version: REPORT_VERSION,
            source: analysis.source.clone(),
            config: analysis.config.clone(),
            tables,
            explicit: analysis.listing.explicit.clone(),
            dangling: analysis.listing.dangling.clone(),
            implicit: analysis.implicit.clone(),
            sampling: analysis.sampling.clone(),
            warnings: analysis.warnings.clone(),
            notes: run_notes(&analysis.config),
            timings: include_timings.then(|| analysis.timings.clone()),
        }
    }

    /// Pretty JSON with `version` first, all other keys sorted and floats
    /// rounded to [`FLOAT_DECIMALS`] places.
    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("report serializes"))
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn run_notes(config: &AnalysisConfig) -> Vec<String> {
    let mut notes = Vec::new();
    match config.policy {
        SamplingPolicy::LiteralEq1 => notes.push(
            "sample size: rows_min + trunc(sqrt(rows_uq/rows_all*rows_min + rows_all/rows_min)) for columns above rows_min; \
             this grows very slowly with the column, the calibrated policy (rows_min + rows_all/sqrt(rows_min)) samples more"
                .to_string(),
        ),
        SamplingPolicy::CalibratedTable1 => notes.push(
            "sample size: rows_min + trunc(rows_all/sqrt(rows_min)) for columns above rows_min".to_string(),
        ),
        _ => {}
    }
    notes.push(
        "rows_intersection is the share of the referencing column's sampled values found in the referenced key; \
         referenced_coverage is the share of the key's values that are referenced"
            .to_string(),
    );
    if config.mode == crate::inference::Mode::Accuracy {
        notes.push("accuracy mode: rows_min multiplied by 4, tables under 10*rows_min rows sampled in full".to_string());
    }
    notes
}

/// Rounds floats and orders object keys, recursively.
fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().unwrap_or_default();
            let scale = 10f64.powi(FLOAT_DECIMALS);
            let rounded = (f * scale).round() / scale;
            // avoid "-0.0"
            let rounded = if rounded == 0.0 { 0.0 } else { rounded };
            if let Some(r) = serde_json::Number::from_f64(rounded) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = std::mem::take(map).into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            for (k, mut v) in entries {
                round_floats(&mut v);
                map.insert(k, v);
            }
        }
        _ => {}
    }
}

/// Serializes `value` (an object with a `version` key) canonically.
pub fn canonical_json(value: &Value) -> String {
    let mut value = value.clone();
    round_floats(&mut value);
    let Value::Object(map) = value else {
        return serde_json::to_string_pretty(&value).expect("json") + "\n";
    };
    let mut rest: Map<String, Value> = map;
    let version = rest.remove("version");
    let body = serde_json::to_string_pretty(&Value::Object(rest)).expect("json");
    match version {
        Some(v) if body == "{}" => format!("{{\n  \"version\": {v}\n}}\n"),
        Some(v) => format!("{{\n  \"version\": {v},{}\n", &body[1..]),
        None => body + "\n",
    }
}
