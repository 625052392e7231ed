//! Synthetic databases with known foreign keys, and scoring against them.

mod generate;
mod stats;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{open_source, CatalogError, ColumnRef, TableRef};
use crate::config::AnalysisConfig;
use crate::inference::ImplicitDep;
use crate::pipeline::{analyze, AnalyzeError};
use crate::report::{canonical_json, RunReport};
use crate::sampler::{compare_on_population, SamplerError, SseReport, ValueDistribution, DEFAULT_LAUNCHES};

pub use generate::{generate_database, GeneratedDb};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot write {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("invalid bench spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
    #[error(transparent)]
    Source(#[from] CatalogError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Naming {
    #[default]
    Snake,
    Camel,
    /// Alternates snake and camel case table by table.
    Mixed,
}

/// Table structure to generate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layout {
    /// Random tables; each table after the first references an earlier
    /// one with probability `fk_density`.
    Random {
        schemas: usize,
        tables_per_schema: usize,
        /// Inclusive `[min, max]`, counting key and reference columns.
        columns_per_table: [usize; 2],
        fk_density: f64,
    },
    /// Eight tables shaped like the Stack Exchange STATS database, row
    /// counts multiplied by `scale`, with twelve references.
    StatsMimic { scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchSpec {
    pub layout: Layout,
    pub naming: Naming,
    /// Values of measure columns.
    pub distribution: ValueDistribution,
    /// Inclusive `[min, max]`; ignored by the STATS layout.
    pub rows_per_table: [u64; 2],
    pub seed: u64,
    /// Write FOREIGN KEY clauses into the DDL as well.
    pub declare_foreign_keys: bool,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            layout: Layout::Random { schemas: 1, tables_per_schema: 4, columns_per_table: [3, 6], fk_density: 0.5 },
            naming: Naming::Snake,
            distribution: ValueDistribution::Normal { mean: 100.0, std_dev: 15.0 },
            rows_per_table: [50, 200],
            seed: 0,
            declare_foreign_keys: false,
        }
    }
}

impl BenchSpec {
    pub fn stats_mimic(scale: f64, seed: u64) -> Self {
        BenchSpec { layout: Layout::StatsMimic { scale }, seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Spec(m.to_string()));
        match &self.layout {
            Layout::Random { columns_per_table, fk_density, .. } => {
                if !(0.0..=1.0).contains(fk_density) {
                    return bad("fk_density must be within [0, 1]");
                }
                if columns_per_table[0] > columns_per_table[1] {
                    return bad("columns_per_table must be [min, max] with min <= max");
                }
            }
            Layout::StatsMimic { scale } => {
                if !(*scale > 0.0 && scale.is_finite()) {
                    return bad("scale must be positive");
                }
            }
        }
        if self.rows_per_table[0] > self.rows_per_table[1] {
            return bad("rows_per_table must be [min, max] with min <= max");
        }
        Ok(())
    }
}

/// A directed column-to-column dependency without evidence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dependency {
    pub from: ColumnRef,
    pub to: ColumnRef,
}

impl From<&ImplicitDep> for Dependency {
    fn from(d: &ImplicitDep) -> Self {
        Dependency { from: d.from.clone(), to: d.to.clone() }
    }
}

/// The references a generator planted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub dependencies: Vec<Dependency>,
}

impl GroundTruth {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path).map_err(|e| BenchError::Io(path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| BenchError::Spec(format!("{}: {e}", path.display())))
    }

    pub fn tables(&self) -> BTreeSet<TableRef> {
        self.dependencies.iter().flat_map(|d| [d.from.table.clone(), d.to.table.clone()]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub gt_count: usize,
    pub predicted_count: usize,
    pub matched_count: usize,
    /// `gt_count / predicted_count`; `None` when nothing was predicted but
    /// the ground truth is not empty.
    pub literal_accuracy: Option<f64>,
    pub literal_undefined: bool,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Predicted but not in the ground truth.
    pub hallucinated: Vec<Dependency>,
    /// In the ground truth but not predicted.
    pub missed: Vec<Dependency>,
}

/// Scores predictions by exact endpoint match (direction included).
pub fn evaluate_accuracy(predicted: &[Dependency], gt: &GroundTruth) -> EvaluationReport {
    let predicted: BTreeSet<&Dependency> = predicted.iter().collect();
    let truth: BTreeSet<&Dependency> = gt.dependencies.iter().collect();
    let matched = predicted.intersection(&truth).count();
    let (p, g) = (predicted.len(), truth.len());
    let literal_accuracy = match (g, p) {
        (0, 0) => Some(1.0),
        (_, 0) => None,
        _ => Some(g as f64 / p as f64),
    };
    let precision = if p == 0 { 0.0 } else { matched as f64 / p as f64 };
    let recall = if g == 0 { 0.0 } else { matched as f64 / g as f64 };
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    EvaluationReport {
        gt_count: g,
        predicted_count: p,
        matched_count: matched,
        literal_accuracy,
        literal_undefined: literal_accuracy.is_none(),
        precision,
        recall,
        f1,
        hallucinated: predicted.difference(&truth).map(|d| (*d).clone()).collect(),
        missed: truth.difference(&predicted).map(|d| (*d).clone()).collect(),
    }
}

/// Generation, discovery and scoring in one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub version: u32,
    pub spec: BenchSpec,
    pub config: AnalysisConfig,
    pub ground_truth: GroundTruth,
    pub evaluation: EvaluationReport,
    pub sse: SseReport,
    pub report: RunReport,
}

impl BenchRun {
    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("bench run serializes"))
    }
}

/// Generates `spec` into `work_dir`, analyzes it and scores the implicit
/// dependencies. The SSE part samples the largest measure column.
pub fn run_benchmark(spec: &BenchSpec, config: &AnalysisConfig, work_dir: &Path) -> Result<BenchRun, BenchError> {
    let db = generate_database(spec, work_dir)?;
    let source = work_dir.to_string_lossy().to_string();
    let analysis = analyze(&source, config)?;
    let predicted: Vec<Dependency> = analysis.implicit.iter().map(Dependency::from).collect();
    let evaluation = evaluate_accuracy(&predicted, &db.ground_truth);

    let sampler = config.sampler();
    let sse = match &db.measure_column {
        Some(column) => {
            let population = read_numeric_column(&source, config, column)?;
            compare_on_population(spec.distribution, &population, &sampler, DEFAULT_LAUNCHES)?
        }
        None => SseReport::empty(spec.distribution, &sampler),
    };
    Ok(BenchRun {
        version: crate::report::REPORT_VERSION,
        spec: spec.clone(),
        config: config.clone(),
        ground_truth: db.ground_truth,
        evaluation,
        sse,
        report: RunReport::from_analysis(&analysis, false),
    })
}

fn read_numeric_column(source: &str, config: &AnalysisConfig, column: &ColumnRef) -> Result<Vec<f64>, BenchError> {
    let session = open_source(source, config.dialect)?;
    let listing = session.list_entities();
    let Some(table) = listing.table(&column.table) else { return Ok(Vec::new()) };
    let Some(index) = table.columns.iter().position(|c| c.name == column.column) else { return Ok(Vec::new()) };
    let mut values = Vec::new();
    session.scan_rows(table, &mut |row| {
        if let Some(v) = row.get(index).and_then(|v| v.as_deref()).and_then(|v| v.parse::<f64>().ok()) {
            values.push(v);
        }
    })?;
    Ok(values)
}

/// Writes a JSON document, creating parent directories.
pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), BenchError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| BenchError::Io(parent.display().to_string(), e))?;
    }
    fs::write(path, contents).map_err(|e| BenchError::Io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dep(from: &str, to: &str) -> Dependency {
        let c = |s: &str| {
            let (t, c) = s.split_once('.').unwrap();
            TableRef::new("public", t).column(c)
        };
        Dependency { from: c(from), to: c(to) }
    }

    fn gt(deps: &[Dependency]) -> GroundTruth {
        GroundTruth { dependencies: deps.to_vec() }
    }

    #[test]
    fn literal_metric_is_the_count_ratio() {
        let truth: Vec<_> = (0..12).map(|i| dep(&format!("a{i}.x"), "b.id")).collect();
        let predicted: Vec<_> = (0..15).map(|i| dep(&format!("a{i}.x"), "b.id")).collect();
        let r = evaluate_accuracy(&predicted, &gt(&truth));
        // 12 / 15
        assert_eq!(r.literal_accuracy, Some(0.8));
        assert_eq!(r.recall, 1.0);
        assert_eq!(r.precision, 0.8);
        assert_eq!(r.hallucinated.len(), r.predicted_count - r.matched_count);
    }

    #[test]
    fn perfect_prediction() {
        let truth = vec![dep("a.x", "b.id"), dep("c.y", "b.id")];
        let r = evaluate_accuracy(&truth, &gt(&truth));
        assert_eq!((r.literal_accuracy, r.precision, r.recall, r.f1), (Some(1.0), 1.0, 1.0, 1.0));
    }

    #[test]
    fn disjoint_prediction_shows_why_both_metrics_exist() {
        let truth = vec![dep("a.x", "b.id"), dep("c.y", "b.id"), dep("d.z", "b.id")];
        let predicted = vec![dep("b.id", "a.x"), dep("b.id", "c.y"), dep("b.id", "d.z")];
        let r = evaluate_accuracy(&predicted, &gt(&truth));
        assert_eq!(r.literal_accuracy, Some(1.0));
        assert_eq!(r.precision, 0.0);
        assert_eq!(r.f1, 0.0);
        assert_eq!(r.missed.len(), 3);
    }

    #[test]
    fn empty_cases() {
        let r = evaluate_accuracy(&[], &GroundTruth::default());
        assert_eq!(r.literal_accuracy, Some(1.0));
        assert_eq!((r.gt_count, r.predicted_count, r.precision, r.recall), (0, 0, 0.0, 0.0));
        let r = evaluate_accuracy(&[], &gt(&[dep("a.x", "b.id")]));
        assert!(r.literal_undefined && r.literal_accuracy.is_none());
    }

    #[test]
    fn spec_json_defaults() {
        let spec: BenchSpec = serde_json::from_str(r#"{"layout": {"kind": "stats_mimic", "scale": 0.01}, "seed": 4}"#).unwrap();
        assert_eq!(spec, BenchSpec::stats_mimic(0.01, 4));
        assert!(BenchSpec { rows_per_table: [5, 1], ..Default::default() }.validate().is_err());
    }
}
