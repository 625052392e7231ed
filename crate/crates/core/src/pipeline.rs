//! The end-to-end run: catalog, sampling, names, inference, graph.

use std::collections::HashSet;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{open_source, CatalogError, ColumnRef, EntityListing, TableMeta, Warning};
use crate::config::{AnalysisConfig, ConfigError};
use crate::erd::{build_graph, ErGraph, GraphError};
use crate::inference::{deduplicate, infer_all, ColumnProfile, ImplicitDep};
use crate::name_nlp::{profile_name, LanguagePack};
use crate::sampler::{compute_sample_size, mix_seed, ColumnSampler};

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Source(#[from] CatalogError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Sampling counters for one column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSampling {
    #[serde(flatten)]
    pub column: ColumnRef,
    pub rows_all: u64,
    pub rows_uq: u64,
    pub rows_sampled: u64,
    pub null_count: u64,
    pub is_key: bool,
}

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub catalog_ms: f64,
    pub sampling_ms: f64,
    pub inference_ms: f64,
    pub graph_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub source: String,
    pub config: AnalysisConfig,
    pub listing: EntityListing,
    pub profiles: Vec<ColumnProfile>,
    pub sampling: Vec<ColumnSampling>,
    /// After deduplication against the explicit list.
    pub implicit: Vec<ImplicitDep>,
    pub graph: ErGraph,
    pub warnings: Vec<Warning>,
    pub timings: StageTimings,
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

/// FNV-1a, so a column's sampling seed depends only on its name.
fn name_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Runs the whole pipeline over `source` (a directory or database file).
pub fn analyze(source: &str, config: &AnalysisConfig) -> Result<Analysis, AnalyzeError> {
    config.validate()?;
    let pack = LanguagePack::load(&config.language, config.pack_dir.as_deref())
        .map_err(|e| ConfigError::invalid("lang", e))?;

    let t = Instant::now();
    let session = open_source(source, config.dialect)?;
    let listing = session.list_entities();
    let catalog_ms = ms_since(t);

    let t = Instant::now();
    let mut warnings = listing.warnings.clone();
    let mut profiles = Vec::new();
    let mut sampling = Vec::new();
    for table in &listing.tables {
        if table.columns.is_empty() {
            continue;
        }
        match profile_table(&session, table, config, &pack) {
            Ok((p, s)) => {
                profiles.extend(p);
                sampling.extend(s);
            }
            Err(e) => warnings.push(Warning::new(table.table.to_string(), format!("data not readable, skipped: {e}"))),
        }
    }
    let sampling_ms = ms_since(t);

    let t = Instant::now();
    let inference = config.inference();
    let implicit = deduplicate(infer_all(&profiles, &inference), &listing.explicit);
    let inference_ms = ms_since(t);

    let t = Instant::now();
    let graph = build_graph(&listing.tables, &listing.explicit, &implicit)?;
    let graph_ms = ms_since(t);

    warnings.sort();
    Ok(Analysis {
        source: source.to_string(),
        config: config.clone(),
        listing,
        profiles,
        sampling,
        implicit,
        graph,
        warnings,
        timings: StageTimings { catalog_ms, sampling_ms, inference_ms, graph_ms },
    })
}

/// Two scans: exact row and distinct counts, then reservoir sampling at the
/// size the policy gives for those counts.
fn profile_table(
    session: &crate::catalog::CatalogSession,
    table: &TableMeta,
    config: &AnalysisConfig,
    pack: &LanguagePack,
) -> Result<(Vec<ColumnProfile>, Vec<ColumnSampling>), CatalogError> {
    let width = table.columns.len();
    let mut distinct: Vec<HashSet<String>> = vec![HashSet::new(); width];
    let mut nulls = vec![0u64; width];
    let rows = session.scan_rows(table, &mut |row| {
        for (i, v) in row.iter().enumerate().take(width) {
            match v {
                Some(v) => {
                    if !distinct[i].contains(v) {
                        distinct[i].insert(v.clone());
                    }
                }
                None => nulls[i] += 1,
            }
        }
    })?;

    let sampler_config = config.sampler();
    let full = config.mode.samples_fully(rows, sampler_config.rows_min);
    let mut samplers: Vec<ColumnSampler> = table
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let target = if full { rows } else { compute_sample_size(rows, distinct[i].len() as u64, &sampler_config) };
            let seed = mix_seed(config.seed, name_hash(&table.table.column(c.name.clone()).to_string()));
            ColumnSampler::new(target, seed)
        })
        .collect();
    if rows > 0 {
        session.scan_rows(table, &mut |row| {
            for (s, v) in samplers.iter_mut().zip(row) {
                s.push(v.as_deref());
            }
        })?;
    }

    let single_pk = table.primary_key.len() == 1;
    let fallback = config.key_fallback && table.primary_key.is_empty();
    let mut profiles = Vec::with_capacity(width);
    let mut counters = Vec::with_capacity(width);
    for ((column, sampler), uq) in table.columns.iter().zip(samplers).zip(&distinct) {
        let mut summary = sampler.finish();
        summary.rows_all = rows;
        summary.rows_uq = uq.len() as u64;
        let unique = rows > 0 && summary.null_count == 0 && summary.rows_uq == rows;
        let is_key = (single_pk && column.is_primary_key) || (fallback && unique);
        let name = profile_name(column.name.as_str(), config.confidence, config.confidence_coeff, pack);
        let column_ref = table.table.column(column.name.clone());
        counters.push(ColumnSampling {
            column: column_ref.clone(),
            rows_all: summary.rows_all,
            rows_uq: summary.rows_uq,
            rows_sampled: summary.rows_sampled,
            null_count: summary.null_count,
            is_key,
        });
        profiles.push(ColumnProfile {
            column: column_ref,
            type_class: column.type_class,
            is_key,
            summary,
            synonyms: name.synonyms,
        });
    }
    Ok((profiles, counters))
}

/// Convenience for callers holding a path.
pub fn analyze_path(source: &Path, config: &AnalysisConfig) -> Result<Analysis, AnalyzeError> {
    analyze(&source.to_string_lossy(), config)
}
