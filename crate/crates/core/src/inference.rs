//! Candidate-pair scoring, acceptance criteria and deduplication.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{ColumnRef, ExplicitDep, TypeClass};
use crate::config::ConfigError;
use crate::name_nlp::SynonymSet;
use crate::sampler::{SampleSummary, DEFAULT_ROWS_MIN};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;
pub const DEFAULT_CONFIDENCE_COEFF: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Balance,
    /// Samples four times more rows and reads small tables whole.
    Accuracy,
}

impl Mode {
    pub fn effective_rows_min(self, rows_min: u64) -> u64 {
        match self {
            Mode::Balance => rows_min,
            Mode::Accuracy => rows_min.saturating_mul(4),
        }
    }

    /// Whether a table of `rows_all` rows is read in full regardless of policy.
    pub fn samples_fully(self, rows_all: u64, rows_min: u64) -> bool {
        match self {
            Mode::Balance => false,
            Mode::Accuracy => rows_all < rows_min.saturating_mul(10),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Balance => "balance",
            Mode::Accuracy => "accuracy",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "balance" => Ok(Mode::Balance),
            "accuracy" => Ok(Mode::Accuracy),
            _ => Err(format!("unknown mode '{s}' (expected balance or accuracy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub confidence: f64,
    pub confidence_coeff: f64,
    pub mode: Mode,
    pub rows_min: u64,
    pub language: String,
    pub seed: u64,
    /// Also pair columns of the same table.
    pub same_table_pairs: bool,
    /// Treat fully unique, null-free columns as keys in tables without a
    /// declared primary key.
    pub key_fallback: bool,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            confidence: DEFAULT_CONFIDENCE,
            confidence_coeff: DEFAULT_CONFIDENCE_COEFF,
            mode: Mode::Balance,
            rows_min: DEFAULT_ROWS_MIN,
            language: "en".to_string(),
            seed: 0,
            same_table_pairs: false,
            key_fallback: true,
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(ConfigError::out_of_range("confidence", self.confidence, "0 <= confidence <= 1"));
        }
        if !(self.confidence_coeff > 0.0 && self.confidence_coeff.is_finite()) {
            return Err(ConfigError::out_of_range("confidence-coeff", self.confidence_coeff, "confidence-coeff > 0"));
        }
        if self.rows_min == 0 {
            return Err(ConfigError::out_of_range("rows-min", self.rows_min, "rows-min >= 1"));
        }
        if self.language.trim().is_empty() {
            return Err(ConfigError::out_of_range("lang", "\"\"", "a language code such as en"));
        }
        Ok(())
    }
}

/// Acceptance criteria a pair can satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Value inclusion reaches the adapted confidence.
    Inclusion,
    /// The referenced side is a key.
    KeySide,
    /// The names share at least one synonym.
    SharedSynonyms,
    /// Both columns have the same known type class.
    SameTypeClass,
}

/// Everything inference needs to know about one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub column: ColumnRef,
    pub type_class: TypeClass,
    pub is_key: bool,
    pub summary: SampleSummary,
    pub synonyms: SynonymSet,
}

/// Two columns from (by default) different tables.
#[derive(Debug, Clone, Copy)]
pub struct CandidatePair<'a> {
    pub side_i: &'a ColumnProfile,
    pub side_j: &'a ColumnProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitDep {
    pub from: ColumnRef,
    pub to: ColumnRef,
    /// Share of the referencing column's sampled values found in the
    /// referenced column.
    pub rows_intersection: f64,
    /// Share of the referenced column's sampled values found in the
    /// referencing column. Diagnostic only.
    pub referenced_coverage: f64,
    pub synonyms_intersection: usize,
    pub adapted_confidence: f64,
    pub criteria_trace: Vec<Criterion>,
}

impl ImplicitDep {
    pub fn endpoints(&self) -> (&ColumnRef, &ColumnRef) {
        (&self.from, &self.to)
    }
}

/// `|values_i ∩ values_j| / |values_j|`, or 0 when `values_j` is empty.
pub fn rows_intersection(values_i: &BTreeSet<String>, values_j: &BTreeSet<String>) -> f64 {
    if values_j.is_empty() {
        return 0.0;
    }
    let (small, large) = if values_i.len() <= values_j.len() { (values_i, values_j) } else { (values_j, values_i) };
    let shared = small.iter().filter(|v| large.contains(*v)).count();
    shared as f64 / values_j.len() as f64
}

pub fn synonyms_intersection(set_i: &SynonymSet, set_j: &SynonymSet) -> usize {
    set_i.intersection_count(set_j)
}

/// `confidence - synonyms_intersection * confidence_coeff`, clamped to [0, 1].
pub fn adapt_confidence(confidence: f64, confidence_coeff: f64, synonyms_intersection: usize) -> f64 {
    let raw = confidence - synonyms_intersection as f64 * confidence_coeff;
    // keep 0.95 - 2 * 0.05 at 0.85 rather than 0.8499999999999999
    let rounded = (raw * 1e12).round() / 1e12;
    rounded.clamp(0.0, 1.0)
}

/// Scores `side_i -> side_j`. If only `side_i` is a key the pair is
/// flipped so the reference always points at a key.
pub fn evaluate_pair(pair: CandidatePair<'_>, config: &InferenceConfig) -> Option<ImplicitDep> {
    let (from, to) = match (pair.side_i.is_key, pair.side_j.is_key) {
        (_, true) => (pair.side_i, pair.side_j),
        (true, false) => (pair.side_j, pair.side_i),
        (false, false) => return None,
    };
    if from.column == to.column {
        return None;
    }
    let mut trace = vec![Criterion::KeySide];

    let shared = synonyms_intersection(&from.synonyms, &to.synonyms);
    if shared > 0 {
        trace.push(Criterion::SharedSynonyms);
    }
    let same_class = from.type_class == to.type_class && from.type_class != TypeClass::Unknown;
    if same_class {
        trace.push(Criterion::SameTypeClass);
    } else if shared == 0 {
        return None;
    }

    let adapted = adapt_confidence(config.confidence, config.confidence_coeff, shared);
    let inclusion = rows_intersection(&to.summary.values, &from.summary.values);
    if from.summary.values.is_empty() || inclusion < adapted {
        return None;
    }
    trace.insert(0, Criterion::Inclusion);

    Some(ImplicitDep {
        from: from.column.clone(),
        to: to.column.clone(),
        rows_intersection: inclusion,
        referenced_coverage: rows_intersection(&from.summary.values, &to.summary.values),
        synonyms_intersection: shared,
        adapted_confidence: adapted,
        criteria_trace: trace,
    })
}

/// Re-checks a stored dependency against its own evidence.
pub fn satisfies_criteria(dep: &ImplicitDep, config: &InferenceConfig) -> bool {
    let expected = adapt_confidence(config.confidence, config.confidence_coeff, dep.synonyms_intersection);
    let has = |c| dep.criteria_trace.contains(&c);
    (dep.adapted_confidence - expected).abs() < 1e-9
        && dep.rows_intersection >= dep.adapted_confidence
        && has(Criterion::Inclusion)
        && has(Criterion::KeySide)
        && (dep.synonyms_intersection > 0 || has(Criterion::SameTypeClass))
        && dep.from != dep.to
        && (config.same_table_pairs || dep.from.table != dep.to.table)
}

/// Evaluates every cross-table column pair once per direction that ends at
/// a key. Columns with no sampled values (empty tables, all-NULL columns)
/// take no part. The result is sorted by `(from, to)`.
pub fn infer_all(profiles: &[ColumnProfile], config: &InferenceConfig) -> Vec<ImplicitDep> {
    let live: Vec<&ColumnProfile> = profiles.iter().filter(|p| !p.summary.values.is_empty()).collect();
    let mut out = Vec::new();
    for (a, pa) in live.iter().enumerate() {
        for pb in &live[a + 1..] {
            if pa.column == pb.column || (!config.same_table_pairs && pa.column.table == pb.column.table) {
                continue;
            }
            if pb.is_key {
                out.extend(evaluate_pair(CandidatePair { side_i: pa, side_j: pb }, config));
            }
            if pa.is_key {
                out.extend(evaluate_pair(CandidatePair { side_i: pb, side_j: pa }, config));
            }
        }
    }
    out.sort_by(|x, y| x.endpoints().cmp(&y.endpoints()));
    out.dedup_by(|x, y| x.endpoints() == y.endpoints());
    out
}

/// Drops implicit dependencies already declared with the same direction.
pub fn deduplicate(implicit: Vec<ImplicitDep>, explicit: &[ExplicitDep]) -> Vec<ImplicitDep> {
    let declared: HashSet<(&ColumnRef, &ColumnRef)> = explicit.iter().map(|d| (&d.from, &d.to)).collect();
    implicit.into_iter().filter(|d| !declared.contains(&(&d.from, &d.to))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::TableRef;

    fn values(v: &[i64]) -> BTreeSet<String> {
        v.iter().map(i64::to_string).collect()
    }

    fn profile(table: &str, column: &str, class: TypeClass, key: bool, v: &[i64], syn: &[&str]) -> ColumnProfile {
        let values = values(v);
        ColumnProfile {
            column: TableRef::new("public", table).column(column),
            type_class: class,
            is_key: key,
            summary: SampleSummary {
                rows_all: v.len() as u64,
                rows_uq: values.len() as u64,
                rows_sampled: v.len() as u64,
                values,
                null_count: 0,
            },
            synonyms: syn.iter().copied().collect(),
        }
    }

    #[test]
    fn rows_intersection_examples() {
        // |{2,3} ∩ {1,2,3,4}| = 2 by enumeration
        assert_eq!(rows_intersection(&values(&[2, 3]), &values(&[1, 2, 3, 4])), 2.0 / 4.0);
        assert_eq!(rows_intersection(&values(&[1, 2]), &BTreeSet::new()), 0.0);
        assert_eq!(rows_intersection(&values(&[5, 6]), &values(&[5, 6])), 1.0);
    }

    #[test]
    fn synonyms_intersection_examples() {
        let a: SynonymSet = ["customer", "client"].into_iter().collect();
        let b: SynonymSet = ["client", "buyer"].into_iter().collect();
        let c: SynonymSet = ["order"].into_iter().collect();
        assert_eq!(synonyms_intersection(&a, &b), 1);
        assert_eq!(synonyms_intersection(&a, &c), 0);
        assert_eq!(synonyms_intersection(&a, &a), 2);
    }

    #[test]
    fn adapt_confidence_examples() {
        assert_eq!(adapt_confidence(0.95, 0.05, 0), 0.95);
        assert_eq!(adapt_confidence(0.95, 0.05, 2), 0.85);
        // 0.95 - 30 * 0.05 = -0.55 before the clamp
        assert_eq!(adapt_confidence(0.95, 0.05, 30), 0.0);
    }

    #[test]
    fn accepts_a_pair_meeting_every_criterion() {
        // 97 of 100 referencing values present on the key side
        let mut fk: Vec<i64> = (1..=97).collect();
        fk.extend([1001, 1002, 1003]);
        let i = profile("orders", "customer_id", TypeClass::Digits, false, &fk, &["customer", "client"]);
        let j = profile("customers", "id", TypeClass::Digits, true, &(1..=200).collect::<Vec<_>>(), &["id", "customer"]);
        // one shared synonym: 1.0 - 1 * 0.05 = 0.95
        let config = InferenceConfig { confidence: 1.0, confidence_coeff: 0.05, ..Default::default() };
        let dep = evaluate_pair(CandidatePair { side_i: &i, side_j: &j }, &config).unwrap();
        assert_eq!(dep.adapted_confidence, 0.95);
        assert_eq!(dep.rows_intersection, 0.97);
        assert_eq!(dep.referenced_coverage, 97.0 / 200.0);
        assert_eq!(dep.synonyms_intersection, 1);
        assert_eq!(dep.to, j.column);
        assert!(satisfies_criteria(&dep, &config));
        assert_eq!(
            dep.criteria_trace,
            [Criterion::Inclusion, Criterion::KeySide, Criterion::SharedSynonyms, Criterion::SameTypeClass]
        );
    }

    #[test]
    fn rejects_low_inclusion_and_keyless_pairs() {
        let config = InferenceConfig::default();
        let half: Vec<i64> = (1..=50).chain(501..=550).collect();
        let i = profile("a", "x", TypeClass::Digits, false, &half, &["x"]);
        let j = profile("b", "x", TypeClass::Digits, true, &(1..=100).collect::<Vec<_>>(), &["x"]);
        assert!(evaluate_pair(CandidatePair { side_i: &i, side_j: &j }, &config).is_none());

        let i = profile("a", "x", TypeClass::Digits, false, &[1, 2], &["x"]);
        let j = profile("b", "y", TypeClass::Digits, false, &[1, 2], &["y"]);
        assert!(evaluate_pair(CandidatePair { side_i: &i, side_j: &j }, &config).is_none());
    }

    #[test]
    fn type_gate_applies_only_without_shared_synonyms() {
        let config = InferenceConfig::default();
        let i = profile("a", "code", TypeClass::Character, false, &[1, 2], &["code"]);
        let j = profile("b", "id", TypeClass::Digits, true, &[1, 2, 3], &["id"]);
        assert!(evaluate_pair(CandidatePair { side_i: &i, side_j: &j }, &config).is_none());
        let i = profile("a", "code", TypeClass::Character, false, &[1, 2], &["code", "id"]);
        assert!(evaluate_pair(CandidatePair { side_i: &i, side_j: &j }, &config).is_some());
        let i = profile("a", "code", TypeClass::Unknown, false, &[1, 2], &["code"]);
        let j = profile("b", "id", TypeClass::Unknown, true, &[1, 2, 3], &["id"]);
        assert!(evaluate_pair(CandidatePair { side_i: &i, side_j: &j }, &config).is_none());
    }

    #[test]
    fn key_side_becomes_the_target() {
        let config = InferenceConfig::default();
        let key = profile("users", "id", TypeClass::Digits, true, &[1, 2, 3], &["user"]);
        let fk = profile("posts", "owner", TypeClass::Digits, false, &[1, 2], &["owner"]);
        let dep = evaluate_pair(CandidatePair { side_i: &key, side_j: &fk }, &config).unwrap();
        assert_eq!(dep.from, fk.column);
        assert_eq!(dep.to, key.column);
    }

    #[test]
    fn infer_all_finds_the_planted_reference() {
        let config = InferenceConfig::default();
        let profiles = vec![
            profile("customers", "id", TypeClass::Digits, true, &(1..=10).collect::<Vec<_>>(), &["id"]),
            profile("customers", "name", TypeClass::Character, false, &[], &["name"]),
            profile("orders", "id", TypeClass::Digits, true, &(100..=120).collect::<Vec<_>>(), &["id"]),
            profile("orders", "customer_id", TypeClass::Digits, false, &[1, 2, 3, 3, 7], &["customer"]),
        ];
        let deps = infer_all(&profiles, &config);
        assert_eq!(deps.len(), 1);
        assert_eq!(deps[0].from, profiles[3].column);
        assert_eq!(deps[0].to, profiles[0].column);
        assert_eq!(deps[0].adapted_confidence, 0.95);
        assert_eq!(deps[0].rows_intersection, 1.0);
    }

    #[test]
    fn infer_all_skips_same_table_and_empty_columns() {
        let profiles = vec![
            profile("t", "id", TypeClass::Digits, true, &[1, 2, 3], &["t"]),
            profile("t", "parent", TypeClass::Digits, false, &[1, 2], &["parent"]),
            profile("e", "id", TypeClass::Digits, true, &[], &["e"]),
        ];
        assert!(infer_all(&profiles, &InferenceConfig::default()).is_empty());
        let config = InferenceConfig { same_table_pairs: true, ..Default::default() };
        let deps = infer_all(&profiles, &config);
        assert_eq!(deps.len(), 1);
        assert_eq!(deps[0].from.column.as_str(), "parent");
    }

    #[test]
    fn both_keys_emit_both_directions() {
        let profiles = vec![
            profile("a", "id", TypeClass::Digits, true, &[1, 2, 3], &["a"]),
            profile("b", "id", TypeClass::Digits, true, &[1, 2, 3], &["b"]),
        ];
        let deps = infer_all(&profiles, &InferenceConfig::default());
        assert_eq!(deps.len(), 2);
        assert_eq!(deps[0].from, deps[1].to);
    }

    #[test]
    fn deduplicate_is_direction_sensitive() {
        let orders = TableRef::new("public", "orders");
        let customers = TableRef::new("public", "customers");
        let dep = |from: ColumnRef, to: ColumnRef| ImplicitDep {
            from,
            to,
            rows_intersection: 1.0,
            referenced_coverage: 1.0,
            synonyms_intersection: 0,
            adapted_confidence: 0.95,
            criteria_trace: vec![],
        };
        let forward = dep(orders.column("customerid"), customers.column("id"));
        let reversed = dep(customers.column("id"), orders.column("customerid"));
        let explicit = vec![ExplicitDep { from: orders.column("customerid"), to: customers.column("id"), group: None }];

        let kept = deduplicate(vec![forward.clone(), reversed.clone()], &explicit);
        assert_eq!(kept, vec![reversed.clone()]);
        assert_eq!(deduplicate(kept.clone(), &explicit), kept);
        assert_eq!(deduplicate(vec![forward.clone()], &[]), vec![forward]);
    }

    #[test]
    fn validate_names_the_field() {
        let err = InferenceConfig { confidence: 1.5, ..Default::default() }.validate().unwrap_err();
        assert!(err.to_string().contains("confidence"));
        assert!(InferenceConfig { confidence_coeff: 0.0, ..Default::default() }.validate().is_err());
        assert!(InferenceConfig::default().validate().is_ok());
    }

    #[test]
    fn accuracy_mode_samples_more() {
        assert_eq!(Mode::Accuracy.effective_rows_min(15000), 60000);
        assert_eq!(Mode::Balance.effective_rows_min(15000), 15000);
        assert!(Mode::Accuracy.samples_fully(149_999, 15000));
        assert!(!Mode::Balance.samples_fully(10, 15000));
    }
}
