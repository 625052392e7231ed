//! Constraint discovery for relational data.
//!
//! Explicit foreign keys are read from `CREATE TABLE` statements; implicit
//! ones are inferred from sampled column values and column-name synonyms.
//! Results become an ER graph that can be exported (DOT, Mermaid, JSON) or
//! pruned into a compact schema context for query generation.

pub mod bench;
pub mod catalog;
pub mod config;
pub mod erd;
pub mod inference;
pub mod name_nlp;
pub mod pipeline;
pub mod report;
pub mod sampler;

pub use catalog::{ColumnRef, Dialect, ExplicitDep, Ident, TableMeta, TableRef, TypeClass};
pub use config::AnalysisConfig;
pub use erd::ErGraph;
pub use inference::{ImplicitDep, InferenceConfig};
pub use pipeline::{analyze, Analysis};
pub use report::RunReport;
pub use sampler::{SampleSummary, SamplerConfig, SamplingPolicy};
