//! Entity enumeration, DDL parsing and explicit foreign-key extraction.

mod classify;
pub mod ddl;
mod source;
mod types;

use thiserror::Error;

pub use classify::classify_type;
pub use ddl::{parse_ddl, parse_script, DdlError, ForeignKeyClause, ParsedTable};
pub use source::{open_source, CatalogSession, EntityListing, SourceLocator};
pub use types::{
    ColumnMeta, ColumnRef, DanglingReference, Dialect, ExplicitDep, Ident, TableMeta, TableRef,
    TypeClass, Warning,
};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("source unreachable: {0}")]
    Unreachable(String),
    #[error("malformed source locator: {0}")]
    MalformedLocator(String),
    #[error("unsupported dialect {dialect} for a {source_kind}")]
    UnsupportedDialect { dialect: Dialect, source_kind: &'static str },
    #[error("live connections are not supported by this build: {0}")]
    UnsupportedConnection(String),
    #[error("cannot read {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("cannot read data from {0}: {1}")]
    Data(String, String),
}
