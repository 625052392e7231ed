use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{EdgeKind, ErGraph, GraphError};
use crate::catalog::TableRef;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextSelection {
    pub tables: BTreeSet<TableRef>,
    pub text: String,
    /// Characters in `text`.
    pub size: usize,
}

/// Plain-text schema context for `tables`: one line per table, then one
/// line per edge whose endpoints are both selected.
///
/// ```text
/// public.orders(id:integer[PK], customer_id:integer)
/// public.orders.customer_id -> public.customers.id [implicit 0.85]
/// ```
pub fn render_context(graph: &ErGraph, tables: &BTreeSet<TableRef>) -> String {
    let mut out = String::new();
    for node in graph.nodes.iter().filter(|n| tables.contains(&n.table)) {
        let cols: Vec<String> = node
            .columns
            .iter()
            .map(|c| format!("{}:{}{}", c.name, c.declared_type, if c.is_primary_key { "[PK]" } else { "" }))
            .collect();
        let _ = writeln!(out, "{}({})", node.table, cols.join(", "));
    }
    for edge in &graph.edges {
        if !(tables.contains(&edge.from.table) && tables.contains(&edge.to.table)) {
            continue;
        }
        match (edge.kind, edge.confidence) {
            (EdgeKind::Implicit, Some(c)) => {
                let _ = writeln!(out, "{} -> {} [implicit {c:.2}]", edge.from, edge.to);
            }
            _ => {
                let _ = writeln!(out, "{} -> {} [explicit]", edge.from, edge.to);
            }
        }
    }
    out
}

pub fn context_size(rendered: &str) -> usize {
    rendered.chars().count()
}

/// Targets plus every table within `hops` dependency edges of them.
pub fn select_context(graph: &ErGraph, targets: &[TableRef], hops: usize) -> Result<ContextSelection, GraphError> {
    if let Some(missing) = targets.iter().find(|t| graph.node(t).is_none()) {
        return Err(GraphError::UnknownTarget(missing.to_string()));
    }
    let tables = graph.neighborhood(targets, hops);
    let text = render_context(graph, &tables);
    let size = context_size(&text);
    Ok(ContextSelection { tables, text, size })
}
