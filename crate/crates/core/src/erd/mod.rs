//! Dependency graph over tables, diagram export and context selection.

mod context;
mod export;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{ColumnRef, ExplicitDep, Ident, TableMeta, TableRef};
use crate::inference::ImplicitDep;

pub use context::{context_size, render_context, select_context, ContextSelection};
pub use export::{export, to_dot, to_mermaid};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("edge {edge} references unknown table {table}")]
    UnknownTable { edge: String, table: String },
    #[error("edge {0} has the wrong confidence for its kind")]
    BadConfidence(String),
    #[error("unknown entity {0}")]
    UnknownTarget(String),
    #[error("invalid graph document: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeColumn {
    pub name: Ident,
    pub declared_type: String,
    pub is_primary_key: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub table: TableRef,
    pub is_empty: bool,
    pub columns: Vec<NodeColumn>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Explicit,
    Implicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: ColumnRef,
    pub to: ColumnRef,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from, self.to)
    }
}

/// Tables as nodes, dependencies as column-to-column edges. Nodes are
/// sorted by table; explicit edges come before implicit ones, each sorted
/// by endpoints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagramFormat {
    Dot,
    Mermaid,
    Json,
}

impl FromStr for DiagramFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" | "graphviz" => Ok(DiagramFormat::Dot),
            "mermaid" | "mmd" => Ok(DiagramFormat::Mermaid),
            "json" => Ok(DiagramFormat::Json),
            _ => Err(format!("unknown diagram format '{s}' (expected dot, mermaid or json)")),
        }
    }
}

impl fmt::Display for DiagramFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagramFormat::Dot => "dot",
            DiagramFormat::Mermaid => "mermaid",
            DiagramFormat::Json => "json",
        })
    }
}

/// One node per table, one edge per dependency. The implicit list is
/// expected to be deduplicated already.
pub fn build_graph(
    tables: &[TableMeta],
    explicit: &[ExplicitDep],
    implicit: &[ImplicitDep],
) -> Result<ErGraph, GraphError> {
    let mut nodes: Vec<Node> = tables
        .iter()
        .map(|t| Node {
            table: t.table.clone(),
            is_empty: t.is_empty,
            columns: t
                .columns
                .iter()
                .map(|c| NodeColumn {
                    name: c.name.clone(),
                    declared_type: c.declared_type.clone(),
                    is_primary_key: c.is_primary_key,
                })
                .collect(),
        })
        .collect();
    nodes.sort_by(|a, b| a.table.cmp(&b.table));
    nodes.dedup_by(|a, b| a.table == b.table);

    let mut edges: Vec<Edge> = explicit
        .iter()
        .map(|d| Edge { from: d.from.clone(), to: d.to.clone(), kind: EdgeKind::Explicit, confidence: None })
        .chain(implicit.iter().map(|d| Edge {
            from: d.from.clone(),
            to: d.to.clone(),
            kind: EdgeKind::Implicit,
            confidence: Some(d.adapted_confidence),
        }))
        .collect();
    edges.sort_by(|a, b| (a.kind, &a.from, &a.to).cmp(&(b.kind, &b.from, &b.to)));
    edges.dedup_by(|a, b| (a.kind, &a.from, &a.to) == (b.kind, &b.from, &b.to));

    let graph = ErGraph { nodes, edges };
    graph.check()?;
    Ok(graph)
}

impl ErGraph {
    fn check(&self) -> Result<(), GraphError> {
        let known: BTreeSet<&TableRef> = self.nodes.iter().map(|n| &n.table).collect();
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if !known.contains(&end.table) {
                    return Err(GraphError::UnknownTable { edge: e.to_string(), table: end.table.to_string() });
                }
            }
            let ok = match e.kind {
                EdgeKind::Explicit => e.confidence.is_none(),
                EdgeKind::Implicit => e.confidence.is_some_and(|c| (0.0..=1.0).contains(&c)),
            };
            if !ok {
                return Err(GraphError::BadConfidence(e.to_string()));
            }
        }
        Ok(())
    }

    pub fn node(&self, table: &TableRef) -> Option<&Node> {
        self.nodes.iter().find(|n| &n.table == table)
    }

    pub fn tables(&self) -> BTreeSet<TableRef> {
        self.nodes.iter().map(|n| n.table.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let graph: ErGraph = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        graph.check()?;
        Ok(graph)
    }

    /// Undirected table adjacency; edges of both kinds count.
    fn adjacency(&self) -> BTreeMap<&TableRef, BTreeSet<&TableRef>> {
        let mut adj: BTreeMap<&TableRef, BTreeSet<&TableRef>> =
            self.nodes.iter().map(|n| (&n.table, BTreeSet::new())).collect();
        for e in &self.edges {
            if e.from.table != e.to.table {
                adj.entry(&e.from.table).or_default().insert(&e.to.table);
                adj.entry(&e.to.table).or_default().insert(&e.from.table);
            }
        }
        adj
    }

    /// Tables within `hops` edges of any of `start`.
    pub fn neighborhood(&self, start: &[TableRef], hops: usize) -> BTreeSet<TableRef> {
        let adj = self.adjacency();
        let mut seen: BTreeSet<&TableRef> = BTreeSet::new();
        let mut queue = VecDeque::new();
        for t in start {
            if let Some((key, _)) = adj.get_key_value(t) {
                if seen.insert(*key) {
                    queue.push_back((*key, 0));
                }
            }
        }
        while let Some((t, d)) = queue.pop_front() {
            if d == hops {
                continue;
            }
            for next in &adj[t] {
                if seen.insert(*next) {
                    queue.push_back((*next, d + 1));
                }
            }
        }
        seen.into_iter().cloned().collect()
    }

    /// Longest shortest path between two connected tables.
    pub fn diameter(&self) -> usize {
        let adj = self.adjacency();
        let mut best = 0;
        for start in adj.keys() {
            let mut dist: BTreeMap<&TableRef, usize> = BTreeMap::from([(*start, 0)]);
            let mut queue = VecDeque::from([*start]);
            while let Some(t) = queue.pop_front() {
                let d = dist[t];
                best = best.max(d);
                for next in &adj[t] {
                    if !dist.contains_key(*next) {
                        dist.insert(*next, d + 1);
                        queue.push_back(*next);
                    }
                }
            }
        }
        best
    }
}
