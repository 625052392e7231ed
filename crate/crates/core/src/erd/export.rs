use std::fmt::Write;

use super::{DiagramFormat, EdgeKind, ErGraph, Node};

pub fn export(graph: &ErGraph, format: DiagramFormat) -> String {
    match format {
        DiagramFormat::Dot => to_dot(graph),
        DiagramFormat::Mermaid => to_mermaid(graph),
        DiagramFormat::Json => graph.to_json() + "\n",
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn column_lines(node: &Node) -> Vec<String> {
    node.columns
        .iter()
        .map(|c| {
            let pk = if c.is_primary_key { " [PK]" } else { "" };
            format!("{} : {}{pk}", c.name, c.declared_type)
        })
        .collect()
}

/// Graphviz document. Explicit edges are solid, implicit edges dashed and
/// labeled with their confidence, empty tables drawn with a dashed border.
pub fn to_dot(graph: &ErGraph) -> String {
    let mut out = String::from("digraph erd {\n    rankdir=LR;\n    node [shape=box];\n");
    for node in &graph.nodes {
        let mut label = dot_escape(&node.table.to_string());
        for line in column_lines(node) {
            label.push_str("\\n");
            label.push_str(&dot_escape(&line));
        }
        let style = if node.is_empty { ", style=dashed" } else { "" };
        let _ = writeln!(out, "    \"{}\" [label=\"{label}\"{style}];", dot_escape(&node.table.to_string()));
    }
    for edge in &graph.edges {
        let ends = format!(
            "taillabel=\"{}\", headlabel=\"{}\"",
            dot_escape(edge.from.column.as_str()),
            dot_escape(edge.to.column.as_str())
        );
        let attrs = match (edge.kind, edge.confidence) {
            (EdgeKind::Implicit, Some(c)) => format!("style=dashed, label=\"{c:.2}\", {ends}"),
            _ => format!("style=solid, {ends}"),
        };
        let _ = writeln!(
            out,
            "    \"{}\" -> \"{}\" [{attrs}];",
            dot_escape(&edge.from.table.to_string()),
            dot_escape(&edge.to.table.to_string())
        );
    }
    out.push_str("}\n");
    out
}

fn mermaid_escape(s: &str) -> String {
    s.replace('"', "#quot;").replace('<', "#lt;").replace('>', "#gt;")
}

/// Mermaid flowchart with the same visual conventions as [`to_dot`].
pub fn to_mermaid(graph: &ErGraph) -> String {
    let mut out = String::from("flowchart LR\n");
    let id = |t: &crate::catalog::TableRef| graph.nodes.iter().position(|n| &n.table == t).map(|i| format!("n{i}"));
    for (i, node) in graph.nodes.iter().enumerate() {
        let mut label = mermaid_escape(&node.table.to_string());
        for line in column_lines(node) {
            label.push_str("<br/>");
            label.push_str(&mermaid_escape(&line));
        }
        let _ = writeln!(out, "    n{i}[\"{label}\"]");
    }
    for edge in &graph.edges {
        let (Some(from), Some(to)) = (id(&edge.from.table), id(&edge.to.table)) else { continue };
        let ends = format!("{} -#gt; {}", mermaid_escape(edge.from.column.as_str()), mermaid_escape(edge.to.column.as_str()));
        match (edge.kind, edge.confidence) {
            (EdgeKind::Implicit, Some(c)) => {
                let _ = writeln!(out, "    {from} -.->|\"{ends} ({c:.2})\"| {to}");
            }
            _ => {
                let _ = writeln!(out, "    {from} -->|\"{ends}\"| {to}");
            }
        }
    }
    for (i, node) in graph.nodes.iter().enumerate() {
        if node.is_empty {
            let _ = writeln!(out, "    style n{i} stroke-dasharray: 5 5");
        }
    }
    out
}
