//! Fixtures and checkers shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use flower_core::{ColumnRef, Ident, TableRef};

/// Two-table shop: `purchase.customer_id` points at `customer.id`. With
/// `declare` the reference is written as a FOREIGN KEY clause. `archive`
/// is always present and has no rows.
pub fn write_shop(dir: &Path, declare: bool) {
    fs::write(dir.join("public.customer.sql"), "CREATE TABLE customer (id integer PRIMARY KEY, name text);\n").unwrap();
    let fk = if declare { ",\n    FOREIGN KEY (customer_id) REFERENCES customer (id)" } else { "" };
    fs::write(
        dir.join("public.purchase.sql"),
        format!("CREATE TABLE purchase (\n    id integer PRIMARY KEY,\n    customer_id integer,\n    total numeric{fk}\n);\n"),
    )
    .unwrap();
    fs::write(dir.join("public.archive.sql"), "CREATE TABLE archive (id integer PRIMARY KEY, note text);\n").unwrap();

    let mut customers = String::from("id,name\n");
    for i in 1..=40 {
        customers.push_str(&format!("{i},name{i}\n"));
    }
    fs::write(dir.join("public.customer.csv"), customers).unwrap();
    let mut purchases = String::from("id,customer_id,total\n");
    for i in 1..=200 {
        purchases.push_str(&format!("{},{},{}.5\n", i + 1000, i % 40 + 1, i));
    }
    fs::write(dir.join("public.purchase.csv"), purchases).unwrap();
    fs::write(dir.join("public.archive.csv"), "id,note\n").unwrap();
}

/// Parses `schema.table.column`; quoted parts keep their quotes.
pub fn column_ref(text: &str) -> ColumnRef {
    let (table, column) = text.trim().rsplit_once('.').expect("schema.table.column");
    TableRef::parse(table, "public").expect("table").column(Ident::from_serialized(column))
}

/// Header-indexed CSV contents of `<dir>/<schema>.<table>.csv`.
pub fn read_table(dir: &Path, table: &TableRef) -> (Vec<String>, Vec<Vec<String>>) {
    let path = dir.join(format!("{}.{}.csv", table.schema.as_str(), table.table.as_str()));
    let mut reader = csv::Reader::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect();
    (header, rows)
}

/// Distinct non-empty values of one column.
pub fn distinct_values(dir: &Path, column: &ColumnRef) -> BTreeSet<String> {
    let (header, rows) = read_table(dir, &column.table);
    let idx = header
        .iter()
        .position(|h| Ident::new(h.as_str()) == column.column || h == column.column.as_str())
        .unwrap_or_else(|| panic!("no column {column}"));
    rows.into_iter().map(|mut r| r.swap_remove(idx)).filter(|v| !v.is_empty()).collect()
}

/// A parsed Mermaid flowchart, restricted to the statements the exporter
/// writes: `id["label"]` nodes, `a -->|"text"| b` and `a -.->|"text"| b`
/// links, and `style id key: value` lines.
#[derive(Debug, Default)]
pub struct Flowchart {
    pub direction: String,
    pub nodes: BTreeMap<String, String>,
    pub links: Vec<MermaidLink>,
    pub styles: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MermaidLink {
    pub from: String,
    pub to: String,
    pub dotted: bool,
    pub text: String,
}

fn mermaid_id(s: &str) -> Result<String, String> {
    let ok = !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !s.starts_with(|c: char| c.is_ascii_digit());
    if ok {
        Ok(s.to_string())
    } else {
        Err(format!("bad node id '{s}'"))
    }
}

/// Quoted label text: no raw quotes inside, entity codes allowed.
fn mermaid_string(s: &str) -> Result<String, String> {
    let inner = s.strip_prefix('"').and_then(|r| r.strip_suffix('"')).ok_or_else(|| format!("unquoted text {s}"))?;
    if inner.contains('"') {
        return Err(format!("raw quote inside {s}"));
    }
    let mut rest = inner;
    while let Some(pos) = rest.find('#') {
        let tail = &rest[pos + 1..];
        let end = tail.find(';').ok_or_else(|| format!("unterminated entity in {s}"))?;
        let code = &tail[..end];
        if code.is_empty() || !code.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(format!("bad entity #{code}; in {s}"));
        }
        rest = &tail[end + 1..];
    }
    Ok(inner.to_string())
}

pub fn parse_flowchart(text: &str) -> Result<Flowchart, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty document")?;
    let direction = header.strip_prefix("flowchart ").ok_or("missing flowchart header")?.trim();
    if !["LR", "RL", "TB", "TD", "BT"].contains(&direction) {
        return Err(format!("bad direction {direction}"));
    }
    let mut chart = Flowchart { direction: direction.to_string(), ..Default::default() };
    let mut pending_links = Vec::new();
    for (n, raw) in lines.enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("%%") {
            continue;
        }
        let err = |m: String| format!("line {}: {m}: {raw}", n + 2);
        if let Some(rest) = line.strip_prefix("style ") {
            let (id, spec) = rest.split_once(' ').ok_or_else(|| err("style without properties".into()))?;
            for prop in spec.split(',') {
                let (k, v) = prop.split_once(':').ok_or_else(|| err(format!("bad style property {prop}")))?;
                if k.trim().is_empty() || v.trim().is_empty() {
                    return Err(err(format!("bad style property {prop}")));
                }
            }
            chart.styles.insert(mermaid_id(id).map_err(err)?, spec.trim().to_string());
        } else if let Some((from, rest)) = line.split_once(" -->|").map(|(a, b)| (a, (b, false))).or_else(|| line.split_once(" -.->|").map(|(a, b)| (a, (b, true)))) {
            let (body, dotted) = rest;
            let (label, to) = body.rsplit_once("| ").ok_or_else(|| err("unterminated link text".into()))?;
            pending_links.push((n, MermaidLink {
                from: mermaid_id(from).map_err(err)?,
                to: mermaid_id(to.trim()).map_err(err)?,
                dotted,
                text: mermaid_string(label).map_err(err)?,
            }));
        } else if let Some(open) = line.find('[') {
            let id = mermaid_id(&line[..open]).map_err(err)?;
            let label = line[open + 1..].strip_suffix(']').ok_or_else(|| err("unterminated node shape".into()))?;
            if chart.nodes.insert(id.clone(), mermaid_string(label).map_err(err)?).is_some() {
                return Err(err(format!("node {id} declared twice")));
            }
        } else {
            return Err(err("unrecognised statement".into()));
        }
    }
    for (n, link) in pending_links {
        for end in [&link.from, &link.to] {
            if !chart.nodes.contains_key(end) {
                return Err(format!("line {}: link to undeclared node {end}", n + 2));
            }
        }
        chart.links.push(link);
    }
    for id in chart.styles.keys() {
        if !chart.nodes.contains_key(id) {
            return Err(format!("style for undeclared node {id}"));
        }
    }
    Ok(chart)
}

/// True when `label` is a number with exactly two decimals in [0, 1].
pub fn is_confidence_label(label: &str) -> bool {
    let parts: Vec<&str> = label.split('.').collect();
    parts.len() == 2
        && parts[0].len() == 1
        && parts[1].len() == 2
        && label.chars().filter(|c| *c != '.').all(|c| c.is_ascii_digit())
        && label.parse::<f64>().is_ok_and(|v| (0.0..=1.0).contains(&v))
}

/// Nodes and edges of a Graphviz document, attribute values unquoted.
#[derive(Debug, Default)]
pub struct DotDoc {
    pub directed: bool,
    pub nodes: BTreeMap<String, BTreeMap<String, String>>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
}

fn dot_id(id: &graphviz_rust::dot_structures::Id) -> String {
    use graphviz_rust::dot_structures::Id;
    match id {
        Id::Escaped(s) => s.strip_prefix('"').and_then(|r| r.strip_suffix('"')).unwrap_or(s).replace("\\\"", "\""),
        Id::Html(s) | Id::Plain(s) | Id::Anonymous(s) => s.clone(),
    }
}

fn dot_attrs(attrs: &[graphviz_rust::dot_structures::Attribute]) -> BTreeMap<String, String> {
    attrs.iter().map(|a| (dot_id(&a.0), dot_id(&a.1))).collect()
}

/// Parses with the graphviz-rust DOT grammar.
pub fn parse_dot(text: &str) -> Result<DotDoc, String> {
    use graphviz_rust::dot_structures::{EdgeTy, Graph, Stmt, Vertex};
    let graph = graphviz_rust::parse(text)?;
    let (directed, stmts) = match graph {
        Graph::DiGraph { stmts, .. } => (true, stmts),
        Graph::Graph { stmts, .. } => (false, stmts),
    };
    let mut doc = DotDoc { directed, ..Default::default() };
    for stmt in stmts {
        match stmt {
            Stmt::Node(n) => {
                doc.nodes.insert(dot_id(&n.id.0), dot_attrs(&n.attributes));
            }
            Stmt::Edge(e) => match e.ty {
                EdgeTy::Pair(Vertex::N(a), Vertex::N(b)) => doc.edges.push((dot_id(&a.0), dot_id(&b.0), dot_attrs(&e.attributes))),
                other => return Err(format!("unexpected edge form {other:?}")),
            },
            _ => {}
        }
    }
    Ok(doc)
}
