use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::stats::stats_plan;
use super::{write_file, BenchError, BenchSpec, Dependency, GroundTruth, Layout, Naming};
use crate::catalog::{ColumnRef, Ident, TableRef};
use crate::sampler::ValueDistribution;

/// How a column's values are produced.
#[derive(Debug, Clone)]
pub(super) enum Values {
    /// 1, 2, 3, ... (the primary key).
    Serial,
    /// Key values of another table of the plan.
    Reference { table: usize, null_rate: f64 },
    Int { low: i64, high: i64, null_rate: f64 },
    Measure(ValueDistribution),
    Text(&'static str),
    Flag,
    Timestamp,
}

#[derive(Debug, Clone)]
pub(super) struct PlanColumn {
    pub name: String,
    pub sql_type: &'static str,
    pub values: Values,
}

/// The first column is the primary key.
#[derive(Debug, Clone)]
pub(super) struct PlanTable {
    pub table: TableRef,
    pub rows: u64,
    pub columns: Vec<PlanColumn>,
}

impl PlanTable {
    fn key(&self) -> &str {
        &self.columns[0].name
    }
}

/// What [`generate_database`] wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDb {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub ground_truth: GroundTruth,
    /// Largest measure column, used for the sampling fidelity check.
    pub measure_column: Option<ColumnRef>,
}

const ENTITIES: &[&str] = &[
    "customer", "purchase", "product", "supplier", "employee", "invoice", "payment", "shipment", "category", "store",
    "account", "region", "warehouse", "campaign", "ticket", "review", "vendor", "contract", "project", "device",
];
const SCHEMAS: &[&str] = &["sales", "crm", "ops", "finance", "stock", "web", "hr", "support"];
const MEASURES: &[&str] = &["amount", "price", "weight", "balance", "rating", "discount"];
const COUNTS: &[&str] = &["quantity", "level", "stock_level", "duration", "visits", "priority"];
const TEXTS: &[&str] = &["title", "description", "status", "note", "label", "code"];
const FLAGS: &[&str] = &["is_active", "is_verified", "is_archived"];
const TIMES: &[&str] = &["created_at", "updated_at", "closed_at"];

pub(super) fn style(words: &str, naming: Naming, index: usize) -> String {
    let camel = match naming {
        Naming::Snake => false,
        Naming::Camel => true,
        Naming::Mixed => index % 2 == 1,
    };
    if !camel {
        return words.to_string();
    }
    words
        .split('_')
        .map(|w| {
            let mut c = w.chars();
            c.next().map(|f| f.to_uppercase().chain(c).collect::<String>()).unwrap_or_default()
        })
        .collect()
}

fn random_plan(spec: &BenchSpec, rng: &mut ChaCha8Rng) -> Vec<PlanTable> {
    let Layout::Random { schemas, tables_per_schema, columns_per_table, fk_density } = spec.layout else {
        unreachable!("random layout")
    };
    let total = schemas * tables_per_schema;
    let mut tables: Vec<PlanTable> = Vec::with_capacity(total);
    for index in 0..total {
        let schema = SCHEMAS.get(index / tables_per_schema.max(1)).map_or_else(
            || format!("schema{}", index / tables_per_schema.max(1)),
            |s| s.to_string(),
        );
        let entity = ENTITIES[index % ENTITIES.len()];
        let base = if index < ENTITIES.len() { entity.to_string() } else { format!("{entity}_{}", index / ENTITIES.len()) };
        let name = style(&base, spec.naming, index);
        let rows = rng.random_range(spec.rows_per_table[0]..=spec.rows_per_table[1]);

        let mut columns = vec![PlanColumn { name: style("id", spec.naming, index), sql_type: "integer", values: Values::Serial }];
        if index > 0 && rng.random_bool(fk_density) {
            let target = rng.random_range(0..index);
            let target_words = ENTITIES[target % ENTITIES.len()];
            let target_words =
                if target < ENTITIES.len() { target_words.to_string() } else { format!("{target_words}_{}", target / ENTITIES.len()) };
            columns.push(PlanColumn {
                name: style(&format!("{target_words}_id"), spec.naming, index),
                sql_type: "integer",
                values: Values::Reference { table: target, null_rate: 0.0 },
            });
        }
        let wanted = rng.random_range(columns_per_table[0]..=columns_per_table[1]);
        let mut used: Vec<String> = Vec::new();
        while columns.len() < wanted {
            let (words, sql_type, values) = match columns.len() % 5 {
                0 => (MEASURES[rng.random_range(0..MEASURES.len())], "double precision", Values::Measure(spec.distribution)),
                1 => (COUNTS[rng.random_range(0..COUNTS.len())], "integer", Values::Int { low: 0, high: 500, null_rate: 0.0 }),
                2 => (TEXTS[rng.random_range(0..TEXTS.len())], "varchar(64)", Values::Text("v")),
                3 => (TIMES[rng.random_range(0..TIMES.len())], "timestamp", Values::Timestamp),
                _ => (FLAGS[rng.random_range(0..FLAGS.len())], "boolean", Values::Flag),
            };
            let mut words = words.to_string();
            while used.contains(&words) {
                words.push_str("_2");
            }
            used.push(words.clone());
            columns.push(PlanColumn { name: style(&words, spec.naming, index), sql_type, values });
        }
        tables.push(PlanTable { table: TableRef::new(schema, name), rows, columns });
    }
    tables
}

fn ddl(plan: &[PlanTable], t: &PlanTable, declare_fks: bool) -> String {
    let mut lines: Vec<String> = t
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| if i == 0 { format!("    {} {} PRIMARY KEY", c.name, c.sql_type) } else { format!("    {} {}", c.name, c.sql_type) })
        .collect();
    if declare_fks {
        for c in &t.columns {
            if let Values::Reference { table, .. } = c.values {
                let target = &plan[table];
                lines.push(format!("    FOREIGN KEY ({}) REFERENCES {} ({})", c.name, target.table, target.key()));
            }
        }
    }
    format!("CREATE TABLE {} (\n{}\n);\n", t.table, lines.join(",\n"))
}

fn csv_text(plan: &[PlanTable], t: &PlanTable, rng: &mut ChaCha8Rng) -> Result<String, BenchError> {
    let mut columns: Vec<Vec<Option<String>>> = Vec::with_capacity(t.columns.len());
    for c in &t.columns {
        let n = t.rows as usize;
        let skip_null = |rate: f64, rng: &mut ChaCha8Rng| rate > 0.0 && rng.random_bool(rate);
        let col: Vec<Option<String>> = match &c.values {
            Values::Serial => (1..=t.rows).map(|i| Some(i.to_string())).collect(),
            Values::Reference { table, null_rate } => {
                let keys = plan[*table].rows;
                (0..n)
                    .map(|_| (!skip_null(*null_rate, rng) && keys > 0).then(|| rng.random_range(1..=keys).to_string()))
                    .collect()
            }
            Values::Int { low, high, null_rate } => {
                (0..n).map(|_| (!skip_null(*null_rate, rng)).then(|| rng.random_range(*low..=*high).to_string())).collect()
            }
            Values::Measure(d) => d
                .generate(n, rng)
                .map_err(|e| BenchError::Spec(e.to_string()))?
                .into_iter()
                .map(|v| Some(format!("{v:.4}")))
                .collect(),
            Values::Text(prefix) => (0..n).map(|_| Some(format!("{prefix}{}", rng.random_range(0..100_000u32)))).collect(),
            Values::Flag => (0..n).map(|_| Some(rng.random_bool(0.5).to_string())).collect(),
            Values::Timestamp => (0..n)
                .map(|_| {
                    let minutes: u32 = rng.random_range(0..4 * 365 * 24 * 60);
                    let (day, rest) = (minutes / (24 * 60), minutes % (24 * 60));
                    let (year, day) = (2010 + day / 365, day % 365);
                    let (month, dom) = (1 + day / 31 % 12, 1 + day % 28);
                    Some(format!("{year}-{month:02}-{dom:02} {:02}:{:02}:00", rest / 60, rest % 60))
                })
                .collect(),
        };
        columns.push(col);
    }
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| BenchError::Spec(e.to_string());
    writer.write_record(t.columns.iter().map(|c| c.name.as_str())).map_err(io)?;
    for row in 0..t.rows as usize {
        writer.write_record(columns.iter().map(|c| c[row].as_deref().unwrap_or(""))).map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| BenchError::Spec(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 strings"))
}

/// Writes `<schema>.<table>.sql` and `<schema>.<table>.csv` per table plus
/// `gt.json` into `out_dir`. Byte-identical for the same spec.
pub fn generate_database(spec: &BenchSpec, out_dir: &Path) -> Result<GeneratedDb, BenchError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let plan = match spec.layout {
        Layout::Random { .. } => random_plan(spec, &mut rng),
        Layout::StatsMimic { scale } => stats_plan(scale),
    };

    let mut dependencies = Vec::new();
    for t in &plan {
        for c in &t.columns {
            if let Values::Reference { table, .. } = c.values {
                let target = &plan[table];
                dependencies.push(Dependency {
                    from: t.table.column(Ident::new(c.name.as_str())),
                    to: target.table.column(Ident::new(target.key())),
                });
            }
        }
    }
    dependencies.sort();
    let ground_truth = GroundTruth { dependencies };

    let mut files = Vec::new();
    for t in &plan {
        let stem = t.table.to_string();
        let sql = out_dir.join(format!("{stem}.sql"));
        write_file(&sql, &ddl(&plan, t, spec.declare_foreign_keys))?;
        let csv = out_dir.join(format!("{stem}.csv"));
        write_file(&csv, &csv_text(&plan, t, &mut rng)?)?;
        files.push(sql);
        files.push(csv);
    }
    let gt_path = out_dir.join("gt.json");
    let mut gt_text = serde_json::to_string_pretty(&ground_truth).expect("ground truth serializes");
    let _ = writeln!(gt_text);
    write_file(&gt_path, &gt_text)?;
    files.push(gt_path);

    let measure_column = plan
        .iter()
        .flat_map(|t| {
            t.columns
                .iter()
                .filter(|c| matches!(c.values, Values::Measure(_) | Values::Int { .. }))
                .map(move |c| (t.rows, t.table.column(Ident::new(c.name.as_str()))))
        })
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .map(|(_, c)| c);

    Ok(GeneratedDb { dir: out_dir.to_path_buf(), files, ground_truth, measure_column })
}
