use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::ddl::{parse_script, ParsedTable};
use super::types::{
    ColumnMeta, DanglingReference, Dialect, ExplicitDep, Ident, TableMeta, TableRef, Warning,
};
use super::CatalogError;

/// Where the catalog comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceLocator {
    /// `*.sql` DDL files plus one `<schema>.<table>.csv` (or `<table>.csv`) per table.
    Directory(PathBuf),
    /// A single-file SQLite database.
    Sqlite(PathBuf),
    /// A live DBMS connection string.
    Connection(String),
}

impl SourceLocator {
    pub fn parse(locator: &str) -> Result<Self, CatalogError> {
        if locator.trim().is_empty() {
            return Err(CatalogError::MalformedLocator(locator.to_string()));
        }
        if let Some(path) = locator.strip_prefix("sqlite://").or_else(|| locator.strip_prefix("sqlite:")) {
            return Ok(SourceLocator::Sqlite(PathBuf::from(path)));
        }
        if locator.contains("://") {
            return Ok(SourceLocator::Connection(locator.to_string()));
        }
        let path = PathBuf::from(locator);
        if path.is_dir() {
            return Ok(SourceLocator::Directory(path));
        }
        if path.is_file() {
            if is_sqlite_file(&path) {
                return Ok(SourceLocator::Sqlite(path));
            }
            return Err(CatalogError::MalformedLocator(format!(
                "{locator} is neither a fixture directory nor a SQLite database"
            )));
        }
        Err(CatalogError::Unreachable(locator.to_string()))
    }
}

fn is_sqlite_file(path: &Path) -> bool {
    use std::io::Read;
    let mut header = [0u8; 16];
    fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut header))
        .map(|_| &header == b"SQLite format 3\0")
        .unwrap_or(false)
}

/// Everything [`CatalogSession::list_entities`] learns about the source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntityListing {
    pub tables: Vec<TableMeta>,
    pub explicit: Vec<ExplicitDep>,
    pub dangling: Vec<DanglingReference>,
    pub warnings: Vec<Warning>,
}

impl EntityListing {
    pub fn table(&self, table: &TableRef) -> Option<&TableMeta> {
        self.tables.iter().find(|t| &t.table == table)
    }
}

/// An open source. Data is only read when rows are scanned.
#[derive(Debug)]
pub struct CatalogSession {
    locator: SourceLocator,
    dialect: Dialect,
    backend: Backend,
}

#[derive(Debug)]
enum Backend {
    Directory(DirectoryBackend),
    #[cfg(feature = "sqlite")]
    Sqlite(sqlite::SqliteBackend),
}

/// Opens a source descriptor (`dir/`, `file.db`, `sqlite:path`).
pub fn open_source(locator: &str, dialect: Dialect) -> Result<CatalogSession, CatalogError> {
    let parsed = SourceLocator::parse(locator)?;
    let backend = match &parsed {
        SourceLocator::Directory(dir) => Backend::Directory(DirectoryBackend::open(dir)?),
        SourceLocator::Sqlite(path) => {
            if dialect == Dialect::Postgres {
                return Err(CatalogError::UnsupportedDialect {
                    dialect,
                    source_kind: "sqlite database",
                });
            }
            open_sqlite(path)?
        }
        SourceLocator::Connection(dsn) => return Err(CatalogError::UnsupportedConnection(dsn.clone())),
    };
    Ok(CatalogSession { locator: parsed, dialect, backend })
}

#[cfg(feature = "sqlite")]
fn open_sqlite(path: &Path) -> Result<Backend, CatalogError> {
    if !path.is_file() {
        return Err(CatalogError::Unreachable(path.display().to_string()));
    }
    Ok(Backend::Sqlite(sqlite::SqliteBackend::open(path)?))
}

#[cfg(not(feature = "sqlite"))]
fn open_sqlite(path: &Path) -> Result<Backend, CatalogError> {
    Err(CatalogError::UnsupportedConnection(format!("sqlite:{} (built without sqlite support)", path.display())))
}

impl CatalogSession {
    pub fn locator(&self) -> &SourceLocator {
        &self.locator
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    /// Enumerates tables, parses their DDL and resolves declared foreign
    /// keys. Per-table failures become warnings and `ddl_accessible = false`.
    pub fn list_entities(&self) -> EntityListing {
        let (parsed, mut catalog_only, mut warnings) = match &self.backend {
            Backend::Directory(dir) => dir.load(self.dialect),
            #[cfg(feature = "sqlite")]
            Backend::Sqlite(db) => db.load(self.dialect),
        };

        let mut tables: BTreeMap<TableRef, TableMeta> = BTreeMap::new();
        let mut clauses = Vec::new();
        for p in parsed {
            let ParsedTable { meta, foreign_keys } = p;
            clauses.push((meta.table.clone(), foreign_keys));
            tables.insert(meta.table.clone(), meta);
        }
        for meta in catalog_only.drain(..) {
            tables.entry(meta.table.clone()).or_insert(meta);
        }

        let (explicit, dangling) = resolve_references(&tables, clauses, &mut warnings);
        let tables: Vec<TableMeta> = tables.into_values().collect();
        warnings.sort();
        EntityListing { tables, explicit, dangling, warnings }
    }

    /// Streams the rows of `table`, one value per column of `table.columns`
    /// (in order). `None` is SQL NULL (an empty CSV field).
    pub fn scan_rows(
        &self,
        table: &TableMeta,
        visit: &mut dyn FnMut(&[Option<String>]),
    ) -> Result<u64, CatalogError> {
        match &self.backend {
            Backend::Directory(dir) => dir.scan(table, visit),
            #[cfg(feature = "sqlite")]
            Backend::Sqlite(db) => db.scan(table, visit),
        }
    }
}

fn resolve_references(
    tables: &BTreeMap<TableRef, TableMeta>,
    clauses: Vec<(TableRef, Vec<super::ddl::ForeignKeyClause>)>,
    warnings: &mut Vec<Warning>,
) -> (Vec<ExplicitDep>, Vec<DanglingReference>) {
    let mut explicit = Vec::new();
    let mut dangling = Vec::new();
    for (owner, fks) in clauses {
        for fk in fks {
            let dangle = |column: &Ident, target_column: Option<Ident>, reason: &str| DanglingReference {
                from: owner.column(column.clone()),
                target: fk.target.clone(),
                target_column,
                reason: reason.to_string(),
            };
            let Some(target) = tables.get(&fk.target) else {
                for (i, c) in fk.columns.iter().enumerate() {
                    dangling.push(dangle(c, fk.target_columns.get(i).cloned(), "referenced table not in catalog"));
                }
                continue;
            };
            let target_columns = if fk.target_columns.is_empty() {
                if target.primary_key.len() != fk.columns.len() {
                    for c in &fk.columns {
                        dangling.push(dangle(c, None, "referenced table has no matching primary key"));
                    }
                    continue;
                }
                target.primary_key.clone()
            } else {
                fk.target_columns.clone()
            };
            for (from, to) in fk.columns.iter().zip(target_columns) {
                if target.column(&to).is_none() {
                    dangling.push(dangle(from, Some(to), "referenced column not in table"));
                    continue;
                }
                let dep = ExplicitDep {
                    from: owner.column(from.clone()),
                    to: fk.target.column(to),
                    group: fk.group.clone(),
                };
                if dep.from == dep.to {
                    warnings.push(Warning::new(dep.from.to_string(), "column references itself; ignored"));
                    continue;
                }
                explicit.push(dep);
            }
        }
    }
    explicit.sort();
    explicit.dedup();
    dangling.sort();
    (explicit, dangling)
}

#[derive(Debug)]
struct DirectoryBackend {
    ddl_files: Vec<PathBuf>,
    data_files: BTreeMap<String, PathBuf>,
}

impl DirectoryBackend {
    fn open(dir: &Path) -> Result<Self, CatalogError> {
        let entries = fs::read_dir(dir).map_err(|e| CatalogError::Io(dir.display().to_string(), e))?;
        let mut ddl_files = Vec::new();
        let mut data_files = BTreeMap::new();
        for entry in entries {
            let path = entry.map_err(|e| CatalogError::Io(dir.display().to_string(), e))?.path();
            if !path.is_file() {
                continue;
            }
            match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
                Some("sql") => ddl_files.push(path),
                Some("csv") => {
                    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                    data_files.insert(stem, path);
                }
                _ => {}
            }
        }
        ddl_files.sort();
        Ok(DirectoryBackend { ddl_files, data_files })
    }

    fn load(&self, dialect: Dialect) -> (Vec<ParsedTable>, Vec<TableMeta>, Vec<Warning>) {
        let mut parsed: BTreeMap<TableRef, ParsedTable> = BTreeMap::new();
        let mut broken: BTreeMap<TableRef, String> = BTreeMap::new();
        let mut warnings = Vec::new();
        for file in &self.ddl_files {
            let name = file.display().to_string();
            let text = match fs::read_to_string(file) {
                Ok(t) => t,
                Err(e) => {
                    warnings.push(Warning::new(name, format!("cannot read DDL: {e}")));
                    continue;
                }
            };
            let statements = match parse_script(&text, dialect) {
                Ok(s) => s,
                Err(e) => {
                    warnings.push(Warning::new(name, e.to_string()));
                    continue;
                }
            };
            for stmt in statements {
                match stmt {
                    Ok(p) => {
                        if parsed.contains_key(&p.meta.table) {
                            warnings.push(Warning::new(p.meta.table.to_string(), format!("duplicate definition in {name} ignored")));
                        } else {
                            parsed.insert(p.meta.table.clone(), p);
                        }
                    }
                    Err(e) => match e.table.clone() {
                        Some(t) => {
                            broken.insert(t, format!("{name}: {e}"));
                        }
                        None => warnings.push(Warning::new(name.clone(), e.to_string())),
                    },
                }
            }
        }

        let mut catalog_only = Vec::new();
        let mut seen_csv: Vec<TableRef> = Vec::new();
        for (stem, path) in &self.data_files {
            let table = match TableRef::parse(stem, dialect.default_schema()) {
                Ok(t) => t,
                Err(e) => {
                    warnings.push(Warning::new(path.display().to_string(), format!("cannot derive table name: {e}")));
                    continue;
                }
            };
            seen_csv.push(table.clone());
            let profile = match profile_csv(path) {
                Ok(p) => p,
                Err(e) => {
                    warnings.push(Warning::new(table.to_string(), format!("cannot read data file: {e}")));
                    if let Some(p) = parsed.get_mut(&table) {
                        p.meta.set_rows(0);
                    }
                    continue;
                }
            };
            if let Some(p) = parsed.get_mut(&table) {
                p.meta.set_rows(profile.rows);
                for col in &p.meta.columns {
                    if !profile.header.iter().any(|h| h == &col.name) {
                        warnings.push(Warning::new(
                            p.meta.table.column(col.name.clone()).to_string(),
                            "column missing from data file; treated as all NULL",
                        ));
                    }
                }
            } else {
                let columns = profile
                    .header
                    .iter()
                    .zip(&profile.inferred)
                    .enumerate()
                    .map(|(i, (name, ty))| ColumnMeta::new(name.clone(), ty, dialect, i))
                    .collect();
                let mut meta = TableMeta::new(table.clone(), columns);
                meta.set_rows(profile.rows);
                let reason = broken
                    .remove(&table)
                    .unwrap_or_else(|| "no DDL found; column types inferred from data".to_string());
                warnings.push(Warning::new(table.to_string(), reason));
                catalog_only.push(meta);
            }
        }
        // broken DDL without any data file: keep the entity, nothing else is known
        for (table, reason) in broken {
            warnings.push(Warning::new(table.to_string(), reason));
            catalog_only.push(TableMeta::new(table, Vec::new()));
        }
        for p in parsed.values_mut() {
            if !seen_csv.contains(&p.meta.table) {
                p.meta.set_rows(0);
            }
        }
        (parsed.into_values().collect(), catalog_only, warnings)
    }

    fn scan(&self, table: &TableMeta, visit: &mut dyn FnMut(&[Option<String>])) -> Result<u64, CatalogError> {
        let Some(path) = self.data_files.values().find(|p| {
            p.file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| TableRef::parse(s, table.table.schema.as_str()).ok())
                .is_some_and(|r| r == table.table)
        }) else {
            return Ok(0);
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| CatalogError::Data(path.display().to_string(), e.to_string()))?;
        let header: Vec<Ident> = reader
            .headers()
            .map_err(|e| CatalogError::Data(path.display().to_string(), e.to_string()))?
            .iter()
            .map(header_ident)
            .collect();
        let positions: Vec<Option<usize>> =
            table.columns.iter().map(|c| header.iter().position(|h| h == &c.name)).collect();
        let mut row = vec![None; table.columns.len()];
        let mut record = csv::StringRecord::new();
        let mut count = 0;
        loop {
            match reader.read_record(&mut record) {
                Ok(false) => break,
                Ok(true) => {}
                Err(e) => return Err(CatalogError::Data(path.display().to_string(), e.to_string())),
            }
            for (slot, pos) in row.iter_mut().zip(&positions) {
                *slot = pos.and_then(|p| record.get(p)).filter(|v| !v.is_empty()).map(str::to_string);
            }
            visit(&row);
            count += 1;
        }
        Ok(count)
    }
}

fn header_ident(h: &str) -> Ident {
    let h = h.trim();
    if h.len() >= 2 && h.starts_with('"') && h.ends_with('"') {
        Ident::quoted(&h[1..h.len() - 1])
    } else {
        Ident::new(h)
    }
}

struct CsvProfile {
    header: Vec<Ident>,
    inferred: Vec<&'static str>,
    rows: u64,
}

/// Counts rows and infers a coarse type for each column (integer, double
/// precision, boolean or text).
fn profile_csv(path: &Path) -> Result<CsvProfile, String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Seen {
        Nothing,
        Int,
        Float,
        Bool,
        Text,
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    let header: Vec<Ident> = reader.headers().map_err(|e| e.to_string())?.iter().map(header_ident).collect();
    let mut seen = vec![Seen::Nothing; header.len()];
    let mut rows = 0u64;
    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record).map_err(|e| e.to_string())? {
        rows += 1;
        for (s, v) in seen.iter_mut().zip(record.iter()) {
            if v.is_empty() || *s == Seen::Text {
                continue;
            }
            let this = if v.parse::<i64>().is_ok() {
                Seen::Int
            } else if v.parse::<f64>().is_ok() {
                Seen::Float
            } else if matches!(v.to_ascii_lowercase().as_str(), "true" | "false") {
                Seen::Bool
            } else {
                Seen::Text
            };
            *s = match (*s, this) {
                (Seen::Nothing, t) => t,
                (a, b) if a == b => a,
                (Seen::Int, Seen::Float) | (Seen::Float, Seen::Int) => Seen::Float,
                _ => Seen::Text,
            };
        }
    }
    let inferred = seen
        .into_iter()
        .map(|s| match s {
            Seen::Int => "bigint",
            Seen::Float => "double precision",
            Seen::Bool => "boolean",
            Seen::Nothing => "",
            Seen::Text => "text",
        })
        .collect();
    Ok(CsvProfile { header, inferred, rows })
}

#[cfg(feature = "sqlite")]
mod sqlite {
    use std::path::Path;

    use rusqlite::types::ValueRef;
    use rusqlite::{Connection, OpenFlags};

    use super::super::ddl::{parse_ddl, ParsedTable};
    use super::super::types::{ColumnMeta, Dialect, Ident, TableMeta, TableRef, Warning};
    use super::super::CatalogError;

    #[derive(Debug)]
    pub(super) struct SqliteBackend {
        conn: Connection,
    }

    fn quote(name: &str) -> String {
        format!("\"{}\"", name.replace('"', "\"\""))
    }

    impl SqliteBackend {
        pub(super) fn open(path: &Path) -> Result<Self, CatalogError> {
            let conn = Connection::open_with_flags(path, OpenFlags::SQLITE_OPEN_READ_ONLY)
                .map_err(|e| CatalogError::Data(path.display().to_string(), e.to_string()))?;
            Ok(SqliteBackend { conn })
        }

        fn tables(&self) -> rusqlite::Result<Vec<(String, Option<String>)>> {
            let mut stmt = self.conn.prepare(
                "SELECT name, sql FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' ORDER BY name",
            )?;
            let rows = stmt.query_map([], |r| Ok((r.get(0)?, r.get(1)?)))?;
            rows.collect()
        }

        fn count(&self, name: &str) -> rusqlite::Result<u64> {
            self.conn
                .query_row(&format!("SELECT COUNT(*) FROM {}", quote(name)), [], |r| r.get::<_, i64>(0))
                .map(|n| n.max(0) as u64)
        }

        fn pragma_columns(&self, name: &str, dialect: Dialect) -> rusqlite::Result<Vec<ColumnMeta>> {
            let mut stmt = self.conn.prepare(&format!("PRAGMA table_info({})", quote(name)))?;
            let rows = stmt.query_map([], |r| {
                Ok((r.get::<_, i64>(0)?, r.get::<_, String>(1)?, r.get::<_, String>(2)?, r.get::<_, i64>(5)?))
            })?;
            let mut cols = Vec::new();
            for row in rows {
                let (cid, col, ty, pk) = row?;
                let mut meta = ColumnMeta::new(Ident::quoted(col), &ty, dialect, cid.max(0) as usize);
                meta.is_primary_key = pk > 0;
                cols.push(meta);
            }
            Ok(cols)
        }

        pub(super) fn load(&self, dialect: Dialect) -> (Vec<ParsedTable>, Vec<TableMeta>, Vec<Warning>) {
            let mut parsed = Vec::new();
            let mut catalog_only = Vec::new();
            let mut warnings = Vec::new();
            let tables = match self.tables() {
                Ok(t) => t,
                Err(e) => {
                    warnings.push(Warning::new("sqlite_master", e.to_string()));
                    return (parsed, catalog_only, warnings);
                }
            };
            for (name, sql) in tables {
                let rows = self.count(&name).unwrap_or(0);
                let table = TableRef::new(dialect.default_schema(), Ident::quoted(name.clone()));
                match sql.as_deref().map(|s| parse_ddl(s, dialect)) {
                    Some(Ok(mut p)) => {
                        p.meta.set_rows(rows);
                        parsed.push(p);
                    }
                    failure => {
                        let reason = match failure {
                            Some(Err(e)) => e.to_string(),
                            _ => "DDL not available".to_string(),
                        };
                        let columns = self.pragma_columns(&name, dialect).unwrap_or_default();
                        let mut meta = TableMeta::new(table.clone(), columns);
                        let pk: Vec<Ident> =
                            meta.columns.iter().filter(|c| c.is_primary_key).map(|c| c.name.clone()).collect();
                        let _ = meta.set_primary_key(pk);
                        meta.set_rows(rows);
                        warnings.push(Warning::new(table.to_string(), reason));
                        catalog_only.push(meta);
                    }
                }
            }
            (parsed, catalog_only, warnings)
        }

        pub(super) fn scan(
            &self,
            table: &TableMeta,
            visit: &mut dyn FnMut(&[Option<String>]),
        ) -> Result<u64, CatalogError> {
            let err = |e: rusqlite::Error| CatalogError::Data(table.table.to_string(), e.to_string());
            if table.columns.is_empty() {
                return Ok(0);
            }
            let cols: Vec<String> = table.columns.iter().map(|c| quote(c.name.as_str())).collect();
            let sql = format!("SELECT {} FROM {}", cols.join(", "), quote(table.table.table.as_str()));
            let mut stmt = self.conn.prepare(&sql).map_err(err)?;
            let mut rows = stmt.query([]).map_err(err)?;
            let mut buf = vec![None; table.columns.len()];
            let mut count = 0;
            while let Some(row) = rows.next().map_err(err)? {
                for (i, slot) in buf.iter_mut().enumerate() {
                    *slot = match row.get_ref(i).map_err(err)? {
                        ValueRef::Null => None,
                        ValueRef::Integer(v) => Some(v.to_string()),
                        ValueRef::Real(v) => Some(v.to_string()),
                        ValueRef::Text(t) => Some(String::from_utf8_lossy(t).into_owned()),
                        ValueRef::Blob(b) => Some(b.iter().map(|x| format!("{x:02x}")).collect()),
                    };
                }
                visit(&buf);
                count += 1;
            }
            Ok(count)
        }
    }
}
