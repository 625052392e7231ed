use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::classify::classify_type;

/// SQL dialect used to interpret DDL and type names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    #[default]
    Postgres,
    Sqlite,
    Generic,
}

impl Dialect {
    /// Schema assumed for unqualified table names.
    pub fn default_schema(self) -> &'static str {
        match self {
            Dialect::Postgres | Dialect::Generic => "public",
            Dialect::Sqlite => "main",
        }
    }
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "postgres" | "postgresql" | "pg" => Ok(Dialect::Postgres),
            "sqlite" | "sqlite3" => Ok(Dialect::Sqlite),
            "generic" | "ansi" => Ok(Dialect::Generic),
            other => Err(format!("unsupported dialect '{other}' (expected postgres, sqlite or generic)")),
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Postgres => "postgres",
            Dialect::Sqlite => "sqlite",
            Dialect::Generic => "generic",
        })
    }
}

/// An SQL identifier as written.
///
/// Unquoted identifiers match case-insensitively (they fold to lowercase);
/// quoted identifiers match verbatim. The original spelling is kept for
/// display and tokenization.
#[derive(Debug, Clone)]
pub struct Ident {
    text: String,
    quoted: bool,
}

impl Ident {
    pub fn new(text: impl Into<String>) -> Self {
        Ident { text: text.into(), quoted: false }
    }

    pub fn quoted(text: impl Into<String>) -> Self {
        Ident { text: text.into(), quoted: true }
    }

    /// Original spelling without quotes.
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn is_quoted(&self) -> bool {
        self.quoted
    }

    /// Normalized form used for matching.
    pub fn key(&self) -> String {
        if self.quoted {
            self.text.clone()
        } else {
            self.text.to_lowercase()
        }
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }

    /// Serialized form: quoted identifiers keep their double quotes.
    pub fn to_serialized(&self) -> String {
        if self.quoted {
            format!("\"{}\"", self.text.replace('"', "\"\""))
        } else {
            self.text.clone()
        }
    }

    pub fn from_serialized(s: &str) -> Self {
        if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') {
            Ident::quoted(s[1..s.len() - 1].replace("\"\"", "\""))
        } else {
            Ident::new(s)
        }
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Ident {}

impl Hash for Ident {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for Ident {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ident {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

impl From<String> for Ident {
    fn from(s: String) -> Self {
        Ident::new(s)
    }
}

impl Serialize for Ident {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_serialized())
    }
}

impl<'de> Deserialize<'de> for Ident {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(Ident::from_serialized(&s))
    }
}

/// A table addressed as `schema.table`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TableRef {
    pub schema: Ident,
    pub table: Ident,
}

impl TableRef {
    pub fn new(schema: impl Into<Ident>, table: impl Into<Ident>) -> Self {
        TableRef { schema: schema.into(), table: table.into() }
    }

    /// Parses `schema.table` (or a bare table name, placed in `default_schema`).
    /// Double-quoted parts are taken verbatim.
    pub fn parse(s: &str, default_schema: &str) -> Result<Self, String> {
        let parts = split_qualified(s)?;
        match parts.as_slice() {
            [table] => Ok(TableRef { schema: Ident::new(default_schema), table: table.clone() }),
            [schema, table] => Ok(TableRef { schema: schema.clone(), table: table.clone() }),
            _ => Err(format!("'{s}' is not a schema.table name")),
        }
    }

    pub fn column(&self, column: impl Into<Ident>) -> ColumnRef {
        ColumnRef { table: self.clone(), column: column.into() }
    }
}

impl fmt::Display for TableRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.schema, self.table)
    }
}

fn split_qualified(s: &str) -> Result<Vec<Ident>, String> {
    let mut parts = Vec::new();
    let mut chars = s.chars().peekable();
    loop {
        let mut text = String::new();
        let quoted = chars.peek() == Some(&'"');
        if quoted {
            chars.next();
            loop {
                match chars.next() {
                    Some('"') if chars.peek() == Some(&'"') => {
                        chars.next();
                        text.push('"');
                    }
                    Some('"') => break,
                    Some(c) => text.push(c),
                    None => return Err(format!("unterminated quote in '{s}'")),
                }
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c == '.' {
                    break;
                }
                text.push(c);
                chars.next();
            }
        }
        if text.is_empty() {
            return Err(format!("empty name part in '{s}'"));
        }
        parts.push(if quoted { Ident::quoted(text) } else { Ident::new(text) });
        match chars.next() {
            Some('.') => continue,
            None => break,
            Some(c) => return Err(format!("unexpected '{c}' in '{s}'")),
        }
    }
    Ok(parts)
}

/// A column endpoint `schema.table.column`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnRef {
    #[serde(flatten)]
    pub table: TableRef,
    pub column: Ident,
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}

/// Coarse column type classes. Only columns of the same known class are
/// comparable when their names share no synonyms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeClass {
    Digits,
    Money,
    Character,
    Binary,
    Data,
    Boolean,
    Geometric,
    Network,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: Ident,
    pub declared_type: String,
    pub type_class: TypeClass,
    pub is_primary_key: bool,
    pub ordinal: usize,
    pub nullable: bool,
}

impl ColumnMeta {
    pub fn new(name: Ident, declared_type: &str, dialect: Dialect, ordinal: usize) -> Self {
        ColumnMeta {
            name,
            declared_type: declared_type.to_string(),
            type_class: classify_type(declared_type, dialect),
            is_primary_key: false,
            ordinal,
            nullable: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub table: TableRef,
    pub columns: Vec<ColumnMeta>,
    pub primary_key: Vec<Ident>,
    pub rows_all: u64,
    pub is_empty: bool,
    pub ddl_accessible: bool,
    pub ddl_text: Option<String>,
}

impl TableMeta {
    pub fn new(table: TableRef, columns: Vec<ColumnMeta>) -> Self {
        TableMeta {
            table,
            columns,
            primary_key: Vec::new(),
            rows_all: 0,
            is_empty: true,
            ddl_accessible: false,
            ddl_text: None,
        }
    }

    pub fn column(&self, name: &Ident) -> Option<&ColumnMeta> {
        self.columns.iter().find(|c| &c.name == name)
    }

    pub fn set_rows(&mut self, rows: u64) {
        self.rows_all = rows;
        self.is_empty = rows == 0;
    }

    /// Marks `names` as the primary key. Fails with the first name that is
    /// not a column of this table.
    pub fn set_primary_key(&mut self, names: Vec<Ident>) -> Result<(), Ident> {
        if let Some(missing) = names.iter().find(|n| self.column(n).is_none()) {
            return Err(missing.clone());
        }
        for col in &mut self.columns {
            col.is_primary_key = names.contains(&col.name);
            if col.is_primary_key {
                col.nullable = false;
            }
        }
        self.primary_key = names;
        Ok(())
    }
}

/// A foreign-key constraint declared in DDL, one per column pair.
/// Composite keys share a `group`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExplicitDep {
    pub from: ColumnRef,
    pub to: ColumnRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

/// A REFERENCES clause whose target could not be resolved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DanglingReference {
    pub from: ColumnRef,
    pub target: TableRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_column: Option<Ident>,
    pub reason: String,
}

/// A non-fatal problem tied to one entity (table, file or column).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Warning {
    pub entity: String,
    pub message: String,
}

impl Warning {
    pub fn new(entity: impl Into<String>, message: impl Into<String>) -> Self {
        Warning { entity: entity.into(), message: message.into() }
    }
}
