//! CREATE TABLE parsing: columns, primary keys and foreign-key clauses.
//!
//! The grammar covers PostgreSQL-flavoured DDL plus the common SQLite and
//! generic spellings. Statements other than CREATE TABLE are skipped by
//! [`parse_script`]; views, triggers and ALTER TABLE are not interpreted.

use std::fmt;

use thiserror::Error;

use super::types::{ColumnMeta, Dialect, ExplicitDep, Ident, TableMeta, TableRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("DDL parse error at byte {offset}: {message}")]
pub struct DdlError {
    /// Byte offset into the text handed to the parser.
    pub offset: usize,
    pub message: String,
    /// Table being defined, when the name was read before the error.
    pub table: Option<TableRef>,
}

/// One FOREIGN KEY / REFERENCES clause as written.
#[derive(Debug, Clone, PartialEq)]
pub struct ForeignKeyClause {
    pub columns: Vec<Ident>,
    pub target: TableRef,
    /// Empty when the clause omits the column list (references the target's primary key).
    pub target_columns: Vec<Ident>,
    pub group: Option<String>,
}

/// Result of parsing a single CREATE TABLE statement.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub meta: TableMeta,
    pub foreign_keys: Vec<ForeignKeyClause>,
}

impl ParsedTable {
    /// Explicit dependencies whose target columns are known without a
    /// catalog: clauses that name their target columns, and self references
    /// to this table's own primary key.
    pub fn explicit_deps(&self) -> Vec<ExplicitDep> {
        let mut deps = Vec::new();
        for fk in &self.foreign_keys {
            let targets = if !fk.target_columns.is_empty() {
                fk.target_columns.clone()
            } else if fk.target == self.meta.table && fk.columns.len() == self.meta.primary_key.len() {
                self.meta.primary_key.clone()
            } else {
                continue;
            };
            for (from, to) in fk.columns.iter().zip(targets) {
                deps.push(ExplicitDep {
                    from: self.meta.table.column(from.clone()),
                    to: fk.target.column(to),
                    group: fk.group.clone(),
                });
            }
        }
        deps
    }
}

/// Parses exactly one CREATE TABLE statement (a trailing `;` is allowed).
pub fn parse_ddl(ddl_text: &str, dialect: Dialect) -> Result<ParsedTable, DdlError> {
    let tokens = lex(ddl_text, dialect)?;
    let statements = split_statements(&tokens);
    match statements.as_slice() {
        [] => Err(DdlError { offset: 0, message: "no statement found".into(), table: None }),
        [stmt] => {
            let mut parser = Parser::new(ddl_text, stmt, dialect);
            if !parser.is_create_table() {
                return Err(parser.error_here("expected CREATE TABLE"));
            }
            parser.create_table()
        }
        [_, second, ..] => Err(DdlError {
            offset: second[0].offset,
            message: "expected a single statement".into(),
            table: None,
        }),
    }
}

/// Parses every CREATE TABLE statement in a script. Other statements are
/// ignored. A lexical error aborts the whole script; a syntax error only
/// affects its statement.
pub fn parse_script(text: &str, dialect: Dialect) -> Result<Vec<Result<ParsedTable, DdlError>>, DdlError> {
    let tokens = lex(text, dialect)?;
    let mut out = Vec::new();
    for stmt in split_statements(&tokens) {
        let mut parser = Parser::new(text, stmt, dialect);
        if parser.is_create_table() {
            out.push(parser.create_table());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Word,
    QuotedIdent,
    Str,
    Number,
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    text: String,
    offset: usize,
    end: usize,
}

impl Token {
    fn is_kw(&self, kw: &str) -> bool {
        self.kind == TokenKind::Word && self.text.eq_ignore_ascii_case(kw)
    }

    fn is_punct(&self, c: char) -> bool {
        self.kind == TokenKind::Punct(c)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::QuotedIdent => write!(f, "\"{}\"", self.text),
            TokenKind::Str => write!(f, "'{}'", self.text),
            _ => f.write_str(&self.text),
        }
    }
}

fn lex(src: &str, dialect: Dialect) -> Result<Vec<Token>, DdlError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let err = |offset: usize, message: &str| DdlError { offset, message: message.to_string(), table: None };
    while i < bytes.len() {
        let c = src[i..].chars().next().expect("in bounds");
        let start = i;
        if c.is_whitespace() {
            i += c.len_utf8();
        } else if src[i..].starts_with("--") {
            i = src[i..].find('\n').map_or(bytes.len(), |n| i + n + 1);
        } else if src[i..].starts_with("/*") {
            let close = src[i + 2..].find("*/").ok_or_else(|| err(start, "unterminated block comment"))?;
            i += close + 4;
        } else if c == '"' || c == '`' {
            let (text, next) = read_quoted(src, i, c).ok_or_else(|| err(start, "unterminated quoted identifier"))?;
            tokens.push(Token { kind: TokenKind::QuotedIdent, text, offset: start, end: next });
            i = next;
        } else if c == '[' && dialect != Dialect::Postgres && bracket_ident(src, i).is_some() {
            let (text, next) = bracket_ident(src, i).expect("checked");
            tokens.push(Token { kind: TokenKind::QuotedIdent, text, offset: start, end: next });
            i = next;
        } else if c == '\'' {
            let (text, next) = read_quoted(src, i, '\'').ok_or_else(|| err(start, "unterminated string literal"))?;
            tokens.push(Token { kind: TokenKind::Str, text, offset: start, end: next });
            i = next;
        } else if c.is_ascii_digit() {
            let len = src[i..]
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '.'))
                .unwrap_or(bytes.len() - i);
            tokens.push(Token { kind: TokenKind::Number, text: src[i..i + len].to_string(), offset: start, end: i + len });
            i += len;
        } else if c.is_alphabetic() || c == '_' {
            let len = src[i..]
                .find(|ch: char| !(ch.is_alphanumeric() || ch == '_' || ch == '$'))
                .unwrap_or(bytes.len() - i);
            tokens.push(Token { kind: TokenKind::Word, text: src[i..i + len].to_string(), offset: start, end: i + len });
            i += len;
        } else {
            i += c.len_utf8();
            tokens.push(Token { kind: TokenKind::Punct(c), text: c.to_string(), offset: start, end: i });
        }
    }
    Ok(tokens)
}

/// Reads a `q`-delimited token starting at `start`, where a doubled `q`
/// escapes itself. Returns the unescaped text and the offset after the
/// closing delimiter.
fn read_quoted(src: &str, start: usize, q: char) -> Option<(String, usize)> {
    let mut text = String::new();
    let mut chars = src[start + 1..].char_indices().peekable();
    while let Some((idx, c)) = chars.next() {
        if c == q {
            if let Some(&(_, next)) = chars.peek() {
                if next == q {
                    chars.next();
                    text.push(q);
                    continue;
                }
            }
            return Some((text, start + 1 + idx + c.len_utf8()));
        }
        text.push(c);
    }
    None
}

/// `[name]` identifiers (SQLite / SQL Server). Array suffixes such as `[]`
/// or `[3]` are not identifiers.
fn bracket_ident(src: &str, start: usize) -> Option<(String, usize)> {
    let close = src[start + 1..].find(']')?;
    let inner = &src[start + 1..start + 1 + close];
    if inner.is_empty() || inner.chars().all(|c| c.is_ascii_digit()) || inner.contains('\n') {
        return None;
    }
    Some((inner.to_string(), start + close + 2))
}

fn split_statements(tokens: &[Token]) -> Vec<&[Token]> {
    tokens
        .split(|t| t.is_punct(';'))
        .filter(|s| !s.is_empty())
        .collect()
}

/// Keywords that end a column's type and start a column constraint.
const COLUMN_CONSTRAINT_KWS: &[&str] = &[
    "CONSTRAINT", "PRIMARY", "REFERENCES", "NOT", "NULL", "DEFAULT", "UNIQUE", "CHECK", "COLLATE",
    "GENERATED", "AUTO_INCREMENT", "AUTOINCREMENT", "IDENTITY", "ON", "COMMENT", "AS",
];

struct Parser<'a> {
    src: &'a str,
    tokens: &'a [Token],
    pos: usize,
    dialect: Dialect,
    table: Option<TableRef>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, tokens: &'a [Token], dialect: Dialect) -> Self {
        Parser { src, tokens, pos: 0, dialect, table: None }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&'a Token> {
        self.tokens.get(self.pos + n)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_kw(kw))
    }

    fn at_punct(&self, c: char) -> bool {
        self.peek().is_some_and(|t| t.is_punct(c))
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.at_punct(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn end_offset(&self) -> usize {
        self.tokens.last().map_or(self.src.len(), |t| t.end)
    }

    fn error_here(&self, message: &str) -> DdlError {
        let (offset, found) = match self.peek() {
            Some(t) => (t.offset, format!("found '{t}'")),
            None => (self.end_offset(), "found end of statement".to_string()),
        };
        DdlError { offset, message: format!("{message}, {found}"), table: self.table.clone() }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), DdlError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error_here(&format!("expected {kw}")))
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), DdlError> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(self.error_here(&format!("expected '{c}'")))
        }
    }

    fn is_create_table(&self) -> bool {
        if !self.at_kw("CREATE") {
            return false;
        }
        self.tokens[1..]
            .iter()
            .take(4)
            .find(|t| !(t.is_kw("OR") || t.is_kw("REPLACE") || t.is_kw("TEMP") || t.is_kw("TEMPORARY")
                || t.is_kw("UNLOGGED") || t.is_kw("GLOBAL") || t.is_kw("LOCAL")))
            .is_some_and(|t| t.is_kw("TABLE"))
    }

    fn ident(&mut self) -> Result<Ident, DdlError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Word => {
                self.pos += 1;
                Ok(Ident::new(t.text.clone()))
            }
            Some(t) if t.kind == TokenKind::QuotedIdent => {
                self.pos += 1;
                Ok(Ident::quoted(t.text.clone()))
            }
            _ => Err(self.error_here("expected identifier")),
        }
    }

    fn object_name(&mut self) -> Result<TableRef, DdlError> {
        let mut parts = vec![self.ident()?];
        while self.eat_punct('.') {
            parts.push(self.ident()?);
        }
        let n = parts.len();
        let table = parts.pop().expect("non-empty");
        let schema = if n >= 2 {
            parts.pop().expect("n >= 2")
        } else {
            Ident::new(self.dialect.default_schema())
        };
        Ok(TableRef { schema, table })
    }

    fn create_table(&mut self) -> Result<ParsedTable, DdlError> {
        let stmt_start = self.tokens[0].offset;
        self.expect_kw("CREATE")?;
        while ["OR", "REPLACE", "GLOBAL", "LOCAL", "TEMP", "TEMPORARY", "UNLOGGED"]
            .iter()
            .any(|kw| self.eat_kw(kw))
        {}
        self.expect_kw("TABLE")?;
        if self.eat_kw("IF") {
            self.expect_kw("NOT")?;
            self.expect_kw("EXISTS")?;
        }
        let name = self.object_name()?;
        self.table = Some(name.clone());
        if self.at_kw("AS") {
            return Err(self.error_here("CREATE TABLE ... AS is not supported"));
        }
        self.expect_punct('(')?;

        let mut columns: Vec<ColumnMeta> = Vec::new();
        let mut primary_key: Option<Vec<Ident>> = None;
        let mut foreign_keys = Vec::new();
        let mut fk_count = 0usize;

        loop {
            if self.at_table_constraint() {
                let constraint_name = if self.eat_kw("CONSTRAINT") { Some(self.ident()?) } else { None };
                if self.eat_kw("PRIMARY") {
                    self.expect_kw("KEY")?;
                    let cols = self.column_list()?;
                    if primary_key.replace(cols).is_some() {
                        return Err(self.error_here("multiple primary keys"));
                    }
                } else if self.eat_kw("FOREIGN") {
                    self.expect_kw("KEY")?;
                    let cols = self.column_list()?;
                    self.expect_kw("REFERENCES")?;
                    let (target, target_columns) = self.reference_target()?;
                    if !target_columns.is_empty() && target_columns.len() != cols.len() {
                        return Err(self.error_here("foreign key column count does not match referenced columns"));
                    }
                    fk_count += 1;
                    let group = (cols.len() > 1).then(|| match &constraint_name {
                        Some(n) => n.to_string(),
                        None => format!("{}_fk{}", name.table, fk_count),
                    });
                    foreign_keys.push(ForeignKeyClause { columns: cols, target, target_columns, group });
                } else if self.eat_kw("UNIQUE") {
                    let _ = self.eat_kw("KEY") || self.eat_kw("INDEX");
                    self.column_list()?;
                } else if self.eat_kw("CHECK") {
                    self.balanced_group()?;
                } else if self.eat_kw("EXCLUDE") {
                    // opaque; skipped below
                } else {
                    return Err(self.error_here("expected constraint"));
                }
                self.skip_to_element_end()?;
            } else if self.eat_kw("LIKE") {
                self.skip_to_element_end()?;
            } else {
                let (column, inline_pk, inline_fk) = self.column_def(columns.len())?;
                if columns.iter().any(|c| c.name == column.name) {
                    return Err(self.error_here(&format!("duplicate column '{}'", column.name)));
                }
                if inline_pk && primary_key.replace(vec![column.name.clone()]).is_some() {
                    return Err(self.error_here("multiple primary keys"));
                }
                if let Some((target, target_columns)) = inline_fk {
                    fk_count += 1;
                    foreign_keys.push(ForeignKeyClause {
                        columns: vec![column.name.clone()],
                        target,
                        target_columns,
                        group: None,
                    });
                }
                columns.push(column);
            }
            if self.eat_punct(',') {
                continue;
            }
            self.expect_punct(')')?;
            break;
        }
        // table options: WITH (...), INHERITS (...), WITHOUT ROWID, ENGINE=...
        while let Some(t) = self.peek() {
            if t.is_punct('(') {
                self.balanced_group()?;
            } else if t.is_punct(')') {
                return Err(self.error_here("unbalanced ')'"));
            } else {
                self.pos += 1;
            }
        }

        let mut meta = TableMeta::new(name, columns);
        if let Some(pk) = primary_key {
            meta.set_primary_key(pk).map_err(|missing| DdlError {
                offset: stmt_start,
                message: format!("primary key column '{missing}' is not defined"),
                table: self.table.clone(),
            })?;
        }
        for fk in &foreign_keys {
            if let Some(missing) = fk.columns.iter().find(|c| meta.column(c).is_none()) {
                return Err(DdlError {
                    offset: stmt_start,
                    message: format!("foreign key column '{missing}' is not defined"),
                    table: self.table.clone(),
                });
            }
        }
        meta.ddl_accessible = true;
        let stmt_end = self.end_offset();
        meta.ddl_text = Some(self.src[stmt_start..stmt_end].to_string());
        Ok(ParsedTable { meta, foreign_keys })
    }

    fn at_table_constraint(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        let next = self.peek_at(1);
        if t.is_kw("CONSTRAINT") {
            return true;
        }
        if t.is_kw("PRIMARY") || t.is_kw("FOREIGN") {
            return next.is_some_and(|n| n.is_kw("KEY"));
        }
        if t.is_kw("UNIQUE") || t.is_kw("CHECK") {
            return next.is_some_and(|n| n.is_punct('(') || n.is_kw("KEY") || n.is_kw("INDEX"));
        }
        t.is_kw("EXCLUDE") && next.is_some_and(|n| n.is_kw("USING") || n.is_punct('('))
    }

    fn column_list(&mut self) -> Result<Vec<Ident>, DdlError> {
        self.expect_punct('(')?;
        let mut cols = Vec::new();
        loop {
            cols.push(self.ident()?);
            // ordering / collation modifiers
            loop {
                if self.eat_kw("ASC") || self.eat_kw("DESC") {
                    continue;
                }
                if self.eat_kw("COLLATE") {
                    self.ident()?;
                    continue;
                }
                if self.at_punct('(') {
                    // prefix length, e.g. name(10)
                    self.balanced_group()?;
                    continue;
                }
                break;
            }
            if self.eat_punct(',') {
                continue;
            }
            self.expect_punct(')')?;
            return Ok(cols);
        }
    }

    fn reference_target(&mut self) -> Result<(TableRef, Vec<Ident>), DdlError> {
        let target = self.object_name()?;
        let cols = if self.at_punct('(') { self.column_list()? } else { Vec::new() };
        loop {
            if self.eat_kw("ON") {
                if !(self.eat_kw("DELETE") || self.eat_kw("UPDATE")) {
                    return Err(self.error_here("expected DELETE or UPDATE"));
                }
                if self.eat_kw("SET") {
                    if !(self.eat_kw("NULL") || self.eat_kw("DEFAULT")) {
                        return Err(self.error_here("expected NULL or DEFAULT"));
                    }
                    if self.at_punct('(') {
                        self.column_list()?;
                    }
                } else if self.eat_kw("NO") {
                    self.expect_kw("ACTION")?;
                } else if !(self.eat_kw("CASCADE") || self.eat_kw("RESTRICT")) {
                    return Err(self.error_here("expected referential action"));
                }
            } else if self.eat_kw("MATCH") {
                self.ident()?;
            } else if self.eat_kw("DEFERRABLE") {
            } else if self.at_kw("NOT") && self.peek_at(1).is_some_and(|t| t.is_kw("DEFERRABLE")) {
                self.pos += 2;
            } else if self.eat_kw("INITIALLY") {
                self.ident()?;
            } else {
                return Ok((target, cols));
            }
        }
    }

    fn declared_type(&mut self) -> Result<String, DdlError> {
        let mut out = String::new();
        while let Some(t) = self.peek() {
            if t.is_punct(',') || t.is_punct(')') || COLUMN_CONSTRAINT_KWS.iter().any(|kw| t.is_kw(kw)) {
                break;
            }
            if t.is_punct('(') {
                let start = self.pos;
                self.balanced_group()?;
                let inner: Vec<String> =
                    self.tokens[start + 1..self.pos - 1].iter().map(|t| t.to_string()).collect();
                out.push('(');
                out.push_str(&inner.join("").replace(',', ", "));
                out.push(')');
            } else if t.is_punct('[') {
                self.pos += 1;
                out.push('[');
                while let Some(t) = self.next() {
                    if t.is_punct(']') {
                        break;
                    }
                    out.push_str(&t.text);
                }
                out.push(']');
            } else if matches!(t.kind, TokenKind::Word | TokenKind::QuotedIdent | TokenKind::Number) {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(&t.text);
                self.pos += 1;
            } else if t.is_punct('.') {
                // schema-qualified type name
                out.push('.');
                self.pos += 1;
                if let Some(n) = self.next() {
                    out.push_str(&n.text);
                }
            } else {
                return Err(self.error_here("unexpected token in column type"));
            }
        }
        Ok(out.replace(" .", "."))
    }

    #[allow(clippy::type_complexity)]
    fn column_def(
        &mut self,
        ordinal: usize,
    ) -> Result<(ColumnMeta, bool, Option<(TableRef, Vec<Ident>)>), DdlError> {
        let name = self.ident()?;
        let ty = self.declared_type()?;
        let mut column = ColumnMeta::new(name, &ty, self.dialect, ordinal);
        let mut primary = false;
        let mut reference = None;
        loop {
            let Some(t) = self.peek() else {
                return Err(self.error_here("unexpected end of column definition"));
            };
            if t.is_punct(',') || t.is_punct(')') {
                break;
            }
            if self.eat_kw("CONSTRAINT") {
                self.ident()?;
            } else if self.eat_kw("PRIMARY") {
                self.expect_kw("KEY")?;
                let _ = self.eat_kw("ASC") || self.eat_kw("DESC");
                primary = true;
                column.nullable = false;
            } else if self.eat_kw("NOT") {
                self.expect_kw("NULL")?;
                column.nullable = false;
            } else if self.eat_kw("NULL") {
                column.nullable = true;
            } else if self.eat_kw("UNIQUE") {
                let _ = self.eat_kw("KEY");
            } else if self.eat_kw("CHECK") {
                self.balanced_group()?;
            } else if self.eat_kw("REFERENCES") {
                let (target, cols) = self.reference_target()?;
                if cols.len() > 1 {
                    return Err(self.error_here("inline REFERENCES may name only one column"));
                }
                if reference.replace((target, cols)).is_some() {
                    return Err(self.error_here("column has more than one REFERENCES clause"));
                }
            } else if self.eat_kw("DEFAULT") {
                self.skip_expression(true)?;
            } else if self.eat_kw("COLLATE") {
                self.ident()?;
            } else if self.eat_kw("GENERATED") || self.eat_kw("AS") {
                self.skip_expression(false)?;
            } else if self.eat_kw("ON") {
                // ON CONFLICT <action> (SQLite), ON UPDATE <expr> (MySQL)
                self.skip_expression(true)?;
            } else if self.eat_kw("COMMENT") {
                self.next();
            } else if t.is_punct('(') {
                self.balanced_group()?;
            } else if matches!(t.kind, TokenKind::Word) {
                // AUTOINCREMENT, IDENTITY, vendor-specific flags
                self.pos += 1;
            } else {
                return Err(self.error_here("unexpected token in column definition"));
            }
        }
        Ok((column, primary, reference))
    }

    /// Skips an expression. With `first_is_value`, the first token is always
    /// consumed (so `DEFAULT NULL` works); afterwards stops at a constraint
    /// keyword, `,` or `)` at depth zero.
    fn skip_expression(&mut self, first_is_value: bool) -> Result<(), DdlError> {
        let mut first = first_is_value;
        while let Some(t) = self.peek() {
            if t.is_punct('(') {
                self.balanced_group()?;
            } else if t.is_punct(',') || t.is_punct(')') {
                break;
            } else if !first
                && ["CONSTRAINT", "PRIMARY", "REFERENCES", "NOT", "NULL", "UNIQUE", "CHECK", "COLLATE", "DEFAULT"]
                    .iter()
                    .any(|kw| t.is_kw(kw))
            {
                // GENERATED BY DEFAULT AS IDENTITY
                if t.is_kw("DEFAULT") && self.pos > 0 && self.tokens[self.pos - 1].is_kw("BY") {
                    self.pos += 1;
                } else {
                    break;
                }
            } else {
                self.pos += 1;
            }
            first = false;
        }
        Ok(())
    }

    fn balanced_group(&mut self) -> Result<(), DdlError> {
        let open = self.pos;
        self.expect_punct('(')?;
        let mut depth = 1usize;
        while let Some(t) = self.next() {
            if t.is_punct('(') {
                depth += 1;
            } else if t.is_punct(')') {
                depth -= 1;
                if depth == 0 {
                    return Ok(());
                }
            }
        }
        Err(DdlError {
            offset: self.tokens[open].offset,
            message: "unbalanced '('".into(),
            table: self.table.clone(),
        })
    }

    fn skip_to_element_end(&mut self) -> Result<(), DdlError> {
        while let Some(t) = self.peek() {
            if t.is_punct(',') || t.is_punct(')') {
                return Ok(());
            }
            if t.is_punct('(') {
                self.balanced_group()?;
            } else {
                self.pos += 1;
            }
        }
        Err(self.error_here("unexpected end of table definition"))
    }
}
