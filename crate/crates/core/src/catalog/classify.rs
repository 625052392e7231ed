//! Mapping from declared column types to [`TypeClass`].

use super::types::{Dialect, TypeClass};

/// Classifies a declared type string. Total and deterministic; anything not
/// recognised is [`TypeClass::Unknown`].
pub fn classify_type(declared_type: &str, dialect: Dialect) -> TypeClass {
    let base = normalize(declared_type);
    if base.is_empty() {
        return TypeClass::Unknown;
    }
    if let Some(class) = postgres_class(&base) {
        return class;
    }
    match dialect {
        Dialect::Postgres => TypeClass::Unknown,
        Dialect::Sqlite => sqlite_affinity(&base),
        Dialect::Generic => generic_class(&base).unwrap_or_else(|| sqlite_affinity(&base)),
    }
}

/// Lowercases, drops length/precision arguments and array suffixes,
/// strips time zone qualifiers and collapses whitespace.
fn normalize(declared: &str) -> String {
    let mut out = String::with_capacity(declared.len());
    let mut depth = 0usize;
    for c in declared.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.extend(c.to_lowercase()),
            _ => {}
        }
    }
    let words: Vec<&str> = out.split_whitespace().collect();
    let mut joined = words.join(" ");
    for suffix in [" with time zone", " without time zone", " unsigned", " signed", " zerofill"] {
        if let Some(stripped) = joined.strip_suffix(suffix) {
            joined = stripped.to_string();
        }
    }
    joined
}

fn postgres_class(base: &str) -> Option<TypeClass> {
    let class = match base {
        "integer" | "int" | "int2" | "int4" | "int8" | "smallint" | "bigint" | "decimal"
        | "numeric" | "real" | "double precision" | "float" | "float4" | "float8" | "serial"
        | "serial2" | "serial4" | "serial8" | "smallserial" | "bigserial" | "oid" => {
            TypeClass::Digits
        }
        "money" => TypeClass::Money,
        "character varying" | "varchar" | "character" | "char" | "text" | "bpchar" | "name"
        | "citext" => TypeClass::Character,
        "bytea" => TypeClass::Binary,
        "timestamp" | "timestamptz" | "date" | "time" | "timetz" | "interval" => TypeClass::Data,
        "boolean" | "bool" | "bit" | "bit varying" | "varbit" => TypeClass::Boolean,
        "line" | "point" | "lseg" | "box" | "path" | "polygon" | "circle" => TypeClass::Geometric,
        "cidr" | "inet" | "macaddr" | "macaddr8" => TypeClass::Network,
        _ => return None,
    };
    Some(class)
}

fn generic_class(base: &str) -> Option<TypeClass> {
    let class = match base {
        "tinyint" | "mediumint" | "number" | "double" | "dec" | "fixed" => TypeClass::Digits,
        "smallmoney" => TypeClass::Money,
        "nvarchar" | "nchar" | "national character varying" | "national character"
        | "varchar2" | "nvarchar2" | "string" | "clob" | "nclob" | "tinytext"
        | "mediumtext" | "longtext" => TypeClass::Character,
        "blob" | "binary" | "varbinary" | "bytes" | "longblob" | "mediumblob" | "tinyblob"
        | "image" => TypeClass::Binary,
        "datetime" | "datetime2" | "smalldatetime" | "datetimeoffset" | "year" => TypeClass::Data,
        _ => return None,
    };
    Some(class)
}

/// SQLite column affinity rules, applied to the type name.
fn sqlite_affinity(base: &str) -> TypeClass {
    if base.contains("int") {
        TypeClass::Digits
    } else if base.contains("char") || base.contains("clob") || base.contains("text") {
        TypeClass::Character
    } else if base.contains("blob") {
        TypeClass::Binary
    } else if base.contains("real") || base.contains("floa") || base.contains("doub") {
        TypeClass::Digits
    } else if base.contains("date") || base.contains("time") {
        TypeClass::Data
    } else if base.contains("bool") {
        TypeClass::Boolean
    } else if base == "numeric" || base == "decimal" {
        TypeClass::Digits
    } else {
        TypeClass::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &[(TypeClass, &[&str])] = &[
        (
            TypeClass::Digits,
            &["integer", "decimal", "numeric", "real", "double precision", "serial"],
        ),
        (TypeClass::Money, &["money"]),
        (
            TypeClass::Character,
            &["character varying", "varchar", "character", "char", "text"],
        ),
        (TypeClass::Binary, &["bytea"]),
        (TypeClass::Data, &["timestamp", "date", "time", "interval"]),
        (TypeClass::Boolean, &["boolean", "bit", "bit varying"]),
        (
            TypeClass::Geometric,
            &["line", "point", "lseg", "box", "path", "polygon", "circle"],
        ),
        (TypeClass::Network, &["cidr", "inet", "macaddr"]),
    ];

    #[test]
    fn every_listed_type_maps_to_its_class() {
        for dialect in [Dialect::Postgres, Dialect::Generic] {
            for (class, names) in TABLE {
                for name in *names {
                    assert_eq!(classify_type(name, dialect), *class, "{name} under {dialect}");
                    assert_eq!(classify_type(&name.to_uppercase(), dialect), *class);
                }
            }
        }
    }

    #[test]
    fn arguments_and_qualifiers_are_ignored() {
        let d = Dialect::Postgres;
        assert_eq!(classify_type("varchar(255)", d), TypeClass::Character);
        assert_eq!(classify_type("NUMERIC(10, 2)", d), TypeClass::Digits);
        assert_eq!(classify_type("timestamp(3) with time zone", d), TypeClass::Data);
        assert_eq!(classify_type("character  varying(20)", d), TypeClass::Character);
        assert_eq!(classify_type("int[]", d), TypeClass::Digits);
    }

    #[test]
    fn unlisted_types_are_unknown() {
        assert_eq!(classify_type("uuid", Dialect::Postgres), TypeClass::Unknown);
        assert_eq!(classify_type("jsonb", Dialect::Postgres), TypeClass::Unknown);
        assert_eq!(classify_type("", Dialect::Sqlite), TypeClass::Unknown);
        assert_eq!(classify_type("uuid", Dialect::Sqlite), TypeClass::Unknown);
    }

    #[test]
    fn sqlite_uses_affinity() {
        assert_eq!(classify_type("UNSIGNED BIG INT", Dialect::Sqlite), TypeClass::Digits);
        assert_eq!(classify_type("NVARCHAR(100)", Dialect::Sqlite), TypeClass::Character);
        assert_eq!(classify_type("BLOB", Dialect::Sqlite), TypeClass::Binary);
        assert_eq!(classify_type("DATETIME", Dialect::Sqlite), TypeClass::Data);
        assert_eq!(classify_type("blob", Dialect::Postgres), TypeClass::Unknown);
    }
}
