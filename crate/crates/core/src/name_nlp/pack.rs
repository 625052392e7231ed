use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PackError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("pack has no @lang line")]
    MissingLanguage,
    #[error("no language pack for '{0}'")]
    UnknownLanguage(String),
    #[error("cannot read pack {0}: {1}")]
    Io(String, #[source] std::io::Error),
}

/// Noise tokens and ranked synonyms for one language.
///
/// Text format, one entry per line (`#` starts a comment):
///
/// ```text
/// @lang en
/// @noise id pk fk
/// customer: client, buyer, patron
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguagePack {
    pub code: String,
    pub noise: BTreeSet<String>,
    pub synonyms: BTreeMap<String, Vec<String>>,
}

const BUILTIN: &[(&str, &str)] = &[("en", include_str!("packs/en.pack")), ("es", include_str!("packs/es.pack"))];

impl LanguagePack {
    pub fn parse(text: &str) -> Result<Self, PackError> {
        let mut code = None;
        let mut noise = BTreeSet::new();
        let mut synonyms: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: &str| PackError::Syntax { line: i + 1, message: message.to_string() };
            if let Some(rest) = line.strip_prefix("@lang") {
                let c = rest.trim();
                if c.is_empty() || c.contains(char::is_whitespace) {
                    return Err(syntax("@lang takes exactly one code"));
                }
                code = Some(c.to_lowercase());
            } else if let Some(rest) = line.strip_prefix("@noise") {
                noise.extend(rest.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).map(str::to_lowercase));
            } else if let Some((token, list)) = line.split_once(':') {
                let token = token.trim().to_lowercase();
                if token.is_empty() || token.contains(char::is_whitespace) {
                    return Err(syntax("entry token must be a single word"));
                }
                let entry = synonyms.entry(token.clone()).or_default();
                for syn in list.split(',').map(|s| s.trim().to_lowercase()).filter(|s| !s.is_empty()) {
                    if syn != token && !entry.contains(&syn) {
                        entry.push(syn);
                    }
                }
            } else {
                return Err(syntax("expected '@lang', '@noise' or 'token: synonyms'"));
            }
        }
        Ok(LanguagePack { code: code.ok_or(PackError::MissingLanguage)?, noise, synonyms })
    }

    /// Pack compiled into the library.
    pub fn builtin(code: &str) -> Option<Self> {
        let code = code.to_lowercase();
        BUILTIN
            .iter()
            .find(|(c, _)| *c == code)
            .map(|(_, text)| LanguagePack::parse(text).expect("built-in packs are valid"))
    }

    pub fn builtin_codes() -> Vec<&'static str> {
        BUILTIN.iter().map(|(c, _)| *c).collect()
    }

    pub fn english() -> Self {
        Self::builtin("en").expect("english pack")
    }

    /// Looks for `<code>.pack` in `pack_dir` first, then the built-ins.
    pub fn load(code: &str, pack_dir: Option<&Path>) -> Result<Self, PackError> {
        if let Some(dir) = pack_dir {
            let path = dir.join(format!("{}.pack", code.to_lowercase()));
            if path.is_file() {
                let text = fs::read_to_string(&path).map_err(|e| PackError::Io(path.display().to_string(), e))?;
                return LanguagePack::parse(&text);
            }
        }
        Self::builtin(code).ok_or_else(|| PackError::UnknownLanguage(code.to_string()))
    }

    pub fn is_noise(&self, token: &str) -> bool {
        self.noise.contains(token)
    }

    /// Ranked synonyms for `token`, empty when unknown.
    pub fn synonyms_of(&self, token: &str) -> &[String] {
        self.synonyms.get(token).map_or(&[], Vec::as_slice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for code in LanguagePack::builtin_codes() {
            let pack = LanguagePack::builtin(code).unwrap();
            assert_eq!(pack.code, code);
            assert!(pack.is_noise("id"));
        }
        let es = LanguagePack::builtin("ES").unwrap();
        assert_eq!(es.synonyms_of("cliente")[0], "comprador");
    }

    #[test]
    fn parse_format() {
        let pack = LanguagePack::parse("# c\n@lang xx\n@noise a, b\nfoo: bar, Baz, foo, bar  # trailing\n").unwrap();
        assert_eq!(pack.code, "xx");
        assert_eq!(pack.noise.len(), 2);
        assert_eq!(pack.synonyms_of("foo"), ["bar", "baz"]);
        assert!(pack.synonyms_of("nope").is_empty());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = LanguagePack::parse("@lang xx\nthis line is wrong\n").unwrap_err();
        assert!(matches!(err, PackError::Syntax { line: 2, .. }));
        assert!(matches!(LanguagePack::parse("foo: bar"), Err(PackError::MissingLanguage)));
    }

    #[test]
    fn pack_dir_overrides_builtin() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("en.pack"), "@lang en\n@noise zz\n").unwrap();
        let pack = LanguagePack::load("en", Some(dir.path())).unwrap();
        assert!(pack.is_noise("zz") && !pack.is_noise("id"));
        assert!(matches!(LanguagePack::load("xx", Some(dir.path())), Err(PackError::UnknownLanguage(_))));
    }
}
