//! Column-name tokenization, noise removal and synonym expansion.

mod pack;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use pack::{LanguagePack, PackError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenList {
    pub source_name: String,
    pub tokens: Vec<String>,
}

impl TokenList {
    pub fn tokens_number(&self) -> usize {
        self.tokens.len()
    }
}

/// Splits an identifier on separators (anything not alphanumeric), on
/// letter/digit boundaries and on lower-to-upper case changes, then
/// lowercases each piece.
///
/// `CustomerId` → `customer`, `id`; `user_name2` → `user`, `name`, `2`.
pub fn tokenize(name: &str) -> TokenList {
    #[derive(PartialEq, Clone, Copy)]
    enum Kind {
        Lower,
        Upper,
        Digit,
        Other,
    }
    let kind = |c: char| {
        if c.is_numeric() {
            Kind::Digit
        } else if c.is_uppercase() {
            Kind::Upper
        } else if c.is_alphabetic() {
            Kind::Lower
        } else {
            Kind::Other
        }
    };
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut prev = Kind::Other;
    for c in name.chars() {
        let k = kind(c);
        let boundary = matches!(
            (prev, k),
            (_, Kind::Other)
                | (Kind::Digit, Kind::Lower | Kind::Upper)
                | (Kind::Lower | Kind::Upper, Kind::Digit)
                | (Kind::Lower, Kind::Upper)
        );
        if boundary && !current.is_empty() {
            tokens.push(std::mem::take(&mut current).to_lowercase());
        }
        if k != Kind::Other {
            current.push(c);
        }
        prev = k;
    }
    if !current.is_empty() {
        tokens.push(current.to_lowercase());
    }
    if tokens.is_empty() && !name.is_empty() {
        tokens.push(name.to_lowercase());
    }
    TokenList { source_name: name.to_string(), tokens }
}

/// Drops the pack's noise tokens. If nothing would remain, the input is
/// returned unchanged.
pub fn denoise(tokens: &TokenList, pack: &LanguagePack) -> TokenList {
    let kept: Vec<String> = tokens.tokens.iter().filter(|t| !pack.is_noise(t)).cloned().collect();
    if kept.is_empty() {
        return tokens.clone();
    }
    TokenList { source_name: tokens.source_name.clone(), tokens: kept }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynonymBudget {
    /// `trunc(confidence / (confidence_coeff * tokens_number))`.
    pub total: usize,
    /// `total` split evenly over the tokens, at least 1.
    pub per_token: usize,
}

/// Adaptive synonym count. `confidence_coeff` must be positive and
/// `tokens_number` at least 1 (0 is treated as 1).
pub fn synonym_budget(confidence: f64, confidence_coeff: f64, tokens_number: usize) -> SynonymBudget {
    let n = tokens_number.max(1);
    let raw = confidence / (confidence_coeff * n as f64);
    // absorb binary rounding, e.g. 0.95 / 0.05 = 18.999999999999996
    let total = if raw.is_finite() && raw > 0.0 { (raw + 1e-9).floor() as usize } else { 0 };
    SynonymBudget { total, per_token: (total / n).max(1) }
}

/// A column's tokens together with their selected synonyms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SynonymSet(pub BTreeSet<String>);

impl SynonymSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, s: &str) -> bool {
        self.0.contains(s)
    }

    pub fn intersection_count(&self, other: &SynonymSet) -> usize {
        self.0.intersection(&other.0).count()
    }
}

impl<S: Into<String>> FromIterator<S> for SynonymSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        SynonymSet(iter.into_iter().map(Into::into).collect())
    }
}

/// Each token plus its first `per_token` ranked synonyms.
pub fn expand_synonyms(tokens: &TokenList, per_token: usize, pack: &LanguagePack) -> SynonymSet {
    let mut set = BTreeSet::new();
    for token in &tokens.tokens {
        set.insert(token.clone());
        set.extend(pack.synonyms_of(token).iter().take(per_token).cloned());
    }
    SynonymSet(set)
}

/// Everything the name stage derives for one column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameProfile {
    pub tokens: TokenList,
    pub denoised: TokenList,
    pub budget: SynonymBudget,
    pub synonyms: SynonymSet,
}

/// tokenize → denoise → budget → expand. The budget is computed once from
/// the initial confidence and the number of surviving tokens.
pub fn profile_name(name: &str, confidence: f64, confidence_coeff: f64, pack: &LanguagePack) -> NameProfile {
    let tokens = tokenize(name);
    let denoised = denoise(&tokens, pack);
    let budget = synonym_budget(confidence, confidence_coeff, denoised.tokens_number());
    let synonyms = expand_synonyms(&denoised, budget.per_token, pack);
    NameProfile { tokens, denoised, budget, synonyms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fixture_pack() -> LanguagePack {
        LanguagePack::parse(
            "@lang t\n@noise id pk fk\ncustomer: client, buyer, patron\nuser: account, member\nname: title, label\n",
        )
        .unwrap()
    }

    fn tl(tokens: &[&str]) -> TokenList {
        TokenList { source_name: tokens.join("_"), tokens: tokens.iter().map(|s| s.to_string()).collect() }
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("CustomerId").tokens, ["customer", "id"]);
        assert_eq!(tokenize("user_name").tokens, ["user", "name"]);
        assert_eq!(tokenize("Id").tokens, ["id"]);
        assert_eq!(tokenize("OwnerUserId").tokens, ["owner", "user", "id"]);
        assert_eq!(tokenize("address2-line 1").tokens, ["address", "2", "line", "1"]);
        assert_eq!(tokenize("CustomerID").tokens, ["customer", "id"]);
        assert_eq!(tokenize("ИмяКлиента").tokens, ["имя", "клиента"]);
        assert_eq!(tokenize("CustomerId").source_name, "CustomerId");
    }

    #[test]
    fn denoise_examples() {
        let pack = fixture_pack();
        assert_eq!(denoise(&tl(&["customer", "id"]), &pack).tokens, ["customer"]);
        assert_eq!(denoise(&tl(&["id"]), &pack).tokens, ["id"]);
        assert_eq!(denoise(&tl(&["order", "quantity"]), &pack).tokens, ["order", "quantity"]);
    }

    #[test]
    fn budget_examples() {
        // direct arithmetic: 0.95 / 0.05 = 19
        assert_eq!(synonym_budget(0.95, 0.05, 1), SynonymBudget { total: 19, per_token: 19 });
        // trunc(1.0 / 0.2) = 5, floor(5 / 2) = 2
        assert_eq!(synonym_budget(1.0, 0.1, 2), SynonymBudget { total: 5, per_token: 2 });
        // trunc(0.5 / 0.5) = 1, floor(1 / 10) = 0 → raised to 1
        assert_eq!(synonym_budget(0.5, 0.05, 10), SynonymBudget { total: 1, per_token: 1 });
        assert_eq!(synonym_budget(0.0, 0.05, 1).per_token, 1);
    }

    #[test]
    fn expansion_examples() {
        let pack = fixture_pack();
        let set = expand_synonyms(&tl(&["customer"]), 2, &pack);
        assert_eq!(set, ["customer", "client", "buyer"].into_iter().collect());
        let set = expand_synonyms(&tl(&["zzz"]), 5, &LanguagePack::parse("@lang t").unwrap());
        assert_eq!(set, ["zzz"].into_iter().collect());
        let set = expand_synonyms(&tl(&["user", "name"]), 1, &pack);
        assert_eq!(set, ["user", "account", "name", "title"].into_iter().collect());
    }

    #[test]
    fn profile_chains_the_stages() {
        let p = profile_name("CustomerId", 0.95, 0.05, &fixture_pack());
        assert_eq!(p.denoised.tokens, ["customer"]);
        assert_eq!(p.budget.per_token, 19);
        assert_eq!(p.synonyms.len(), 4);
    }

    proptest! {
        #[test]
        fn denoise_is_idempotent(name in "[A-Za-z_0-9]{1,24}") {
            let pack = fixture_pack();
            let once = denoise(&tokenize(&name), &pack);
            prop_assert_eq!(denoise(&once, &pack).clone(), once.clone());
            prop_assert!(!once.tokens.is_empty());
        }

        #[test]
        fn tokens_have_no_separators(name in "[A-Za-z][A-Za-z_ 0-9-]{0,24}") {
            for t in tokenize(&name).tokens {
                prop_assert!(t.chars().all(char::is_alphanumeric));
            }
        }

        #[test]
        fn synonym_set_bounds(name in "[a-z]{1,8}(_[a-z]{1,8}){0,3}", conf in 0.0f64..=1.0, coeff in 0.01f64..1.0) {
            let pack = LanguagePack::english();
            let p = profile_name(&name, conf, coeff, &pack);
            for t in &p.denoised.tokens {
                prop_assert!(p.synonyms.contains(t));
            }
            prop_assert!(p.synonyms.len() <= p.denoised.tokens_number() * (p.budget.per_token + 1));
        }
    }

    #[test]
    fn budget_is_monotone_on_a_grid() {
        let confs = [0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 1.0];
        let coeffs = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5];
        for &conf in &confs {
            for &coeff in &coeffs {
                for n in 1..8 {
                    let b = synonym_budget(conf, coeff, n).per_token;
                    assert!(synonym_budget(conf, coeff, n + 1).per_token <= b);
                }
            }
        }
        for w in coeffs.windows(2) {
            for &conf in &confs {
                assert!(synonym_budget(conf, w[1], 2).per_token <= synonym_budget(conf, w[0], 2).per_token);
            }
        }
        for w in confs.windows(2) {
            for &coeff in &coeffs {
                assert!(synonym_budget(w[1], coeff, 3).per_token >= synonym_budget(w[0], coeff, 3).per_token);
            }
        }
    }
}
