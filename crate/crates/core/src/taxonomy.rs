//! Category -> sub-category token maps for the three faceted attribute kinds.
//!
//! A taxonomy is loaded from a small tab-separated config:
//!
//! ```text
//! # comment
//! method<TAB>Hartree-Fock<TAB>hf,rhf,rohf,uhf
//! ```
//!
//! Users pick categories ("Hartree-Fock"); documents carry tokens ("rohf").
//! [`Taxonomy::expand`] goes from the former to the latter and
//! [`Taxonomy::categorize_token`] goes back, which is how facet links are
//! grouped.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The bundled default config.
pub const DEFAULT_CONFIG: &str = include_str!("../data/taxonomy.tsv");

/// Category name meaning "no constraint". Never stored.
pub const ANY: &str = "Any";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    JobType,
    Method,
    BasisSet,
}

impl AttributeKind {
    pub const ALL: [AttributeKind; 3] = [Self::JobType, Self::Method, Self::BasisSet];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::JobType => "job_type",
            Self::Method => "method",
            Self::BasisSet => "basis_set",
        }
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown attribute kind {0:?}")]
pub struct UnknownKind(pub String);

impl FromStr for AttributeKind {
    type Err = UnknownKind;

    /// Accepts the canonical names plus the short query-parameter spellings
    /// (`jobtype`, `basis`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "job_type" | "jobtype" => Ok(Self::JobType),
            "method" => Ok(Self::Method),
            "basis_set" | "basis" => Ok(Self::BasisSet),
            _ => Err(UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("taxonomy config line {line}: {reason}")]
pub struct ConfigError {
    pub line: usize,
    pub reason: ConfigErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigErrorKind {
    #[error("expected three tab-separated fields")]
    Malformed,
    #[error("unknown kind {0:?}")]
    UnknownKind(String),
    #[error("token {token:?} already belongs to category {category:?}")]
    DuplicateToken { token: String, category: String },
    #[error("category {0:?} clashes with an existing category name")]
    DuplicateCategory(String),
    #[error("\"Any\" is reserved and cannot be a category")]
    ReservedCategory,
}

/// Lowercase and trim. Inner punctuation is kept as written.
pub fn normalize_token(raw: &str) -> String {
    raw.trim().to_lowercase()
}

/// Keyword part of a job token: `opt=(calcfc,ts)` -> `opt`.
pub fn job_stem(token: &str) -> &str {
    token.find(['=', '(']).map_or(token, |i| &token[..i])
}

#[derive(Clone, Debug, Default, PartialEq)]
struct KindMap {
    categories: IndexMap<String, IndexSet<String>>,
    // token -> category name
    reverse: HashMap<String, String>,
}

impl KindMap {
    fn find_category(&self, name: &str) -> Option<(&String, &IndexSet<String>)> {
        let folded = name.trim().to_lowercase();
        self.categories.iter().find(|(k, _)| k.to_lowercase() == folded)
    }
}

/// Immutable after load.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Taxonomy {
    job_type: KindMap,
    method: KindMap,
    basis_set: KindMap,
}

impl Taxonomy {
    pub fn load(config_text: &str) -> Result<Self, ConfigError> {
        let mut tax = Taxonomy::default();
        for (idx, raw_line) in config_text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |reason| ConfigError { line, reason };
            let fields: Vec<&str> = raw_line.trim_end_matches('\r').split('\t').collect();
            if fields.len() != 3 {
                return Err(err(ConfigErrorKind::Malformed));
            }
            let kind: AttributeKind = fields[0]
                .trim()
                .parse()
                .map_err(|_| err(ConfigErrorKind::UnknownKind(fields[0].trim().to_string())))?;
            let category = fields[1].trim();
            if category.is_empty() {
                return Err(err(ConfigErrorKind::Malformed));
            }
            if category.eq_ignore_ascii_case(ANY) {
                return Err(err(ConfigErrorKind::ReservedCategory));
            }
            let tokens = split_tokens(fields[2]);
            if tokens.is_empty() || tokens.iter().any(|t| t.is_empty()) {
                return Err(err(ConfigErrorKind::Malformed));
            }

            let map = tax.kind_map_mut(kind);
            if let Some((existing, _)) = map.find_category(category) {
                if existing != category {
                    return Err(err(ConfigErrorKind::DuplicateCategory(category.to_string())));
                }
            }
            for token in tokens {
                if let Some(owner) = map.reverse.get(&token) {
                    return Err(err(ConfigErrorKind::DuplicateToken {
                        token,
                        category: owner.clone(),
                    }));
                }
                map.reverse.insert(token.clone(), category.to_string());
                map.categories.entry(category.to_string()).or_default().insert(token);
            }
        }
        Ok(tax)
    }

    /// The bundled default taxonomy.
    pub fn default_config() -> Self {
        Self::load(DEFAULT_CONFIG).expect("bundled taxonomy config is valid")
    }

    fn kind_map(&self, kind: AttributeKind) -> &KindMap {
        match kind {
            AttributeKind::JobType => &self.job_type,
            AttributeKind::Method => &self.method,
            AttributeKind::BasisSet => &self.basis_set,
        }
    }

    fn kind_map_mut(&mut self, kind: AttributeKind) -> &mut KindMap {
        match kind {
            AttributeKind::JobType => &mut self.job_type,
            AttributeKind::Method => &mut self.method,
            AttributeKind::BasisSet => &mut self.basis_set,
        }
    }

    /// Category names of a kind, in config order.
    pub fn categories(&self, kind: AttributeKind) -> impl Iterator<Item = &str> {
        self.kind_map(kind).categories.keys().map(String::as_str)
    }

    /// Sub-category tokens of a category, in config order.
    pub fn tokens(&self, kind: AttributeKind, category: &str) -> Option<impl Iterator<Item = &str>> {
        self.kind_map(kind)
            .categories
            .get(category)
            .map(|set| set.iter().map(String::as_str))
    }

    /// Every known token of a kind.
    pub fn all_tokens(&self, kind: AttributeKind) -> impl Iterator<Item = &str> {
        self.kind_map(kind)
            .categories
            .values()
            .flat_map(|set| set.iter().map(String::as_str))
    }

    pub fn is_known_token(&self, kind: AttributeKind, token: &str) -> bool {
        self.kind_map(kind).reverse.contains_key(token)
    }

    /// Tokens searched for a user-facing category.
    ///
    /// Category names match case-insensitively. Unknown names become a single
    /// free-text token. "Any" (or a blank entry) yields the empty set, meaning
    /// unconstrained.
    pub fn expand(&self, kind: AttributeKind, category_name: &str) -> BTreeSet<String> {
        let name = category_name.trim();
        if name.is_empty() || name.eq_ignore_ascii_case(ANY) {
            return BTreeSet::new();
        }
        match self.kind_map(kind).find_category(name) {
            Some((_, tokens)) => tokens.iter().cloned().collect(),
            None => BTreeSet::from([normalize_token(name)]),
        }
    }

    /// Category owning `token`, or the normalized token itself when none does.
    /// Job tokens with options fall back to their keyword stem.
    pub fn categorize_token(&self, kind: AttributeKind, token: &str) -> String {
        let token = normalize_token(token);
        let map = self.kind_map(kind);
        if let Some(cat) = map.reverse.get(&token) {
            return cat.clone();
        }
        if kind == AttributeKind::JobType {
            if let Some(cat) = map.reverse.get(job_stem(&token)) {
                return cat.clone();
            }
        }
        token
    }

    /// Terms a record token is searchable under: the token and, for job
    /// tokens carrying options, its keyword stem.
    pub fn match_terms(&self, kind: AttributeKind, token: &str) -> Vec<String> {
        let token = normalize_token(token);
        let mut terms = Vec::with_capacity(2);
        if kind == AttributeKind::JobType {
            let stem = job_stem(&token);
            if !stem.is_empty() && stem != token {
                terms.push(stem.to_string());
            }
        }
        terms.push(token);
        terms
    }

    /// Serializes back to the config line format.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        for kind in AttributeKind::ALL {
            for (cat, tokens) in &self.kind_map(kind).categories {
                let joined: Vec<&str> = tokens.iter().map(String::as_str).collect();
                out.push_str(&format!("{}\t{}\t{}\n", kind, cat, joined.join(",")));
            }
        }
        out
    }
}

impl TryFrom<String> for Taxonomy {
    type Error = ConfigError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Taxonomy::load(&value)
    }
}

impl From<Taxonomy> for String {
    fn from(value: Taxonomy) -> Self {
        value.to_config()
    }
}

// Split on commas that are not inside parentheses, so "6-311+g(2d,p)" stays whole.
fn split_tokens(field: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in field.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth <= 0 => {
                out.push(normalize_token(&current));
                current.clear();
                continue;
            }
            _ => {}
        }
        current.push(c);
    }
    out.push(normalize_token(&current));
    out
}
