//! Boolean element + attribute queries and their record-level evaluator.
//!
//! [`Query::matches`] is the reference semantics. The index answers the same
//! question through posting lists and is tested against a linear scan of this
//! function.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements;
use crate::gparse::GaussianRecord;
use crate::taxonomy::{AttributeKind, Taxonomy, ANY};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("at least one element is required")]
    EmptyElements,
    #[error("unknown element symbol {0:?}")]
    UnknownElement(String),
    #[error("cannot refine on field {0:?}; expected job_type, method or basis_set")]
    InvalidField(String),
    #[error("unknown element mode {0:?}; expected exact or contains")]
    InvalidMode(String),
    #[error("unknown connective {0:?}; expected and or or")]
    InvalidConnective(String),
}

impl QueryError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            QueryError::EmptyElements => "EmptyElements",
            QueryError::UnknownElement(_) => "UnknownElement",
            QueryError::InvalidField(_) => "InvalidField",
            QueryError::InvalidMode(_) => "InvalidMode",
            QueryError::InvalidConnective(_) => "InvalidConnective",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementMode {
    /// The record holds exactly the selected elements.
    Exact,
    /// The record holds the selected elements and possibly others.
    #[default]
    Contains,
}

impl FromStr for ElementMode {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Self::Exact),
            "contains" | "" => Ok(Self::Contains),
            _ => Err(QueryError::InvalidMode(s.to_string())),
        }
    }
}

impl fmt::Display for ElementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Contains => "contains",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connective {
    #[default]
    And,
    Or,
}

impl FromStr for Connective {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "and" | "" => Ok(Self::And),
            "or" => Ok(Self::Or),
            _ => Err(QueryError::InvalidConnective(s.to_string())),
        }
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::And => "and",
            Self::Or => "or",
        })
    }
}

/// A facet click: keep only results with a token categorized as `value`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Refinement {
    pub field: AttributeKind,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    elements: BTreeSet<String>,
    element_mode: ElementMode,
    method_clause: Option<String>,
    job_clause: Option<String>,
    basis_clause: Option<String>,
    connective: Connective,
    refinements: Vec<Refinement>,
}

fn clause_value(raw: Option<&str>) -> Option<String> {
    raw.map(str::trim)
        .filter(|s| !s.is_empty() && !s.eq_ignore_ascii_case(ANY))
        .map(str::to_string)
}

/// Normalizes raw UI / CLI / API input into a [`Query`].
///
/// Symbols are canonicalized ("fe" -> "Fe"), blank entries skipped, and
/// "Any" or empty clauses dropped. An empty connective means AND.
pub fn build_query<S: AsRef<str>>(
    raw_elements: &[S],
    mode: ElementMode,
    method: Option<&str>,
    job_type: Option<&str>,
    basis_set: Option<&str>,
    connective: Option<&str>,
) -> Result<Query, QueryError> {
    let mut symbols = BTreeSet::new();
    for raw in raw_elements {
        let raw = raw.as_ref().trim();
        if raw.is_empty() {
            continue;
        }
        let symbol = elements::canonical_symbol(raw).ok_or_else(|| QueryError::UnknownElement(raw.to_string()))?;
        symbols.insert(symbol.to_string());
    }
    let connective = connective.map(str::parse).transpose()?.unwrap_or_default();
    Ok(Query::new(symbols, mode)?
        .with_clause(AttributeKind::Method, clause_value(method))
        .with_clause(AttributeKind::JobType, clause_value(job_type))
        .with_clause(AttributeKind::BasisSet, clause_value(basis_set))
        .with_connective(connective))
}

impl Query {
    /// `elements` must already be canonical symbols.
    pub fn new(elements: BTreeSet<String>, element_mode: ElementMode) -> Result<Self, QueryError> {
        if elements.is_empty() {
            return Err(QueryError::EmptyElements);
        }
        if let Some(bad) = elements.iter().find(|e| elements::atomic_number(e).is_none()) {
            return Err(QueryError::UnknownElement(bad.clone()));
        }
        Ok(Query {
            elements,
            element_mode,
            method_clause: None,
            job_clause: None,
            basis_clause: None,
            connective: Connective::And,
            refinements: Vec::new(),
        })
    }

    pub fn with_clause(mut self, kind: AttributeKind, clause: Option<String>) -> Self {
        *match kind {
            AttributeKind::Method => &mut self.method_clause,
            AttributeKind::JobType => &mut self.job_clause,
            AttributeKind::BasisSet => &mut self.basis_clause,
        } = clause;
        self
    }

    pub fn with_connective(mut self, connective: Connective) -> Self {
        self.connective = connective;
        self
    }

    pub fn with_element_mode(mut self, mode: ElementMode) -> Self {
        self.element_mode = mode;
        self
    }

    pub fn elements(&self) -> &BTreeSet<String> {
        &self.elements
    }

    pub fn element_mode(&self) -> ElementMode {
        self.element_mode
    }

    pub fn clause(&self, kind: AttributeKind) -> Option<&str> {
        match kind {
            AttributeKind::Method => self.method_clause.as_deref(),
            AttributeKind::JobType => self.job_clause.as_deref(),
            AttributeKind::BasisSet => self.basis_clause.as_deref(),
        }
    }

    pub fn connective(&self) -> Connective {
        self.connective
    }

    pub fn refinements(&self) -> &[Refinement] {
        &self.refinements
    }

    /// Adds a facet refinement; adding the same pair twice is a no-op.
    pub fn refine(&self, field: &str, value: &str) -> Result<Query, QueryError> {
        let kind: AttributeKind = field.parse().map_err(|_| QueryError::InvalidField(field.to_string()))?;
        Ok(self.refine_kind(kind, value))
    }

    pub fn refine_kind(&self, field: AttributeKind, value: &str) -> Query {
        let mut q = self.clone();
        let r = Refinement {
            field,
            value: value.to_string(),
        };
        if !q.refinements.contains(&r) {
            q.refinements.push(r);
        }
        q
    }

    /// The query with all refinements dropped (the "All Results" link).
    pub fn without_refinements(&self) -> Query {
        Query {
            refinements: Vec::new(),
            ..self.clone()
        }
    }

    /// Attribute clauses that constrain anything, with their expanded tokens.
    pub fn expanded_clauses(&self, taxonomy: &Taxonomy) -> Vec<(AttributeKind, BTreeSet<String>)> {
        AttributeKind::ALL
            .into_iter()
            .filter_map(|kind| {
                let clause = self.clause(kind)?;
                let tokens = taxonomy.expand(kind, clause);
                (!tokens.is_empty()).then_some((kind, tokens))
            })
            .collect()
    }

    /// Does `record` satisfy this query?
    ///
    /// Elements always apply. The connective combines only the attribute
    /// clauses, and refinements are ANDed on top of everything.
    pub fn matches(&self, record: &GaussianRecord, taxonomy: &Taxonomy) -> bool {
        let elements_ok = match self.element_mode {
            ElementMode::Exact => record.elements == self.elements,
            ElementMode::Contains => self.elements.is_subset(&record.elements),
        };
        if !elements_ok {
            return false;
        }

        let clause_hits: Vec<bool> = self
            .expanded_clauses(taxonomy)
            .into_iter()
            .map(|(kind, wanted)| {
                record
                    .tokens(kind)
                    .iter()
                    .flat_map(|t| taxonomy.match_terms(kind, t))
                    .any(|term| wanted.contains(&term))
            })
            .collect();
        let attrs_ok = clause_hits.is_empty()
            || match self.connective {
                Connective::And => clause_hits.iter().all(|&b| b),
                Connective::Or => clause_hits.iter().any(|&b| b),
            };
        if !attrs_ok {
            return false;
        }

        self.refinements.iter().all(|r| {
            record
                .tokens(r.field)
                .iter()
                .any(|t| taxonomy.categorize_token(r.field, t) == r.value)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(elements: &[&str], methods: &[&str], jobs: &[&str]) -> GaussianRecord {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<BTreeSet<_>>();
        GaussianRecord {
            id: 1,
            title: "t".into(),
            file_path: "t.log".into(),
            elements: s(elements),
            atom_sites: Vec::new(),
            methods: s(methods),
            basis_sets: s(&["6-31g(d)"]),
            job_types: s(jobs),
            charge: None,
            multiplicity: None,
            energy: None,
            degrees_of_freedom: None,
            flags: BTreeSet::new(),
            missing: BTreeSet::new(),
        }
    }

    fn q(elements: &[&str], mode: ElementMode) -> Query {
        build_query(elements, mode, None, None, None, None).unwrap()
    }

    #[test]
    fn exact_versus_contains() {
        let tax = Taxonomy::default_config();
        let exact = q(&["O", "H"], ElementMode::Exact);
        assert!(exact.matches(&rec(&["H", "O"], &[], &["sp"]), &tax));
        assert!(!exact.matches(&rec(&["C", "H", "O"], &[], &["sp"]), &tax));
        let contains = exact.clone().with_element_mode(ElementMode::Contains);
        assert!(contains.matches(&rec(&["C", "H", "O"], &[], &["sp"]), &tax));
        assert!(!contains.matches(&rec(&["H"], &[], &["sp"]), &tax));
    }

    #[test]
    fn hartree_fock_or_freq() {
        let tax = Taxonomy::default_config();
        let record = rec(&["C", "H"], &["rhf"], &["opt"]);
        let or = build_query(
            &["C"],
            ElementMode::Contains,
            Some("Hartree-Fock"),
            Some("Freq"),
            None,
            Some("or"),
        )
        .unwrap();
        assert!(or.matches(&record, &tax));
        let and = or.clone().with_connective(Connective::And);
        assert!(!and.matches(&record, &tax));
    }

    // Truth table over every (method hit, job hit, basis hit) combination and
    // both connectives, compared with plain boolean algebra.
    #[test]
    fn connective_truth_table() {
        let tax = Taxonomy::default_config();
        let query = build_query(
            &["C"],
            ElementMode::Contains,
            Some("DFT Methods"),
            Some("Opt"),
            Some("gen"),
            None,
        )
        .unwrap();
        for bits in 0u8..8 {
            let (m, j, b) = (bits & 1 != 0, bits & 2 != 0, bits & 4 != 0);
            let mut r = rec(
                &["C"],
                &[if m { "b3lyp" } else { "mp2" }],
                &[if j { "opt" } else { "freq" }],
            );
            r.basis_sets = [if b { "gen" } else { "sto-3g" }.to_string()].into();
            assert_eq!(query.matches(&r, &tax), m && j && b, "and {bits:03b}");
            let or = query.clone().with_connective(Connective::Or);
            assert_eq!(or.matches(&r, &tax), m || j || b, "or {bits:03b}");
        }
    }

    #[test]
    fn no_clauses_means_elements_only() {
        let tax = Taxonomy::default_config();
        let or = q(&["C"], ElementMode::Contains).with_connective(Connective::Or);
        assert!(or.matches(&rec(&["C"], &[], &["sp"]), &tax));
    }

    #[test]
    fn free_text_clause_and_job_options() {
        let tax = Taxonomy::default_config();
        let r = rec(&["C"], &["b3lyp"], &["opt=(calcfc,ts)"]);
        let query = build_query(&["c"], ElementMode::Contains, Some("B3LYP"), Some("Opt"), None, None).unwrap();
        assert!(query.matches(&r, &tax));
        assert!(query.refine("job_type", "Opt").unwrap().matches(&r, &tax));
    }

    #[test]
    fn refinement_semantics() {
        let tax = Taxonomy::default_config();
        let base = q(&["C"], ElementMode::Contains);
        let dft = base.refine("method", "DFT Methods").unwrap();
        assert!(dft.matches(&rec(&["C"], &["b3lyp"], &["sp"]), &tax));
        assert!(!dft.matches(&rec(&["C"], &["rhf"], &["sp"]), &tax));
        // raw, uncategorized values refine by the token itself
        let raw = base.refine("method", "xyz123").unwrap();
        assert!(raw.matches(&rec(&["C"], &["xyz123"], &["sp"]), &tax));

        assert_eq!(dft.refine("method", "DFT Methods").unwrap(), dft);
        assert_eq!(
            base.refine("energy", "x"),
            Err(QueryError::InvalidField("energy".into()))
        );
        assert_eq!(dft.without_refinements(), base);
    }

    #[test]
    fn refinement_applies_under_or() {
        let tax = Taxonomy::default_config();
        let query = build_query(
            &["C"],
            ElementMode::Contains,
            Some("Hartree-Fock"),
            Some("Opt"),
            None,
            Some("OR"),
        )
        .unwrap()
        .refine_kind(AttributeKind::JobType, "Freq");
        assert!(!query.matches(&rec(&["C"], &["rhf"], &["opt"]), &tax));
        assert!(query.matches(&rec(&["C"], &["rhf"], &["freq"]), &tax));
    }

    #[test]
    fn build_query_examples() {
        let empty: [&str; 0] = [];
        assert_eq!(
            build_query(&empty, ElementMode::Contains, None, None, None, None),
            Err(QueryError::EmptyElements)
        );
        assert_eq!(
            build_query(&["", " "], ElementMode::Contains, None, None, None, None),
            Err(QueryError::EmptyElements)
        );
        let query = build_query(
            &["o", "H"],
            ElementMode::Contains,
            Some("Any"),
            Some("Opt"),
            Some(""),
            Some("and"),
        )
        .unwrap();
        assert_eq!(query.elements(), &BTreeSet::from(["H".to_string(), "O".to_string()]));
        assert_eq!(query.element_mode(), ElementMode::Contains);
        assert_eq!(query.clause(AttributeKind::Method), None);
        assert_eq!(query.clause(AttributeKind::JobType), Some("Opt"));
        assert_eq!(query.clause(AttributeKind::BasisSet), None);
        assert_eq!(query.connective(), Connective::And);
        assert_eq!(
            build_query(&["Xx"], ElementMode::Contains, None, None, None, None),
            Err(QueryError::UnknownElement("Xx".into()))
        );
        assert_eq!(
            build_query(&["H"], ElementMode::Contains, None, None, None, Some("xor")),
            Err(QueryError::InvalidConnective("xor".into()))
        );
    }

    #[test]
    fn mode_and_connective_parsing() {
        assert_eq!("EXACT".parse::<ElementMode>(), Ok(ElementMode::Exact));
        assert!("fuzzy".parse::<ElementMode>().is_err());
        assert_eq!("Or".parse::<Connective>(), Ok(Connective::Or));
    }
}
