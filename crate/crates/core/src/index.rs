//! Inverted index over [`GaussianRecord`]s with facet counting.
//!
//! Results are always ascending by external id; there is no relevance score.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gparse::GaussianRecord;
use crate::postings;
use crate::query::{ElementMode, Query};
use crate::taxonomy::{AttributeKind, Taxonomy};

pub type DocId = u64;
pub type PostingMap = BTreeMap<String, Vec<DocId>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("duplicate document id {0}")]
    DuplicateId(DocId),
    #[error("no document with id {0}")]
    NotFound(DocId),
}

/// Posting lists for each indexed field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Postings {
    pub element: PostingMap,
    pub method_token: PostingMap,
    pub job_token: PostingMap,
    pub basis_token: PostingMap,
    pub method_cat: PostingMap,
    pub job_cat: PostingMap,
    pub basis_cat: PostingMap,
}

impl Postings {
    pub fn tokens(&self, kind: AttributeKind) -> &PostingMap {
        match kind {
            AttributeKind::JobType => &self.job_token,
            AttributeKind::Method => &self.method_token,
            AttributeKind::BasisSet => &self.basis_token,
        }
    }

    pub fn categories(&self, kind: AttributeKind) -> &PostingMap {
        match kind {
            AttributeKind::JobType => &self.job_cat,
            AttributeKind::Method => &self.method_cat,
            AttributeKind::BasisSet => &self.basis_cat,
        }
    }

    fn tokens_mut(&mut self, kind: AttributeKind) -> &mut PostingMap {
        match kind {
            AttributeKind::JobType => &mut self.job_token,
            AttributeKind::Method => &mut self.method_token,
            AttributeKind::BasisSet => &mut self.basis_token,
        }
    }

    fn categories_mut(&mut self, kind: AttributeKind) -> &mut PostingMap {
        match kind {
            AttributeKind::JobType => &mut self.job_cat,
            AttributeKind::Method => &mut self.method_cat,
            AttributeKind::BasisSet => &mut self.basis_cat,
        }
    }

    pub fn all(&self) -> [&PostingMap; 7] {
        [
            &self.element,
            &self.method_token,
            &self.job_token,
            &self.basis_token,
            &self.method_cat,
            &self.job_cat,
            &self.basis_cat,
        ]
    }
}

/// One facet link: attribute, value and how many current results carry it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetCount {
    pub field: AttributeKind,
    pub value: String,
    pub count: usize,
}

/// Key of the exact-element-set lookup, e.g. `"H|O"`.
pub fn element_signature<'a>(elements: impl IntoIterator<Item = &'a String>) -> String {
    let sorted: BTreeSet<&str> = elements.into_iter().map(String::as_str).collect();
    sorted.into_iter().collect::<Vec<_>>().join("|")
}

/// Immutable document store plus postings. Build a new one to change it.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexSnapshot {
    pub(crate) docs: BTreeMap<DocId, GaussianRecord>,
    pub(crate) postings: Postings,
    pub(crate) element_signature: PostingMap,
    pub(crate) taxonomy: Taxonomy,
}

fn push_id(map: &mut PostingMap, term: String, id: DocId) {
    let list = map.entry(term).or_default();
    // records are visited in id order, so pushing keeps lists ascending
    if list.last() != Some(&id) {
        list.push(id);
    }
}

impl IndexSnapshot {
    /// Indexes `records` under `taxonomy`. Category postings are computed
    /// with this taxonomy, so it travels with the snapshot.
    pub fn build(records: Vec<GaussianRecord>, taxonomy: Taxonomy) -> Result<Self, IndexError> {
        let mut docs = BTreeMap::new();
        for record in records {
            let id = record.id;
            if docs.insert(id, record).is_some() {
                return Err(IndexError::DuplicateId(id));
            }
        }

        let mut postings = Postings::default();
        let mut element_signature = PostingMap::new();
        for (&id, record) in &docs {
            for element in &record.elements {
                push_id(&mut postings.element, element.clone(), id);
            }
            if !record.elements.is_empty() {
                push_id(&mut element_signature, self::element_signature(&record.elements), id);
            }
            for kind in AttributeKind::ALL {
                for token in record.tokens(kind) {
                    for term in taxonomy.match_terms(kind, token) {
                        push_id(postings.tokens_mut(kind), term, id);
                    }
                    let category = taxonomy.categorize_token(kind, token);
                    push_id(postings.categories_mut(kind), category, id);
                }
            }
        }

        Ok(IndexSnapshot {
            docs,
            postings,
            element_signature,
            taxonomy,
        })
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn postings(&self) -> &Postings {
        &self.postings
    }

    pub fn element_signatures(&self) -> &PostingMap {
        &self.element_signature
    }

    pub fn docs(&self) -> impl Iterator<Item = &GaussianRecord> {
        self.docs.values()
    }

    pub fn get_document(&self, id: DocId) -> Result<&GaussianRecord, IndexError> {
        self.docs.get(&id).ok_or(IndexError::NotFound(id))
    }

    fn list<'a>(map: &'a PostingMap, term: &str) -> &'a [DocId] {
        map.get(term).map_or(&[], Vec::as_slice)
    }

    /// Ids of every document matching `query`, ascending.
    pub fn search(&self, query: &Query) -> Vec<DocId> {
        let mut required: Vec<Vec<DocId>> = Vec::new();

        match query.element_mode() {
            ElementMode::Exact => {
                let key = element_signature(query.elements());
                required.push(Self::list(&self.element_signature, &key).to_vec());
            }
            ElementMode::Contains => {
                let lists: Vec<&[DocId]> = query
                    .elements()
                    .iter()
                    .map(|e| Self::list(&self.postings.element, e))
                    .collect();
                required.push(postings::intersect_all(&lists).unwrap_or_default());
            }
        }

        let clause_lists: Vec<Vec<DocId>> = query
            .expanded_clauses(&self.taxonomy)
            .into_iter()
            .map(|(kind, tokens)| {
                let lists: Vec<&[DocId]> = tokens
                    .iter()
                    .map(|t| Self::list(self.postings.tokens(kind), t))
                    .collect();
                postings::union_all(&lists)
            })
            .collect();
        if !clause_lists.is_empty() {
            required.push(match query.connective() {
                crate::query::Connective::And => postings::intersect_all(&clause_lists).unwrap_or_default(),
                crate::query::Connective::Or => postings::union_all(&clause_lists),
            });
        }

        for r in query.refinements() {
            required.push(Self::list(self.postings.categories(r.field), &r.value).to_vec());
        }

        postings::intersect_all(&required).unwrap_or_default()
    }

    /// Facet links for one field over a result set, most frequent first,
    /// ties by value.
    pub fn facet_counts(&self, result_ids: &[DocId], field: AttributeKind) -> Vec<FacetCount> {
        let sorted;
        let ids = if postings::is_strictly_ascending(result_ids) {
            result_ids
        } else {
            let mut v = result_ids.to_vec();
            v.sort_unstable();
            v.dedup();
            sorted = v;
            &sorted
        };
        let mut counts: Vec<FacetCount> = self
            .postings
            .categories(field)
            .iter()
            .filter_map(|(value, list)| {
                let count = postings::intersect_count(list, ids);
                (count > 0).then(|| FacetCount {
                    field,
                    value: value.clone(),
                    count,
                })
            })
            .collect();
        counts.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.value.cmp(&b.value)));
        counts
    }

    /// Facet listings for all three fields.
    pub fn all_facets(&self, result_ids: &[DocId]) -> BTreeMap<AttributeKind, Vec<FacetCount>> {
        AttributeKind::ALL
            .into_iter()
            .map(|kind| (kind, self.facet_counts(result_ids, kind)))
            .collect()
    }
}
