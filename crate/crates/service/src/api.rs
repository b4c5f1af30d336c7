//! Request parsing and response building, independent of the HTTP layer.

use std::collections::BTreeMap;

use gausseer_core::query::QueryError;
use gausseer_core::{AttributeKind, DocId, ElementMode, GaussianRecord, IndexSnapshot, Query, Taxonomy};
use serde::{Deserialize, Serialize};

/// Results per page. Not configurable.
pub const PAGE_SIZE: usize = 10;

/// A 4xx error with a stable code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: 400,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        ApiError {
            status: 404,
            code: "NotFound".to_string(),
            message: message.into(),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        ApiError::bad_request(e.code(), e.to_string())
    }
}

/// Parsed `/api/search` parameters, before validation against the element
/// table and taxonomy.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchParams {
    pub elements: Vec<String>,
    pub mode: Option<String>,
    pub method: Option<String>,
    pub jobtype: Option<String>,
    pub basis: Option<String>,
    pub op: Option<String>,
    /// Raw `field:value` strings.
    pub refine: Vec<String>,
    pub page: Option<String>,
}

impl SearchParams {
    /// From decoded query-string pairs; `refine` may repeat, later values of
    /// other keys win.
    pub fn from_pairs<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        let mut p = SearchParams::default();
        for (k, v) in pairs {
            let v: String = v.into();
            match k.as_ref() {
                "elements" => {
                    p.elements = v
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect()
                }
                "mode" => p.mode = Some(v),
                "method" => p.method = Some(v),
                "jobtype" => p.jobtype = Some(v),
                "basis" => p.basis = Some(v),
                "op" => p.op = Some(v),
                "refine" => p.refine.push(v),
                "page" => p.page = Some(v),
                _ => {}
            }
        }
        p
    }

    pub fn from_query_string(qs: &str) -> Self {
        Self::from_pairs(form_urlencoded::parse(qs.as_bytes()).into_owned())
    }

    /// Validated query and 1-based page number.
    pub fn to_query(&self) -> Result<(Query, usize), ApiError> {
        let mode: ElementMode = self.mode.as_deref().unwrap_or("contains").parse()?;
        let mut query = gausseer_core::build_query(
            &self.elements,
            mode,
            self.method.as_deref(),
            self.jobtype.as_deref(),
            self.basis.as_deref(),
            self.op.as_deref(),
        )?;
        for raw in &self.refine {
            let (field, value) = raw
                .split_once(':')
                .ok_or_else(|| QueryError::InvalidField(raw.clone()))?;
            query = query.refine(field, value)?;
        }
        let page = match self.page.as_deref().map(str::trim) {
            None | Some("") => 1,
            Some(raw) => raw.parse::<usize>().ok().filter(|p| *p >= 1).ok_or_else(|| {
                ApiError::bad_request("InvalidPage", format!("page must be a positive integer, got {raw:?}"))
            })?,
        };
        Ok((query, page))
    }
}

/// Query string reproducing `query` (page omitted, so links land on page 1).
pub fn query_string(query: &Query) -> String {
    let mut s = form_urlencoded::Serializer::new(String::new());
    let elements: Vec<&str> = query.elements().iter().map(String::as_str).collect();
    s.append_pair("elements", &elements.join(","));
    s.append_pair("mode", &query.element_mode().to_string());
    for (kind, key) in [
        (AttributeKind::Method, "method"),
        (AttributeKind::JobType, "jobtype"),
        (AttributeKind::BasisSet, "basis"),
    ] {
        if let Some(clause) = query.clause(kind) {
            s.append_pair(key, clause);
        }
    }
    s.append_pair("op", &query.connective().to_string());
    for r in query.refinements() {
        s.append_pair("refine", &format!("{}:{}", r.field, r.value));
    }
    s.finish()
}

pub fn search_link(query: &Query) -> String {
    format!("/api/search?{}", query_string(query))
}

/// Elements plus categorized attributes on one line.
pub fn summary(record: &GaussianRecord, taxonomy: &Taxonomy) -> String {
    let elements: Vec<&str> = record.elements.iter().map(String::as_str).collect();
    let mut parts = vec![if elements.is_empty() {
        "no geometry".to_string()
    } else {
        elements.join(" ")
    }];
    for (kind, label) in [
        (AttributeKind::Method, "method"),
        (AttributeKind::BasisSet, "basis"),
        (AttributeKind::JobType, "job"),
    ] {
        let tokens: Vec<String> = record
            .tokens(kind)
            .iter()
            .map(|t| {
                let cat = taxonomy.categorize_token(kind, t);
                if cat == *t {
                    t.clone()
                } else {
                    format!("{t} [{cat}]")
                }
            })
            .collect();
        if !tokens.is_empty() {
            parts.push(format!("{label}: {}", tokens.join(", ")));
        }
    }
    if let Some(e) = record.energy {
        parts.push(format!("E = {e} Eh"));
    }
    parts.join(" | ")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub id: DocId,
    pub title: String,
    pub summary: String,
    pub link: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetLink {
    pub value: String,
    pub count: usize,
    /// Search URL with this facet added as a refinement.
    pub link: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedRefinement {
    pub field: AttributeKind,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub total: usize,
    pub page: usize,
    pub page_size: usize,
    pub results: Vec<ResultEntry>,
    pub facets: BTreeMap<AttributeKind, Vec<FacetLink>>,
    pub applied_refinements: Vec<AppliedRefinement>,
    pub all_results_link: String,
}

/// Slice of `ids` shown on a 1-based page.
pub fn page_slice(ids: &[DocId], page: usize) -> &[DocId] {
    let start = (page - 1).saturating_mul(PAGE_SIZE).min(ids.len());
    let end = start.saturating_add(PAGE_SIZE).min(ids.len());
    &ids[start..end]
}

pub fn search_response(snapshot: &IndexSnapshot, query: &Query, page: usize) -> SearchResponse {
    let taxonomy = snapshot.taxonomy();
    let ids = snapshot.search(query);
    let results = page_slice(&ids, page)
        .iter()
        .map(|&id| {
            let r = snapshot.get_document(id).expect("search returns indexed ids");
            ResultEntry {
                id,
                title: r.title.clone(),
                summary: summary(r, taxonomy),
                link: format!("/api/doc/{id}"),
            }
        })
        .collect();
    let facets = snapshot
        .all_facets(&ids)
        .into_iter()
        .map(|(kind, counts)| {
            let links = counts
                .into_iter()
                .map(|f| FacetLink {
                    link: search_link(&query.refine_kind(kind, &f.value)),
                    value: f.value,
                    count: f.count,
                })
                .collect();
            (kind, links)
        })
        .collect();
    SearchResponse {
        total: ids.len(),
        page,
        page_size: PAGE_SIZE,
        results,
        facets,
        applied_refinements: query
            .refinements()
            .iter()
            .map(|r| AppliedRefinement {
                field: r.field,
                value: r.value.clone(),
            })
            .collect(),
        all_results_link: search_link(&query.without_refinements()),
    }
}

/// Body of `/api/doc/{id}`: the full record plus display extras.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DocDetail {
    #[serde(flatten)]
    pub record: GaussianRecord,
    pub summary: String,
    /// Path of the original log on the server's filesystem.
    pub source_path: String,
    pub categories: BTreeMap<AttributeKind, Vec<String>>,
}

pub fn doc_detail(snapshot: &IndexSnapshot, id: DocId) -> Result<DocDetail, ApiError> {
    let record = snapshot
        .get_document(id)
        .map_err(|e| ApiError::not_found(e.to_string()))?;
    let taxonomy = snapshot.taxonomy();
    let categories = AttributeKind::ALL
        .into_iter()
        .map(|kind| {
            let mut cats: Vec<String> = record
                .tokens(kind)
                .iter()
                .map(|t| taxonomy.categorize_token(kind, t))
                .collect();
            cats.sort();
            cats.dedup();
            (kind, cats)
        })
        .collect();
    Ok(DocDetail {
        summary: summary(record, taxonomy),
        source_path: record.file_path.clone(),
        categories,
        record: record.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindOptions {
    pub categories: Vec<String>,
    /// Drop-down entries: "Any" followed by the categories.
    pub options: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaResponse {
    pub doc_count: usize,
    pub snapshot_version: u64,
    pub format_version: u32,
    pub page_size: usize,
    pub taxonomy: BTreeMap<AttributeKind, KindOptions>,
}

pub fn meta_response(snapshot: &IndexSnapshot, snapshot_version: u64) -> MetaResponse {
    let taxonomy = AttributeKind::ALL
        .into_iter()
        .map(|kind| {
            let categories: Vec<String> = snapshot.taxonomy().categories(kind).map(str::to_string).collect();
            let options = std::iter::once(gausseer_core::taxonomy::ANY.to_string())
                .chain(categories.iter().cloned())
                .collect();
            (kind, KindOptions { categories, options })
        })
        .collect();
    MetaResponse {
        doc_count: snapshot.doc_count(),
        snapshot_version,
        format_version: gausseer_core::snapshot::FORMAT_VERSION,
        page_size: PAGE_SIZE,
        taxonomy,
    }
}
