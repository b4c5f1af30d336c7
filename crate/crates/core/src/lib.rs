//! Faceted search over Gaussian quantum-chemistry output files.
//!
//! * [`gparse`] pulls a [`GaussianRecord`] out of a log file.
//! * [`taxonomy`] maps user-facing categories ("Hartree-Fock") to route
//!   tokens ("hf", "rhf", ...) and back.
//! * [`query`] holds the boolean query model and its reference evaluator.
//! * [`index`] answers queries from posting lists and counts facets;
//!   [`snapshot`] persists it.
//! * [`ingest`] turns a directory of logs into a saved index.

pub mod elements;
pub mod gparse;
pub mod index;
pub mod ingest;
pub mod postings;
pub mod query;
pub mod snapshot;
pub mod synth;
pub mod taxonomy;

pub use gparse::{parse_document, parse_route, AtomSite, GaussianRecord, ParseError, PresenceFlag};
pub use index::{DocId, FacetCount, IndexError, IndexSnapshot};
pub use ingest::{ingest_corpus, IngestError, IngestOptions, IngestReport};
pub use query::{build_query, Connective, ElementMode, Query, QueryError, Refinement};
pub use snapshot::SnapshotError;
pub use taxonomy::{AttributeKind, ConfigError, Taxonomy};
