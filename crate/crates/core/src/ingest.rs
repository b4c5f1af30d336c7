//! Corpus ingestion: scan, parse, number, export XML, index, save.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::gparse::{parse_bytes, GaussianRecord, ParseError};
use crate::index::IndexSnapshot;
use crate::snapshot::SnapshotError;
use crate::taxonomy::Taxonomy;

pub const DEFAULT_EXTENSIONS: [&str; 2] = ["log", "out"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedFile {
    pub path: String,
    pub error: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub total_files: usize,
    pub indexed: usize,
    pub failed: Vec<FailedFile>,
    pub missing_attribute_tally: BTreeMap<String, usize>,
}

#[derive(Clone, Debug)]
pub struct IngestOptions {
    /// Lowercase extensions without the dot.
    pub extensions: Vec<String>,
    /// Where per-document XML goes; defaults to `<index>.xml/`.
    pub xml_out: Option<PathBuf>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            extensions: DEFAULT_EXTENSIONS.iter().map(|s| s.to_string()).collect(),
            xml_out: None,
        }
    }
}

pub fn default_xml_dir(index_path: &Path) -> PathBuf {
    let mut name = index_path.file_name().unwrap_or_default().to_os_string();
    name.push(".xml");
    index_path.with_file_name(name)
}

/// Matching files under `root`, sorted by path.
pub fn collect_files(root: &Path, extensions: &[String]) -> Result<Vec<PathBuf>, IngestError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(root) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            IngestError::Io { path, source: e.into() }
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let ext = entry.path().extension().map(|e| e.to_string_lossy().to_lowercase());
        if ext.is_some_and(|e| extensions.contains(&e)) {
            files.push(entry.into_path());
        }
    }
    files.sort();
    Ok(files)
}

/// Parses every file and numbers the successes `1..=N` in path order.
pub fn parse_corpus(
    files: &[PathBuf],
    taxonomy: &Taxonomy,
) -> Result<(Vec<GaussianRecord>, Vec<FailedFile>), IngestError> {
    let parsed: Vec<Result<GaussianRecord, ParseError>> = files
        .par_iter()
        .map(|path| {
            let bytes = fs::read(path).map_err(io_err(path))?;
            Ok(parse_bytes(&bytes, &path.to_string_lossy(), taxonomy))
        })
        .collect::<Result<_, IngestError>>()?;

    let mut records = Vec::new();
    let mut failed = Vec::new();
    for (path, result) in files.iter().zip(parsed) {
        match result {
            Ok(mut record) => {
                record.id = records.len() as u64 + 1;
                records.push(record);
            }
            Err(e) => failed.push(FailedFile {
                path: path.to_string_lossy().into_owned(),
                error: e.kind().to_string(),
            }),
        }
    }
    Ok((records, failed))
}

/// Ingests `root` into a snapshot at `index_path`, writing one XML record per
/// indexed document.
pub fn ingest_corpus(
    root: &Path,
    taxonomy: &Taxonomy,
    index_path: &Path,
    options: &IngestOptions,
) -> Result<(IngestReport, IndexSnapshot), IngestError> {
    let files = collect_files(root, &options.extensions)?;
    let (records, failed) = parse_corpus(&files, taxonomy)?;

    let mut tally = BTreeMap::new();
    for record in &records {
        for name in &record.missing {
            *tally.entry(name.clone()).or_insert(0) += 1;
        }
    }

    let xml_dir = options.xml_out.clone().unwrap_or_else(|| default_xml_dir(index_path));
    fs::create_dir_all(&xml_dir).map_err(io_err(&xml_dir))?;
    for record in &records {
        let path = xml_dir.join(format!("{:06}.xml", record.id));
        fs::write(&path, emit_xml_record(record)).map_err(io_err(&path))?;
    }

    let report = IngestReport {
        total_files: files.len(),
        indexed: records.len(),
        failed,
        missing_attribute_tally: tally,
    };
    let snapshot = IndexSnapshot::build(records, taxonomy.clone()).expect("ids assigned sequentially are unique");
    snapshot.save(index_path)?;
    Ok((report, snapshot))
}

pub fn xml_escape(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// The XML-style ingestion record of one document.
///
/// ```text
/// <doc>
///   <field name="id">1</field>
///   <field name="element">H</field>
///   ...
/// </doc>
/// ```
///
/// Field order: id, title, file_path, element*, method*, basis_set*,
/// job_type*, charge, multiplicity, energy, degrees_of_freedom, flag*.
/// Absent scalars are omitted.
pub fn emit_xml_record(record: &GaussianRecord) -> String {
    let mut fields: Vec<(&str, String)> = vec![
        ("id", record.id.to_string()),
        ("title", record.title.clone()),
        ("file_path", record.file_path.clone()),
    ];
    fields.extend(record.elements.iter().map(|v| ("element", v.clone())));
    fields.extend(record.methods.iter().map(|v| ("method", v.clone())));
    fields.extend(record.basis_sets.iter().map(|v| ("basis_set", v.clone())));
    fields.extend(record.job_types.iter().map(|v| ("job_type", v.clone())));
    fields.extend(record.charge.map(|v| ("charge", v.to_string())));
    fields.extend(record.multiplicity.map(|v| ("multiplicity", v.to_string())));
    fields.extend(record.energy.map(|v| ("energy", v.to_string())));
    fields.extend(record.degrees_of_freedom.map(|v| ("degrees_of_freedom", v.to_string())));
    fields.extend(record.flags.iter().map(|f| ("flag", f.as_str().to_string())));

    let mut out = String::from("<doc>\n");
    for (name, value) in fields {
        out.push_str(&format!("  <field name=\"{name}\">{}</field>\n", xml_escape(&value)));
    }
    out.push_str("</doc>\n");
    out
}
