use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use gausseer_core::ingest::{emit_xml_record, ingest_corpus, IngestOptions};
use gausseer_core::{IndexSnapshot, Taxonomy};

fn fixture_logs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/logs")
}

/// Schema-light reader for the XML records: field name -> values in order.
fn read_xml(text: &str) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("<doc>"));
    for line in lines {
        if line == "</doc>" {
            break;
        }
        let rest = line.strip_prefix("  <field name=\"").expect("field line");
        let (name, rest) = rest.split_once("\">").unwrap();
        let value = rest.strip_suffix("</field>").unwrap();
        let value = value
            .replace("&lt;", "<")
            .replace("&gt;", ">")
            .replace("&quot;", "\"")
            .replace("&apos;", "'")
            .replace("&amp;", "&");
        out.entry(name.to_string()).or_default().push(value);
    }
    out
}

fn copy(names: &[&str], dir: &Path) {
    for n in names {
        fs::copy(fixture_logs().join(n), dir.join(n)).unwrap();
    }
}

#[test]
fn five_logs_one_malformed() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    copy(
        &[
            "h2o_opt.log",
            "h2o_freq.log",
            "malformed.log",
            "benzene_nmr.log",
            "anomalous.log",
        ],
        &corpus,
    );
    let index = tmp.path().join("idx.gxsi");
    let (report, snap) =
        ingest_corpus(&corpus, &Taxonomy::default_config(), &index, &IngestOptions::default()).unwrap();
    assert_eq!((report.total_files, report.indexed, report.failed.len()), (5, 4, 1));
    assert!(report.failed[0].path.ends_with("malformed.log"));
    assert_eq!(report.failed[0].error, "NoRouteSection");
    assert_eq!(snap.doc_count(), 4);

    // ids follow lexicographic path order, skipping the failure
    let titles: Vec<(u64, String)> = snap.docs().map(|r| (r.id, r.file_path.clone())).collect();
    let names: Vec<&str> = titles.iter().map(|(_, p)| p.rsplit('/').next().unwrap()).collect();
    assert_eq!(
        names,
        ["anomalous.log", "benzene_nmr.log", "h2o_freq.log", "h2o_opt.log"]
    );
    assert_eq!(titles.iter().map(|t| t.0).collect::<Vec<_>>(), [1, 2, 3, 4]);

    // tally equals the sum of missing sets
    let mut expected: BTreeMap<String, usize> = BTreeMap::new();
    for r in snap.docs() {
        for m in &r.missing {
            *expected.entry(m.clone()).or_default() += 1;
        }
    }
    assert_eq!(report.missing_attribute_tally, expected);

    let loaded = IndexSnapshot::load(&index).unwrap();
    assert_eq!(loaded, snap);
    let xml_dir = tmp.path().join("idx.gxsi.xml");
    assert_eq!(fs::read_dir(&xml_dir).unwrap().count(), 4);
}

#[test]
fn empty_dir_gives_empty_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("empty");
    fs::create_dir(&corpus).unwrap();
    let index = tmp.path().join("idx.gxsi");
    let (report, _) = ingest_corpus(&corpus, &Taxonomy::default_config(), &index, &IngestOptions::default()).unwrap();
    assert_eq!((report.total_files, report.indexed, report.failed.len()), (0, 0, 0));
    assert_eq!(IndexSnapshot::load(&index).unwrap().doc_count(), 0);
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let tax = Taxonomy::default_config();
    let a = tmp.path().join("a.gxsi");
    let b = tmp.path().join("b.gxsi");
    let (ra, _) = ingest_corpus(&fixture_logs(), &tax, &a, &IngestOptions::default()).unwrap();
    let (rb, _) = ingest_corpus(&fixture_logs(), &tax, &b, &IngestOptions::default()).unwrap();
    assert_eq!(ra, rb);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn extension_filter_and_custom_xml_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let opts = IngestOptions {
        extensions: vec!["out".into()],
        xml_out: Some(tmp.path().join("xml")),
    };
    let (report, snap) = ingest_corpus(
        &fixture_logs(),
        &Taxonomy::default_config(),
        &tmp.path().join("i"),
        &opts,
    )
    .unwrap();
    assert_eq!(report.total_files, 1);
    let doc = snap.get_document(1).unwrap();
    let xml = fs::read_to_string(tmp.path().join("xml/000001.xml")).unwrap();
    assert!(xml.contains("<field name=\"title\">CH3Cl &lt;PM3&gt; &amp; &quot;quick&quot; check</field>"));
    assert_eq!(xml, emit_xml_record(doc));
}

#[test]
fn xml_records_reparse_to_indexed_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let (_, snap) = ingest_corpus(
        &fixture_logs(),
        &Taxonomy::default_config(),
        &tmp.path().join("i"),
        &IngestOptions::default(),
    )
    .unwrap();
    for r in snap.docs() {
        let fields = read_xml(&emit_xml_record(r));
        let one = |k: &str| fields.get(k).map(|v| v[0].clone());
        let many = |k: &str| fields.get(k).cloned().unwrap_or_default();
        assert_eq!(one("id"), Some(r.id.to_string()));
        assert_eq!(one("title"), Some(r.title.clone()));
        assert_eq!(one("file_path"), Some(r.file_path.clone()));
        assert_eq!(many("element"), r.elements.iter().cloned().collect::<Vec<_>>());
        assert_eq!(many("method"), r.methods.iter().cloned().collect::<Vec<_>>());
        assert_eq!(many("basis_set"), r.basis_sets.iter().cloned().collect::<Vec<_>>());
        assert_eq!(many("job_type"), r.job_types.iter().cloned().collect::<Vec<_>>());
        assert_eq!(one("charge").map(|c| c.parse().unwrap()), r.charge);
        assert_eq!(one("multiplicity").map(|c| c.parse().unwrap()), r.multiplicity);
        assert_eq!(one("energy").map(|c| c.parse::<f64>().unwrap()), r.energy);
        assert_eq!(
            one("degrees_of_freedom").map(|c| c.parse().unwrap()),
            r.degrees_of_freedom
        );
        assert_eq!(
            many("flag"),
            r.flags.iter().map(|f| f.as_str().to_string()).collect::<Vec<_>>()
        );
    }
}
