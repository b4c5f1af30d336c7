use std::fs;
use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

use serde_json::Value;

fn logs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/logs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gausseer"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn ingest(dir: &Path) -> (PathBuf, Value) {
    let index = dir.join("idx.gxsi");
    let out = run(&[
        "ingest",
        logs_dir().to_str().unwrap(),
        "--index",
        index.to_str().unwrap(),
    ]);
    (index, json(&out))
}

#[test]
fn ingest_reports_counts_and_writes_xml() {
    let tmp = tempfile::tempdir().unwrap();
    let (index, report) = ingest(tmp.path());
    assert_eq!(report["total_files"], 13);
    assert_eq!(report["indexed"], 12);
    assert_eq!(report["failed"][0]["error"], "NoRouteSection");
    assert!(report["missing_attribute_tally"]["energy"].as_u64().unwrap() >= 1);
    let xml = tmp.path().join("idx.gxsi.xml");
    assert_eq!(fs::read_dir(&xml).unwrap().count(), 12);
    assert!(fs::read_to_string(xml.join("000001.xml"))
        .unwrap()
        .starts_with("<doc>\n"));
    assert!(index.is_file());
}

#[test]
fn ext_and_xml_out_options() {
    let tmp = tempfile::tempdir().unwrap();
    let index = tmp.path().join("i");
    let xml = tmp.path().join("records");
    let out = run(&[
        "ingest",
        logs_dir().to_str().unwrap(),
        "--index",
        index.to_str().unwrap(),
        "--ext",
        ".OUT",
        "--xml-out",
        xml.to_str().unwrap(),
    ]);
    let report = json(&out);
    assert_eq!(report["total_files"], 1);
    assert_eq!(report["indexed"], 1);
    assert!(xml.join("000001.xml").is_file());
}

#[test]
fn custom_taxonomy_is_used_and_bad_one_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let tax = tmp.path().join("tax.tsv");
    fs::write(&tax, "method\tMy Methods\tb3lyp,mp2\njob_type\tOpt\topt\n").unwrap();
    let index = tmp.path().join("i");
    let logs = logs_dir();
    let ingest = |tax: &Path| {
        run(&[
            "ingest",
            logs.to_str().unwrap(),
            "--index",
            index.to_str().unwrap(),
            "--taxonomy",
            tax.to_str().unwrap(),
        ])
    };
    json(&ingest(&tax));
    let out = run(&[
        "search",
        "--index",
        index.to_str().unwrap(),
        "--elements",
        "H",
        "--method",
        "My Methods",
    ]);
    assert!(json(&out)["total"].as_u64().unwrap() >= 3);

    let bad = tmp.path().join("bad.tsv");
    fs::write(&bad, "nonsense line\n").unwrap();
    assert_eq!(ingest(&bad).status.code(), Some(2));
}

#[test]
fn search_flags_and_doc_lookup() {
    let tmp = tempfile::tempdir().unwrap();
    let (index, _) = ingest(tmp.path());
    let idx = index.to_str().unwrap();
    let exact = json(&run(&[
        "search",
        "--index",
        idx,
        "--elements",
        "O,H",
        "--mode",
        "exact",
    ]));
    assert_eq!(exact["total"], 4);
    let refined = json(&run(&[
        "search",
        "--index",
        idx,
        "--elements",
        "O,H",
        "--mode",
        "exact",
        "--refine",
        "job_type:Freq",
    ]));
    let advertised = exact["facets"]["job_type"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["value"] == "Freq")
        .unwrap()["count"]
        .clone();
    assert_eq!(refined["total"], advertised);

    let id = exact["results"][0]["id"].as_u64().unwrap().to_string();
    let doc = json(&run(&["search", "--index", idx, "--doc", &id]));
    assert_eq!(doc["elements"], serde_json::json!(["H", "O"]));
    assert!(doc["atom_sites"].as_array().unwrap().len() >= 3);

    assert_eq!(run(&["search", "--index", idx, "--doc", "999"]).status.code(), Some(1));
}

#[test]
fn error_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let (index, _) = ingest(tmp.path());
    let idx = index.to_str().unwrap();
    let out = run(&["search", "--index", idx, "--elements", "Xx"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UnknownElement"));
    assert_eq!(
        run(&["search", "--index", idx, "--elements", "H", "--op", "xor"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["search", "--index", idx]).status.code(), Some(2));
    assert_eq!(
        run(&["search", "--index", "/nonexistent/idx", "--elements", "H"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["ingest", "/nonexistent/dir", "--index", idx]).status.code(),
        Some(1)
    );
}

fn http_get(port: u16, path: &str) -> Option<String> {
    let mut stream = TcpStream::connect(("127.0.0.1", port)).ok()?;
    write!(
        stream,
        "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n"
    )
    .ok()?;
    let mut buf = String::new();
    stream.read_to_string(&mut buf).ok()?;
    Some(buf)
}

#[test]
fn serve_answers_http() {
    let tmp = tempfile::tempdir().unwrap();
    let (index, _) = ingest(tmp.path());
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_gausseer"))
        .args(["serve", "--index", index.to_str().unwrap(), "--port", &port.to_string()])
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(20);
    let health = loop {
        if let Some(resp) = http_get(port, "/healthz") {
            break resp;
        }
        assert!(Instant::now() < deadline, "server did not start");
        sleep(Duration::from_millis(50));
    };
    let search = http_get(port, "/api/search?elements=O,H&mode=exact").unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(health.starts_with("HTTP/1.1 200") && health.ends_with("ok"));
    assert!(search.contains("\"total\":4"));
}
