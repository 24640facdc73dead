use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use annetto_core::testkit::mutation_suite;
use annetto_core::turtle::serialize_turtle;
use annetto_core::validator::RuleId;

fn annetto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annetto"))
        .args(args)
        .env_remove("ANNETTO_PREFIX")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn examples() -> (tempfile::TempDir, PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("examples");
    let out = annetto(&["examples", p(&dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (tmp, dir)
}

#[test]
fn examples_validate_with_empty_output() {
    let (_tmp, dir) = examples();
    for name in ["simple.ttl", "gan.ttl", "aae.ttl"] {
        let out = annetto(&["validate", p(&dir.join(name))]);
        assert_eq!(code(&out), 0, "{name}");
        assert!(out.stdout.is_empty(), "{name}");
    }
    for name in ["q1.rq", "q1_prose.rq", "q2.rq", "q3.rq", "q4.rq"] {
        assert!(dir.join(name).is_file(), "{name}");
    }
}

#[test]
fn examples_are_byte_identical_across_runs() {
    let (_a, first) = examples();
    let (_b, second) = examples();
    let mut names: Vec<_> = fs::read_dir(&first).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 8);
    for name in names {
        assert_eq!(fs::read(first.join(&name)).unwrap(), fs::read(second.join(&name)).unwrap());
    }
}

#[test]
fn mutated_gan_reports_one_r6_line() {
    let tmp = tempfile::tempdir().unwrap();
    let m = mutation_suite().into_iter().find(|m| m.rule == RuleId::R6).unwrap();
    let path = tmp.path().join("gan_mutated.ttl");
    fs::write(&path, serialize_turtle(m.kb.graph(), m.kb.graph().prefixes())).unwrap();
    let out = annetto(&["validate", p(&path)]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "{text}");
    let fields: Vec<&str> = lines[0].split('\t').collect();
    assert_eq!(fields[0], "R6");
    assert_eq!(fields.len(), 3);

    let out = annetto(&["validate", "--format", "json", p(&path)]);
    assert_eq!(code(&out), 1);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["valid"], false);
    assert_eq!(doc["violations"][0]["rule"], "R6");
    assert!(doc["violations"][0]["subject"].as_str().unwrap().starts_with("http://"));
}

#[test]
fn query_four_csv_and_json() {
    let (_tmp, dir) = examples();
    let out = annetto(&["query", p(&dir.join("aae.ttl")), "--query", p(&dir.join("q4.rq"))]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "configuration,evaluation_score\r\n:AAE,0.68\r\n");

    let out = annetto(&[
        "query",
        p(&dir.join("aae.ttl")),
        "--query",
        p(&dir.join("q4.rq")),
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["vars"], serde_json::json!(["configuration", "evaluation_score"]));
    assert_eq!(doc["rows"][0][0]["type"], "iri");
    assert_eq!(doc["rows"][0][0]["value"], "http://w3id.org/annett-o/AAE");
    assert_eq!(doc["rows"][0][1]["value"], "0.68");
}

#[test]
fn query_on_empty_kb_prints_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let kb = tmp.path().join("empty.ttl");
    let q = tmp.path().join("q.rq");
    fs::write(&kb, "").unwrap();
    fs::write(&q, "select ?x where { ?x a :Network }").unwrap();
    let out = annetto(&["query", p(&kb), "--query", p(&q)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "x\r\n");
}

#[test]
fn parse_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let kb = tmp.path().join("kb.ttl");
    fs::write(&kb, ":a :p :b .").unwrap();
    let construct = tmp.path().join("c.rq");
    fs::write(&construct, "CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?o }").unwrap();
    let out = annetto(&["query", p(&kb), "--query", p(&construct)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));

    let broken = tmp.path().join("b.rq");
    fs::write(&broken, "select ?x where {\n  ?x a }").unwrap();
    let out = annetto(&["query", p(&kb), "--query", p(&broken)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let bad_ttl = tmp.path().join("bad.ttl");
    fs::write(&bad_ttl, ":a :p :b\n:c :d :e .").unwrap();
    let out = annetto(&["validate", p(&bad_ttl)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(code(&annetto(&["validate"])), 2);
    assert_eq!(code(&annetto(&["frobnicate"])), 2);
}

#[test]
fn io_errors_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing.ttl");
    assert_eq!(code(&annetto(&["validate", p(&missing)])), 3);
    assert_eq!(code(&annetto(&["describe", p(&missing), ":x"])), 3);
    let q = tmp.path().join("q.rq");
    fs::write(&q, "select ?x where { ?x a :Network }").unwrap();
    assert_eq!(code(&annetto(&["query", p(&missing), "--query", p(&q)])), 3);

    let file = tmp.path().join("plain");
    fs::write(&file, "").unwrap();
    assert_eq!(code(&annetto(&["examples", p(&file.join("sub"))])), 3);
}

#[test]
fn describe_lists_types_and_statements() {
    let (_tmp, dir) = examples();
    let gan = dir.join("gan.ttl");
    let out = annetto(&["describe", p(&gan), ":GAN"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains(":GAN a :ANNConfiguration ."));
    assert_eq!(text.matches(":hasNetwork").count(), 3);
    assert_eq!(stdout(&annetto(&["describe", p(&gan), ":GAN"])), text);

    let out = annetto(&["describe", p(&gan), "<http://w3id.org/annett-o/nothing>"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("no statements"));
}

#[test]
fn instance_prefix_override() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("ex");
    let out = Command::new(env!("CARGO_BIN_EXE_annetto"))
        .args(["examples", p(&dir)])
        .env("ANNETTO_PREFIX", "http://example.org/kb/")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.join("gan.ttl")).unwrap();
    assert!(text.contains("@prefix : <http://example.org/kb/> ."));
    assert_eq!(code(&annetto(&["validate", p(&dir.join("gan.ttl"))])), 0);
    let out = annetto(&["query", p(&dir.join("aae.ttl")), "--query", p(&dir.join("q4.rq"))]);
    assert_eq!(stdout(&out), "configuration,evaluation_score\r\n:AAE,0.68\r\n");

    let out = Command::new(env!("CARGO_BIN_EXE_annetto"))
        .args(["examples", p(&tmp.path().join("x"))])
        .env("ANNETTO_PREFIX", "not an iri")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
