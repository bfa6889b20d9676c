use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use evstruct::enumeration::{enumerate_event_structures, Limits};
use evstruct::{build_representation, es_to_fullgraph, EventStructure};
use evstruct_cli::doc::{CountMethod, ShardInfo};
use evstruct_cli::{CountKind, CountReport, CountRow, Document};
use rand::rngs::StdRng;
use rand::seq::IteratorRandom;
use rand::SeedableRng;
use serde_json::Value;
use tempfile::TempDir;

fn evstruct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evstruct"))
        .args(args)
        .env_remove("EVSTRUCT_MAX_N")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn all_es(n: usize) -> Vec<EventStructure> {
    enumerate_event_structures(n, &Limits::default()).unwrap().collect()
}

#[test]
fn documents_round_trip() {
    for n in 0..=4 {
        for es in all_es(n) {
            let doc = Document::from_es(&es);
            let back = Document::parse(&doc.to_json()).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.es().unwrap(), es);

            let fg = es_to_fullgraph(&es).unwrap();
            let doc = Document::from_fullgraph(&fg);
            assert_eq!(Document::parse(&doc.to_json()).unwrap().fullgraph().unwrap(), fg);

            let f = build_representation(&es).unwrap();
            let doc = Document::from_rep(&f);
            assert_eq!(Document::parse(&doc.to_json_line()).unwrap().rep().unwrap(), f);
        }
    }
    let report = Document::CountReport(CountReport {
        n: 2,
        count_kind: CountKind::Es,
        method: CountMethod::Engine,
        shard: Some(ShardInfo { index: 1, count: 3 }),
        rows: vec![
            CountRow { n: 0, count: 1, log2_ratio: None },
            CountRow { n: 1, count: 1, log2_ratio: Some(0.0) },
            CountRow { n: 2, count: 4, log2_ratio: Some(0.1 + 0.2) },
        ],
        count: 4,
    });
    assert_eq!(Document::parse(&report.to_json()).unwrap(), report);
}

#[test]
fn causality_is_closed_on_load() {
    let doc = Document::parse(r#"{"kind":"event-structure","n":3,"causality":[[0,1],[1,2],[0,2]]}"#).unwrap();
    let es = doc.es().unwrap();
    assert_eq!(es.causality().len(), 6);
    // saved as covers only
    assert_eq!(
        Document::from_es(&es),
        Document::parse(r#"{"kind":"event-structure","n":3,"causality":[[0,1],[1,2]],"conflict":[]}"#).unwrap()
    );
}

#[test]
fn validate_reports_violations() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"kind":"event-structure","n":3,"causality":[[0,2]],"conflict":[[0,1]]}"#);
    let out = evstruct(&["validate", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["axiom"], "ConflictPropagation");
    assert_eq!(v["violations"][0]["witness"], serde_json::json!([0, 2, 1]));

    let good = write(&dir, "good.json", r#"{"kind":"event-structure","n":3,"causality":[[0,2]],"conflict":[[0,1],[1,2]]}"#);
    let out = evstruct(&["validate", p(&good)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["valid"], true);

    let cyclic = write(&dir, "cyc.json", r#"{"kind":"event-structure","n":2,"causality":[[0,1],[1,0]]}"#);
    assert_eq!(evstruct(&["validate", p(&cyclic)]).status.code(), Some(1));
    assert_eq!(evstruct(&["represent", p(&cyclic)]).status.code(), Some(1));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("syntax.json", "{not json"),
        ("range.json", r#"{"kind":"event-structure","n":2,"causality":[[0,5]]}"#),
        ("kind.json", r#"{"kind":"hypergraph","n":2}"#),
        ("wrong.json", r#"{"kind":"representation","n":1,"sets":{"0":[1]}}"#),
    ];
    for (name, text) in cases {
        let f = write(&dir, name, text);
        let out = evstruct(&["validate", p(&f)]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(evstruct(&["validate", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(evstruct(&["count", "--kind", "trees", "--n", "2"]).status.code(), Some(2));
    assert_eq!(evstruct(&["count", "--kind", "es", "--n", "3", "--shards", "2", "--shard", "2"]).status.code(), Some(2));
}

#[test]
fn represent_output_passes_check() {
    let dir = TempDir::new().unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let mut cases: Vec<EventStructure> = all_es(3);
    cases.extend(all_es(5).into_iter().choose_multiple(&mut rng, 25));
    for (i, es) in cases.iter().enumerate() {
        let es_path = write(&dir, &format!("es{i}.json"), &Document::from_es(es).to_json());
        let out = evstruct(&["represent", p(&es_path)]);
        assert_eq!(out.status.code(), Some(0));
        let rep_path = write(&dir, &format!("rep{i}.json"), std::str::from_utf8(&out.stdout).unwrap());
        let out = evstruct(&["check", p(&es_path), p(&rep_path)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        let v = stdout_json(&out);
        assert_eq!(v["representation"], true);
        assert_eq!(v["injective_nonempty"], true);
    }
}

#[test]
fn check_rejects_a_wrong_map() {
    let dir = TempDir::new().unwrap();
    let es = write(&dir, "es.json", r#"{"kind":"event-structure","n":2,"causality":[[0,1]]}"#);
    let rep = write(&dir, "rep.json", r#"{"kind":"representation","n":2,"sets":{"0":[1],"1":[2]}}"#);
    let out = evstruct(&["check", p(&es), p(&rep)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["representation"], false);
    let partial = write(&dir, "partial.json", r#"{"kind":"representation","n":1,"sets":{"0":[1]}}"#);
    assert_eq!(evstruct(&["check", p(&es), p(&partial)]).status.code(), Some(1));
}

#[test]
fn represent_chain() {
    let dir = TempDir::new().unwrap();
    let es = write(&dir, "chain.json", r#"{"kind":"event-structure","n":2,"causality":[[0,1]]}"#);
    let out = evstruct(&["represent", p(&es)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["sets"], serde_json::json!({"0": [1, 3], "1": [3]}));
}

#[test]
fn convert_there_and_back_is_the_identity() {
    let dir = TempDir::new().unwrap();
    for (i, es) in all_es(3).iter().enumerate() {
        let original = Document::from_es(es).to_json();
        let es_path = write(&dir, &format!("es{i}.json"), &original);
        let out = evstruct(&["convert", "--to", "fullgraph", p(&es_path)]);
        assert_eq!(out.status.code(), Some(0));
        let fg_text = String::from_utf8(out.stdout).unwrap();
        let fg_path = write(&dir, &format!("fg{i}.json"), &fg_text);
        assert_eq!(evstruct(&["is-fullgraph", p(&fg_path)]).status.code(), Some(0));
        let out = evstruct(&["convert", "--to", "es", p(&fg_path)]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), original.trim_end());
    }
}

#[test]
fn is_fullgraph_reports_reasons() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "fg.json", r#"{"kind":"full-graph","n":3,"causality":[[0,2]],"overlap":[[1,2]]}"#);
    let out = evstruct(&["is-fullgraph", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["reason"], "InducedConflictInvalid");
    let comparable = write(&dir, "cmp.json", r#"{"kind":"full-graph","n":2,"causality":[[0,1]],"overlap":[[0,1]]}"#);
    let out = evstruct(&["is-fullgraph", p(&comparable)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["reason"], "NotInComplement");
    let out = evstruct(&["represent", p(&comparable)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fullgraph_representation_via_cli() {
    let dir = TempDir::new().unwrap();
    let fg = write(&dir, "fg.json", r#"{"kind":"full-graph","n":2,"causality":[],"overlap":[[0,1]]}"#);
    let out = evstruct(&["represent", p(&fg)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["sets"], serde_json::json!({"0": [3, 4], "1": [1, 3]}));
}

#[test]
fn small_counts() {
    let out = evstruct(&["count", "--kind", "es", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["count"], 4);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);

    let expected = [1u64, 1, 4, 41, 916];
    for kind in ["es", "fullgraph"] {
        for method in [&[][..], &["--oracle"][..]] {
            let mut args = vec!["count", "--kind", kind, "--n", "4"];
            args.extend_from_slice(method);
            let v = stdout_json(&evstruct(&args));
            let counts: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["count"].as_u64().unwrap()).collect();
            assert_eq!(counts, expected, "{kind} {method:?}");
        }
    }
    let v = stdout_json(&evstruct(&["count", "--kind", "posets", "--n", "4", "--oracle"]));
    assert_eq!(v["count"], 219);
}

#[test]
fn shards_sum_to_the_whole() {
    let whole = stdout_json(&evstruct(&["count", "--kind", "es", "--n", "5"]))["count"].as_u64().unwrap();
    let parts: u64 = (0..3)
        .map(|i| {
            let i = i.to_string();
            let v = stdout_json(&evstruct(&["count", "--kind", "es", "--n", "5", "--shards", "3", "--shard", &i]));
            v["count"].as_u64().unwrap()
        })
        .sum();
    assert_eq!(whole, 41099);
    assert_eq!(parts, whole);
}

#[test]
fn size_guard_and_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_evstruct"))
        .args(["count", "--kind", "es", "--n", "3"])
        .env("EVSTRUCT_MAX_N", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_evstruct"))
        .args(["count", "--kind", "posets", "--n", "8"])
        .env("EVSTRUCT_MAX_N", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["count"], 431723379);
    assert_eq!(evstruct(&["count", "--kind", "posets", "--n", "8"]).status.code(), Some(2));
}

#[test]
fn enumerate_streams_json_lines() {
    let out = evstruct(&["enumerate", "--kind", "es", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let docs: Vec<Document> = text.lines().map(|l| Document::parse(l).unwrap()).collect();
    assert_eq!(docs.len(), 41);
    let distinct: std::collections::BTreeSet<String> = text.lines().map(str::to_owned).collect();
    assert_eq!(distinct.len(), 41);
    assert!(docs.iter().all(|d| d.es().is_ok()));
}

#[test]
fn dot_export() {
    let dir = TempDir::new().unwrap();
    let es = write(&dir, "es.json", r#"{"kind":"event-structure","n":3,"causality":[[0,1],[1,2]],"conflict":[]}"#);
    let out = evstruct(&["export-dot", p(&es)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("0 -> 1;") && text.contains("1 -> 2;"));
    assert!(!text.contains("0 -> 2;"));

    let es = write(&dir, "c.json", r#"{"kind":"event-structure","n":2,"causality":[],"conflict":[[0,1]]}"#);
    let text = String::from_utf8(evstruct(&["export-dot", p(&es)]).stdout).unwrap();
    assert!(text.contains("0 -> 1 [dir=none, style=dashed"));
}
