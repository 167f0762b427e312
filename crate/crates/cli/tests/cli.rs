//! Integration tests for the `procmine` binary: output formats, flag
//! handling, the exit-code contract (0 success, 1 bad input, 2 usage), and
//! the convert matrix.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use procmine::{write_xes, AttributeValue, Event, EventLog, Trace};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_procmine"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn procmine")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn write_fixture(dir: &Path, name: &str, log: &EventLog) -> PathBuf {
    let path = dir.join(name);
    let mut bytes = Vec::new();
    write_xes(log, &mut bytes).unwrap();
    std::fs::write(&path, bytes).unwrap();
    path
}

fn l1_fixture(dir: &Path) -> PathBuf {
    let log = EventLog::from_activity_sequences(vec![
        vec!["a", "b", "d"],
        vec!["a", "c", "d"],
        vec!["a", "b", "d"],
        vec!["a", "c", "d"],
        vec!["a", "b", "d"],
    ]);
    write_fixture(dir, "l1.xes", &log)
}

#[test]
fn stats_text_report() {
    let dir = TempDir::new().unwrap();
    let log = l1_fixture(dir.path());
    let out = run(&["stats", log.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(
        stdout(&out),
        "traces    5\n\
         events    15\n\
         variants  2\n\
         \n\
         start activities\n\
         \x20 a  5\n\
         \n\
         end activities\n\
         \x20 d  5\n\
         \n\
         activities\n\
         \x20 a  5\n\
         \x20 d  5\n\
         \x20 b  3\n\
         \x20 c  2\n\
         \n\
         variants\n\
         \x20 a,b,d  3\n\
         \x20 a,c,d  2\n"
    );
    assert!(!out.stdout.contains(&0x1b), "piped output must not carry ANSI escapes");
}

#[test]
fn stats_json_report() {
    let dir = TempDir::new().unwrap();
    let log = l1_fixture(dir.path());
    let out = run(&["stats", log.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["num_traces"], 5);
    assert_eq!(v["num_events"], 15);
    assert_eq!(v["num_variants"], 2);
    assert_eq!(v["start_activities"], serde_json::json!({"a": 5}));
    assert_eq!(v["end_activities"], serde_json::json!({"d": 5}));
    assert_eq!(v["activities"]["b"], 3);
    assert_eq!(v["variants"][0]["sequence"], serde_json::json!(["a", "b", "d"]));
    assert_eq!(v["variants"][0]["count"], 3);

    // --max-variants truncates the listing but not the count.
    let out = run(&["stats", log.to_str().unwrap(), "--format", "json", "--max-variants", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["num_variants"], 2);
    assert_eq!(v["variants"].as_array().unwrap().len(), 1);
}

#[test]
fn variants_listing_top_and_count() {
    let dir = TempDir::new().unwrap();
    let log = l1_fixture(dir.path());
    let path = log.to_str().unwrap();

    let all = run(&["variants", path]);
    assert_eq!(exit_code(&all), 0);
    assert_eq!(stdout(&all), "a,b,d  3\na,c,d  2\n");

    let top = run(&["variants", path, "--top", "1"]);
    assert_eq!(stdout(&top), "a,b,d  3\n");

    let count = run(&["variants", path, "--count-only"]);
    assert_eq!(stdout(&count), "2\n");

    let json = run(&["variants", path, "--format", "json", "--top", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["count"], 3);

    // Usage errors: --top 0 is out of range, --count-only conflicts with --top.
    assert_eq!(exit_code(&run(&["variants", path, "--top", "0"])), 2);
    assert_eq!(exit_code(&run(&["variants", path, "--count-only", "--top", "1"])), 2);
}

#[test]
fn variants_write_filters_traces() {
    let dir = TempDir::new().unwrap();
    let log = l1_fixture(dir.path());
    let kept = dir.path().join("kept.xes");

    let out = run(&[
        "variants",
        log.to_str().unwrap(),
        "--top",
        "1",
        "--write",
        kept.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);

    let check = run(&["stats", kept.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&check)).unwrap();
    assert_eq!(v["num_traces"], 3);
    assert_eq!(v["num_variants"], 1);
    assert_eq!(v["activities"], serde_json::json!({"a": 3, "b": 3, "d": 3}));
}

#[test]
fn discover_formats_and_output_file() {
    let dir = TempDir::new().unwrap();
    let log = l1_fixture(dir.path());
    let path = log.to_str().unwrap();

    let pnml = run(&["discover", path, "--miner", "alpha"]);
    assert_eq!(exit_code(&pnml), 0);
    let xml = stdout(&pnml);
    assert!(xml.contains("<pnml>"), "default output is PNML");
    assert_eq!(xml.matches("<transition id=\"").count(), 4);
    assert_eq!(xml.matches("<place id=\"").count(), 4);
    assert_eq!(xml.matches("<arc id=\"").count(), 8);

    let dot = run(&["discover", path, "--miner", "inductive", "--out", "dot"]);
    assert_eq!(exit_code(&dot), 0);
    assert!(stdout(&dot).starts_with("digraph"));

    // -o writes the same bytes to a file instead of stdout.
    let file = dir.path().join("model.pnml");
    let to_file = run(&["discover", path, "--miner", "alpha", "-o", file.to_str().unwrap()]);
    assert_eq!(exit_code(&to_file), 0);
    assert_eq!(stdout(&to_file), "");
    assert_eq!(std::fs::read(&file).unwrap(), pnml.stdout);

    // Unknown miner is a usage error listing the valid names.
    let bad = run(&["discover", path, "--miner", "genetic"]);
    assert_eq!(exit_code(&bad), 2);
    assert!(stderr(&bad).contains("alpha"));
}

#[test]
fn evaluate_selection_and_json() {
    let dir = TempDir::new().unwrap();
    let log = l1_fixture(dir.path());
    let path = log.to_str().unwrap();

    let all = run(&["evaluate", path, "--format", "json"]);
    assert_eq!(exit_code(&all), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&all)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["miner"].as_str().unwrap()).collect();
    assert_eq!(names, ["alpha", "alpha-plus", "inductive", "heuristic"]);
    for row in rows {
        for metric in ["fitness", "precision", "simplicity"] {
            assert_eq!(row[metric], 1.0, "{} {metric}", row["miner"]);
        }
        assert!(row["generalization"].as_f64().unwrap() < 1.0);
        assert_eq!(row["places"], 4);
        assert!(row.get("seconds").is_none(), "timings only appear with --timings");
        assert!(row.get("error").is_none());
    }

    // Miner subset keeps canonical row order; metric subset trims columns.
    let some = run(&[
        "evaluate", path, "--format", "json", "--miners", "heuristic,alpha", "--metrics", "fitness",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&some)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["miner"].as_str().unwrap()).collect();
    assert_eq!(names, ["alpha", "heuristic"]);
    assert!(rows[0].get("fitness").is_some());
    assert!(rows[0].get("precision").is_none());

    let timed = run(&["evaluate", path, "--format", "json", "--miners", "alpha", "--timings"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&timed)).unwrap();
    assert!(v["rows"][0]["seconds"].as_f64().unwrap() >= 0.0);

    let text = run(&["evaluate", path]);
    let first = stdout(&text);
    let first_line = first.lines().next().unwrap();
    assert!(first_line.starts_with("miner"));
    assert!(first_line.contains("generalization"));

    assert_eq!(exit_code(&run(&["evaluate", path, "--miners", "genetic"])), 2);
    assert_eq!(exit_code(&run(&["evaluate", path, "--metrics", "speed"])), 2);
}

#[test]
fn exit_code_contract() {
    let dir = TempDir::new().unwrap();

    // 1: unreadable or unparseable input.
    let missing = run(&["stats", dir.path().join("nope.xes").to_str().unwrap()]);
    assert_eq!(exit_code(&missing), 1);
    assert!(stderr(&missing).starts_with("error: "));

    let garbage = dir.path().join("garbage.xes");
    std::fs::write(&garbage, "this is not xml").unwrap();
    assert_eq!(exit_code(&run(&["stats", garbage.to_str().unwrap()])), 1);

    // 2: usage errors.
    assert_eq!(exit_code(&run(&["frobnicate"])), 2);
    assert_eq!(exit_code(&run(&["stats"])), 2);
    assert_eq!(exit_code(&run(&[])), 2);

    // 0: --help and --version despite no input.
    assert_eq!(exit_code(&run(&["--help"])), 0);
    assert_eq!(exit_code(&run(&["--version"])), 0);
}

#[test]
fn convert_matrix() {
    let dir = TempDir::new().unwrap();
    let log = l1_fixture(dir.path());
    let path = log.to_str().unwrap();
    let original = std::fs::read(&log).unwrap();

    // XES -> gzip -> XES reproduces the original bytes.
    let gz = dir.path().join("log.xes.gz");
    assert_eq!(exit_code(&run(&["convert", path, gz.to_str().unwrap()])), 0);
    assert!(std::fs::read(&gz).unwrap().starts_with(&[0x1f, 0x8b]));
    let back = dir.path().join("back.xes");
    assert_eq!(exit_code(&run(&["convert", gz.to_str().unwrap(), back.to_str().unwrap()])), 0);
    assert_eq!(std::fs::read(&back).unwrap(), original);

    // Gzipped logs are read by content sniffing everywhere.
    let sniffed = run(&["stats", gz.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&sniffed), 0);

    // XES -> JSON is valid JSON with the traces in place.
    let json = dir.path().join("log.json");
    assert_eq!(exit_code(&run(&["convert", path, json.to_str().unwrap()])), 0);
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(v["traces"].as_array().unwrap().len(), 5);

    // PNML -> DOT works on a discovered model.
    let pnml = dir.path().join("model.pnml");
    assert_eq!(
        exit_code(&run(&["discover", path, "--miner", "alpha", "-o", pnml.to_str().unwrap()])),
        0
    );
    let dot = dir.path().join("model.dot");
    assert_eq!(exit_code(&run(&["convert", pnml.to_str().unwrap(), dot.to_str().unwrap()])), 0);
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));

    // Unsupported directions are usage errors.
    let to_model = run(&["convert", path, dir.path().join("log.pnml").to_str().unwrap()]);
    assert_eq!(exit_code(&to_model), 2);
    assert!(stderr(&to_model).contains("discover"));
    let from_dot = run(&["convert", dot.to_str().unwrap(), back.to_str().unwrap()]);
    assert_eq!(exit_code(&from_dot), 2);
    let no_ext = run(&["convert", path, dir.path().join("out.txt").to_str().unwrap()]);
    assert_eq!(exit_code(&no_ext), 2);
}

#[test]
fn strict_mode_and_warnings() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("odd.xes");
    std::fs::write(
        &path,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0">
  <mystery thing="yes"/>
  <trace>
    <event><string key="concept:name" value="a"/></event>
    <event><string key="concept:name" value="b"/></event>
  </trace>
</log>
"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();

    let lenient = run(&["stats", p]);
    assert_eq!(exit_code(&lenient), 0);
    assert!(
        stderr(&lenient).contains("unknown element <mystery>"),
        "lenient mode reports the skipped element on stderr: {}",
        stderr(&lenient)
    );
    assert!(stdout(&lenient).contains("traces    1"));

    let strict = run(&["--strict", "stats", p]);
    assert_eq!(exit_code(&strict), 1);
    assert!(stderr(&strict).starts_with("error: "));
    assert!(stderr(&strict).contains("mystery"));
}

#[test]
fn classifier_selection() {
    let dir = TempDir::new().unwrap();
    let mut log = EventLog::new();
    log.classifiers.insert("by resource".into(), vec!["org:resource".into()]);
    let mut trace = Trace::new();
    for (name, resource) in [("a", "X"), ("b", "Y")] {
        let mut event = Event::named(name);
        event.set("org:resource", AttributeValue::String(resource.into()));
        trace.events.push(event);
    }
    log.traces.push(trace);
    let path = write_fixture(dir.path(), "resources.xes", &log);
    let p = path.to_str().unwrap();

    // Default classifier: activity names.
    let by_name = run(&["stats", p, "--format", "json"]);
    assert_eq!(
        serde_json::from_str::<serde_json::Value>(&stdout(&by_name)).unwrap()["activities"],
        serde_json::json!({"a": 1, "b": 1})
    );

    // A classifier declared in the log is referenced by its name; raw
    // attribute keys work the same way.
    for spec in ["by resource", "org:resource"] {
        let out = run(&["--classifier", spec, "stats", p, "--format", "json"]);
        assert_eq!(exit_code(&out), 0, "--classifier {spec}");
        assert_eq!(
            serde_json::from_str::<serde_json::Value>(&stdout(&out)).unwrap()["activities"],
            serde_json::json!({"X": 1, "Y": 1}),
            "--classifier {spec}"
        );
    }

    // A spec that names no keys at all is a usage error.
    assert_eq!(exit_code(&run(&["--classifier", " , ", "stats", p])), 2);
}

#[test]
fn empty_log_reports_zeroes() {
    let dir = TempDir::new().unwrap();
    let path = write_fixture(dir.path(), "empty.xes", &EventLog::new());
    let out = run(&["stats", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["num_traces"], 0);
    assert_eq!(v["num_events"], 0);
    assert_eq!(v["num_variants"], 0);

    // Discovery on an empty log is an input error, not a crash.
    let discover = run(&["discover", path.to_str().unwrap(), "--miner", "alpha"]);
    assert_eq!(exit_code(&discover), 1);
    assert!(stderr(&discover).starts_with("error: "));
}
