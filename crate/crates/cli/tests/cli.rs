use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rnc_core::compiler::format::rnc_from_json;
use rnc_core::neurons::format::neuron_to_json;
use rnc_core::neurons::{make_tanh_flipflop, optimal_tanh_ab};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn rnc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnc")).args(args).output().expect("rnc runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn report(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).expect("one JSON report on stdout")
}

#[test]
fn compile_parity_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rnc.json");
    let o = rnc(&["compile", path(&data("parity_cascade.json")), "--activation", "tanh", "--weight", "-2", "-o", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text, std::fs::read_to_string(data("parity_rnc.json")).unwrap());
    assert_eq!(rnc_from_json(&text).unwrap().len(), 1);
    assert!(stderr(&o).contains("parity toggle tanh w=-2"));
}

#[test]
fn compile_rejects_bad_parameters_and_files() {
    let o = rnc(&["compile", path(&data("flipflop_cascade.json")), "--weight", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("w > 1"), "{}", stderr(&o));
    assert_eq!(rnc(&["compile", "no-such-file.json"]).status.code(), Some(1));
    assert_eq!(rnc(&["compile", path(&data("parity_automaton.json"))]).status.code(), Some(1));
    assert_eq!(rnc(&["demo", "ttop", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn run_parity() {
    let r = data("parity_rnc.json");
    let o = rnc(&["run", path(&r), "aaa"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 0 1\n");
    let o = rnc(&["run", path(&r), ""]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "\n".to_string()));
    let o = rnc(&["run", path(&r), "a a 0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("position 2"), "{}", stderr(&o));
    assert_eq!(rnc(&["run", path(&r), "b"]).status.code(), Some(3));
}

#[test]
fn run_reads_files_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.txt");
    std::fs::write(&input, "a\na, 0.1\n").unwrap();
    let o = rnc(&["run", path(&data("parity_rnc.json")), "--file", path(&input), "--trace"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    let ys: Vec<&str> = lines.iter().map(|l| l["y"].as_str().unwrap()).collect();
    assert_eq!(ys, ["1", "0", "1"]);
    assert_eq!(lines[1]["interp"][0], "low");
    assert_eq!(lines[2]["u"], 0.1);
}

#[test]
fn check_aperiodic() {
    let o = rnc(&["check", "aperiodic", path(&data("flipflop_semiautomaton.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["result"], "PASS");
    let o = rnc(&["check", "aperiodic", path(&data("parity_automaton.json"))]);
    assert_eq!(o.status.code(), Some(4));
    let r = report(&o);
    assert_eq!(r["result"], "FAIL");
    assert_eq!(r["witness"]["word"], serde_json::json!(["a"]));
    assert_eq!(r["witness"]["period"], 2);
    // a cascade document is flattened first
    assert_eq!(rnc(&["check", "aperiodic", path(&data("parity_cascade.json"))]).status.code(), Some(4));
    assert_eq!(rnc(&["check", "aperiodic", path(&data("flipflop_cascade.json"))]).status.code(), Some(0));
}

#[test]
fn check_equivalence_and_homomorphism() {
    let r = data("parity_rnc.json");
    let o = rnc(&["check", "equivalence", path(&r), path(&data("parity_automaton.json")), "--trials", "50", "--max-len", "60"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(report(&o)["agreeing"], 50);
    let o = rnc(&["check", "homomorphism", path(&r), path(&data("parity_cascade.json")), "--trials", "2000", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["violations"], 0);
    assert_eq!(rnc(&["check", "homomorphism", path(&r)]).status.code(), Some(1));
}

#[test]
fn sabotaged_rnc_fails_homomorphism() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data("parity_rnc.json")).unwrap()).unwrap();
    // the toggle interval now reaches into values that leave the state partition
    doc["neurons"][0]["input_partition"][2]["hi"] = serde_json::json!(1.5);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let o = rnc(&["check", "homomorphism", path(&bad), path(&data("parity_cascade.json")), "--trials", "2000"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let r = report(&o);
    assert!(r["violations"].as_u64().unwrap() > 0);
    assert_eq!(r["witnesses"][0]["jitter"], true);
}

#[test]
fn check_neuron() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = optimal_tanh_ab(3.0).unwrap();
    let spec = make_tanh_flipflop(3.0, a, b).unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, neuron_to_json(&spec)).unwrap();
    let o = rnc(&["check", "neuron", path(&good), "--grid", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(report(&o)["grid"], 50);
    let read = spec.input_interval("read").unwrap();
    let widened = spec.with_input_interval("read", read.widened(0.1)).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, neuron_to_json(&widened)).unwrap();
    let o = rnc(&["check", "neuron", path(&bad)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("violated"));
}

#[test]
fn demo_ttop_is_deterministic() {
    let args = ["demo", "ttop", "--bits", "3", "--trials", "30", "--max-len", "30", "--seed", "42"];
    let one = rnc(&[&["--threads", "1"], &args[..]].concat());
    let four = rnc(&[&["--threads", "4"], &args[..]].concat());
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
    let r = report(&one);
    assert_eq!((r["trials"].clone(), r["rnc_agreeing"].clone(), r["cascade_agreeing"].clone()), (30.into(), 30.into(), 30.into()));
    assert!(stderr(&one).contains("PASS demo ttop: 30/30"));
}

#[test]
fn demo_ttop_fixtures_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = rnc(&["demo", "ttop", "--bits", "3", "--trials", "12", "--seed", "5", "-o", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("prices_11.json").exists());
    let again = rnc(&["demo", "ttop", "--bits", "3", "--seed", "5", "--fixtures", path(dir.path())]);
    assert_eq!(again.status.code(), Some(0), "{}", stderr(&again));
    assert_eq!(again.stdout, o.stdout);
    std::fs::write(dir.path().join("prices_12.json"), "[1, 99]").unwrap();
    assert_eq!(rnc(&["demo", "ttop", "--bits", "3", "--fixtures", path(dir.path())]).status.code(), Some(3));
}

#[test]
fn demo_cookie_fixtures_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = rnc(&["demo", "cookie", "--episodes", "20", "--max-len", "60", "-o", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(report(&o)["rnc_agreeing"], 20);
    let again = rnc(&["demo", "cookie", "--fixtures", path(dir.path())]);
    assert_eq!(again.stdout, o.stdout);
    let o = rnc(&["check", "homomorphism", path(&dir.path().join("rnc.json")), path(&dir.path().join("cascade.json")), "--trials", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    // a stored prediction that disagrees with the observations
    let episode = dir.path().join("cookie_episode_0.jsonl");
    let text = std::fs::read_to_string(&episode).unwrap();
    let first = text.lines().next().unwrap().replace("\"probability\":0.0", "\"probability\":1.0");
    let rest: Vec<&str> = text.lines().skip(1).collect();
    std::fs::write(&episode, [first.as_str()].into_iter().chain(rest).collect::<Vec<_>>().join("\n")).unwrap();
    let o = rnc(&["demo", "cookie", "--fixtures", path(dir.path())]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert_eq!(report(&o)["oracle_agreeing"], 19);
}

#[test]
fn demo_parity() {
    let dir = tempfile::tempdir().unwrap();
    let o = rnc(&["demo", "parity", "--max-len", "200", "-o", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(&o);
    assert_eq!((r["words"].clone(), r["alternates"].clone()), (201.into(), true.into()));
    assert_eq!(std::fs::read_to_string(dir.path().join("rnc.json")).unwrap(), std::fs::read_to_string(data("parity_rnc.json")).unwrap());
    // a positive weight cannot realize a toggle
    assert_eq!(rnc(&["demo", "parity", "--weight", "2"]).status.code(), Some(2));
}
