use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn argnn(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_argnn"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) {
    let output = argnn(args, out);
    assert!(
        output.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn rows(text: &str) -> Vec<Vec<&str>> {
    text.lines().skip(1).map(|l| l.split(',').collect()).collect()
}

#[test]
fn train_writes_every_artifact() {
    let dir = TempDir::new().unwrap();
    ok(&["train", "--gate", "or", "--hidden", "2", "--inputs", "40", "--passes", "3"], dir.path());

    assert!(read(dir.path(), "graph.csv").starts_with("source,target,weight\n"));
    let log = read(dir.path(), "train_log.csv");
    assert!(log.starts_with("iter,error,edges_remaining\n"));
    assert_eq!(log.lines().count(), 41);
    assert!(read(dir.path(), "prune_events.csv").starts_with("step,executor,source,target,a_value\n"));

    let results = read(dir.path(), "results.csv");
    let r = &rows(&results)[0];
    assert_eq!(&r[..5], ["or", "directed", "2", "0", "0"]);
    assert_eq!(r[6], "12");

    let params = read(dir.path(), "params.csv");
    for line in ["gate,or", "hidden,2", "inputs,40", "passes,3", "seed,0", "assoc,index", "perm,per-input"] {
        assert!(params.lines().any(|l| l == line), "missing {line}");
    }
}

#[test]
fn capacity_without_pruning_keeps_every_edge() {
    let dir = TempDir::new().unwrap();
    ok(
        &["capacity", "--gate", "and", "--hidden-range", "1..3", "--mode", "none", "--runs", "2", "--inputs", "30"],
        dir.path(),
    );
    let results = read(dir.path(), "results.csv");
    let records = rows(&results);
    assert_eq!(records.len(), 6);
    assert!(records.iter().all(|r| r[7] == "0"));
    let hidden: Vec<&str> = records.iter().map(|r| r[2]).collect();
    assert_eq!(hidden, ["1", "1", "2", "2", "3", "3"]);

    let summary = read(dir.path(), "summary.csv");
    assert_eq!(rows(&summary).len(), 3);
}

#[test]
fn timing_samples_start_unpruned() {
    let dir = TempDir::new().unwrap();
    ok(
        &["timing", "--gate", "xor", "--hidden", "2", "--runs", "2", "--mode", "weighted", "--seed", "7", "--inputs", "35"],
        dir.path(),
    );
    let timing = read(dir.path(), "timing.csv");
    let records = rows(&timing);
    let iters: Vec<&str> = records.iter().filter(|r| r[1] == "0").map(|r| r[2]).collect();
    assert_eq!(iters, ["0", "10", "20", "30", "35"]);
    for r in records.iter().filter(|r| r[2] == "0") {
        assert_eq!(r[4].parse::<f64>().unwrap(), 0.0);
    }
    assert!(read(dir.path(), "timing_summary.csv").starts_with("mode,iter,runs,"));
}

#[test]
fn trace_tags_match_prune_events() {
    let dir = TempDir::new().unwrap();
    ok(&["trace", "--hidden", "2", "--inputs", "30", "--passes", "4", "--seed", "3"], dir.path());
    let trace = read(dir.path(), "eigentrace.csv");
    let trace_rows = rows(&trace);
    assert!(!trace_rows.is_empty());
    assert!(trace_rows.iter().all(|r| r[1] != "0" && r[1] != "1"));

    let tagged: Vec<String> = trace_rows
        .iter()
        .filter(|r| !r[5].is_empty())
        .map(|r| format!("{},{}", r[0], r[5]))
        .collect();
    let events = read(dir.path(), "prune_events.csv");
    let expected: Vec<String> = rows(&events)
        .iter()
        .map(|e| format!("{},P({}->{})", e[0], e[2], e[3]))
        .collect();
    assert_eq!(tagged, expected);
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let runs: [&[&str]; 3] = [
        &["capacity", "--gate", "xor", "--hidden-range", "1..2", "--runs", "2", "--inputs", "40"],
        &["timing", "--runs", "2", "--inputs", "40", "--interval", "7"],
        &["trace", "--mode", "weighted", "--inputs", "20"],
    ];
    for args in runs {
        let a = TempDir::new().unwrap();
        let b = TempDir::new().unwrap();
        ok(args, a.path());
        let mut parallel = args.to_vec();
        parallel.extend(["--jobs", "3"]);
        ok(&parallel, b.path());

        let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(names.len() >= 3);
        for name in names {
            let left = fs::read(a.path().join(&name)).unwrap();
            let right = fs::read(b.path().join(&name)).unwrap();
            assert!(left == right, "{args:?}: {name:?} differs");
        }
    }
}

#[test]
fn invalid_flags_exit_with_usage_error() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["train", "--gate", "nand"][..],
        &["capacity", "--mode", "symmetric"],
        &["timing", "--assoc", "random"],
        &["train", "--unknown"],
        &["capacity", "--hidden-range", "3..1"],
    ] {
        let output = argnn(args, dir.path());
        assert_eq!(output.status.code(), Some(2), "{args:?}");
        assert!(!output.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_directory_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let output = argnn(&["train", "--inputs", "5"], &blocker.join("out"));
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("output directory"));
}
