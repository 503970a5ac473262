use std::path::Path;
use std::process::{Command, Output};

use multibench::formats::read_measurements;

fn multibench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multibench")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(multibench(&[]).status.code(), Some(2));
    assert_eq!(multibench(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(multibench(&["run", "--strategy", "goroutines"]).status.code(), Some(2));
    assert_eq!(multibench(&["analyze", "--fixture", "--metric", "bogus"]).status.code(), Some(2));
    assert_eq!(multibench(&["analyze", "--fixture", "x.csv"]).status.code(), Some(2));
    assert_eq!(multibench(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_writes_threads_times_reps_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = multibench(&[
        "run",
        "--problem",
        "randmat",
        "--strategy",
        "worker-pool",
        "--threads",
        "1,4",
        "--reps",
        "5",
        "--size",
        "100",
        "--is_bench",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("measurements.csv")).unwrap();
    let recs = read_measurements(&text).unwrap();
    assert_eq!(recs.len(), 10);
    assert!(recs.iter().all(|r| r.problem == "randmat" && r.paradigm == "worker-pool" && r.seconds > 0.0));
}

#[test]
fn missing_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = multibench(&[
        "run",
        "--problem",
        "thresh",
        "--strategy",
        "skeleton",
        "--threads",
        "1",
        "--reps",
        "1",
        "--input-dir",
        s(dir.path()),
        "--out",
        s(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("thresh.in"), "{}", stderr(&out));
}

#[test]
fn input_files_are_read_when_not_benchmarking() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("randmat.in"), "6 5 9\n").unwrap();
    let out = multibench(&[
        "run",
        "--problem",
        "randmat",
        "--strategy",
        "blocked-for",
        "--threads",
        "2",
        "--reps",
        "2",
        "--input-dir",
        s(dir.path()),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    std::fs::write(&conf, "reps = 2\ncolour = blue\n").unwrap();
    let out = multibench(&["run", "--config", s(&conf)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    let out = multibench(&["run", "--reps", "0", "--is_bench"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_fixture_loc_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = multibench(&["analyze", "--fixture", "--metric", "loc", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dot = std::fs::read_to_string(dir.path().join("loc.dot")).unwrap();
    let mut edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).map(str::trim).collect();
    edges.sort();
    assert_eq!(
        edges,
        [
            "\"Cilk\" -> \"Chapel\" [style=solid];",
            "\"Go\" -> \"Cilk\" [style=solid];",
            "\"Go\" -> \"TBB\" [style=solid];",
            "\"TBB\" -> \"Chapel\" [style=solid];",
            "\"TBB\" -> \"Cilk\" [style=dashed];",
        ]
    );
    assert!(!dir.path().join("exec.dot").exists());
}

#[test]
fn analyze_round_trips_a_campaign() {
    let dir = tempfile::tempdir().unwrap();
    let run = multibench(&[
        "run",
        "--problem",
        "randmat,thresh",
        "--strategy",
        "sequential,blocked-for,worker-pool",
        "--threads",
        "1,2",
        "--reps",
        "3",
        "--warmups",
        "0",
        "--size",
        "60",
        "--is_bench",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let report = dir.path().join("report");
    let out = multibench(&["analyze", s(&dir.path().join("measurements.csv")), "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for f in ["report.json", "summary.md", "means.csv", "speedups.csv"] {
        assert!(report.join(f).exists(), "{f}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report.join("report.json")).unwrap()).unwrap();
    assert!(!json["speedups"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_rejects_empty_and_malformed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "paradigm,problem,variant,threads,rep,seconds\n").unwrap();
    let out = multibench(&["analyze", s(&empty), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no records"), "{}", stderr(&out));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "paradigm,problem,variant,threads,rep,seconds\ngo,randmat,par,two,0,1.0\n").unwrap();
    let out = multibench(&["analyze", s(&bad), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bad.csv: line 2"), "{}", stderr(&out));
}

#[test]
fn validate_passes_and_warns_on_zero_trials() {
    let out = multibench(&["validate", "--size", "20", "--trials", "2", "--threads", "1,3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));
    let out = multibench(&["validate", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn coding_time_examples() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.tsv");
    std::fs::write(
        &log,
        "2012-03-01T10:00:00Z\tGo-randmat-seq start\n2012-03-01T10:10:00Z\tGo-randmat-seq done\n\
         2012-03-01T11:00:00Z\tGo-randmat-par start\n2012-03-01T11:30:00Z\tGo-randmat-par pause\n\
         2012-03-01T12:00:00Z\tGo-randmat-par resume\n2012-03-01T12:20:00Z\tGo-randmat-par done\n",
    )
    .unwrap();
    let out = multibench(&["coding-time", s(&log)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "language,problem,variant,raw_minutes,cumulative_minutes\nGo,randmat,seq,10,10\nGo,randmat,par,50,60\n"
    );

    let empty = dir.path().join("empty.tsv");
    std::fs::write(&empty, "").unwrap();
    let csv = dir.path().join("out.csv");
    let out = multibench(&["coding-time", s(&empty), "--out", s(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "language,problem,variant,raw_minutes,cumulative_minutes\n");

    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "2012-03-01T10:00:00Z\tGo-randmat-seq start\n2012-03-01T10:05:00Z\tGo-randmat-seq resume\n")
        .unwrap();
    let out = multibench(&["coding-time", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn analyze_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = multibench(&[
        "run",
        "--problem",
        "outer",
        "--strategy",
        "skeleton,fork-join",
        "--threads",
        "1,2",
        "--reps",
        "3",
        "--size",
        "40",
        "--is_bench",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let csv = dir.path().join("measurements.csv");
    for args in [vec!["--fixture"], vec![s(&csv)]] {
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        for out in [&a, &b] {
            let mut full = vec!["analyze"];
            full.extend(&args);
            full.extend(["--out", s(out)]);
            assert_eq!(multibench(&full).status.code(), Some(0));
        }
        let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
        assert!(fa.len() > 3);
        assert_eq!(fa, fb, "{args:?}");
        std::fs::remove_dir_all(&a).unwrap();
        std::fs::remove_dir_all(&b).unwrap();
    }
}
