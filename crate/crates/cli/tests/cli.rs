use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn netcoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netcoh"))
        .args(args)
        .output()
        .expect("failed to spawn netcoh")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(netcoh(&[]).status.code(), Some(1));
    assert_eq!(netcoh(&["greedy-add", "--k", "3"]).status.code(), Some(1));
    assert_eq!(netcoh(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(netcoh(&["generate", "--kind", "er", "--n", "10"]).status.code(), Some(1));
    assert_eq!(netcoh(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_with_two() {
    let dir = scratch("runtime_errors");
    let missing = dir.join("missing.tsv");
    assert_eq!(netcoh(&["coherence", "--input", s(&missing)]).status.code(), Some(2));

    let disconnected = dir.join("disconnected.tsv");
    fs::write(&disconnected, "n 4\n0\t1\t1\n2\t3\t1\n").unwrap();
    let out = netcoh(&["greedy-add", "--input", s(&disconnected), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn generate_greedy_and_tree_flow() {
    let dir = scratch("flow");
    let g = dir.join("g.tsv");
    let out = netcoh(&["generate", "--kind", "er", "--n", "20", "--seed", "3", "--output", s(&g)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&g).unwrap().starts_with("n 20\n"));

    let report = dir.join("greedy.json");
    let augmented = dir.join("augmented.tsv");
    let out = netcoh(&[
        "greedy-add", "--input", s(&g), "--k", "4", "--alg", "both", "--seed", "3",
        "--output", s(&report), "--output-graph", s(&augmented),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let reports = json.as_array().expect("both writes an array");
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["selected"], reports[1]["selected"]);
    assert_eq!(reports[0]["selected"].as_array().unwrap().len(), 4);
    let before = reports[1]["trace_before"].as_f64().unwrap();
    let after = reports[1]["trace_after"].as_f64().unwrap();
    assert!(after < before);

    let out = netcoh(&["coherence", "--input", s(&augmented)]);
    assert!(out.status.success());
    let c: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((c["coherence"].as_f64().unwrap() - after / 2.0).abs() <= 1e-9 * after);

    let tree = dir.join("tree.tsv");
    let tree_report = dir.join("tree.json");
    let out = netcoh(&["build-tree", "--n", "6", "--output", s(&tree), "--report", s(&tree_report)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&tree).unwrap();
    assert_eq!(text.lines().count(), 6);
    let hub_degree = (0..6)
        .map(|v| {
            text.lines()
                .skip(1)
                .filter(|l| l.split('\t').take(2).any(|x| x == v.to_string()))
                .count()
        })
        .max()
        .unwrap();
    assert_eq!(hub_degree, 5);

    let attached = dir.join("attached.tsv");
    let out = netcoh(&["build-tree", "--input", s(&g), "--attach", "3", "--output", s(&attached)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&attached).unwrap().starts_with("n 23\n"));
}

#[test]
fn seeded_commands_rerun_byte_identically() {
    let dir = scratch("determinism");
    let g = dir.join("g.tsv");
    let k3 = dir.join("k3.tsv");
    let report = dir.join("report.json");
    let augmented = dir.join("augmented.tsv");
    let sim = dir.join("sim.json");
    let sub = dir.join("sub.json");
    let tree = dir.join("tree.tsv");
    let tree_report = dir.join("tree.json");

    let snapshot = || {
        for args in [
            vec!["generate", "--kind", "ba", "--n", "25", "--m", "2", "--seed", "11", "--output", s(&g)],
            vec!["generate", "--kind", "complete", "--n", "3", "--output", s(&k3)],
            vec![
                "greedy-add", "--input", s(&g), "--k", "5", "--alg", "both", "--seed", "11",
                "--no-timings", "--output", s(&report), "--output-graph", s(&augmented),
            ],
            vec!["simulate", "--input", s(&k3), "--seed", "11", "--trials", "50", "--output", s(&sim)],
            vec![
                "oracle", "--mode", "submodularity", "--input", s(&g), "--samples", "20", "--seed", "11",
                "--output", s(&sub),
            ],
            vec!["build-tree", "--n", "9", "--no-timings", "--output", s(&tree), "--report", s(&tree_report)],
        ] {
            let out = netcoh(&args);
            assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        }
        [&g, &k3, &report, &augmented, &sim, &sub, &tree, &tree_report].map(|p| fs::read(p).unwrap())
    };
    let first = snapshot();
    let second = snapshot();
    assert_eq!(first, second);
}

#[test]
fn benchmark_writes_csv() {
    let dir = scratch("benchmark");
    let csv = dir.join("bench.csv");
    let out = netcoh(&["benchmark", "--sizes", "10,20", "--seed", "5", "--output", s(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,algorithm,evals,seconds,trace_before,trace_after"));
    assert_eq!(lines.count(), 4);

    let out = netcoh(&["benchmark", "--sizes", "20,10", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(1));
}
