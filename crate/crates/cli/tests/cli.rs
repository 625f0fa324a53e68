use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn memdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let policy = dir.path().join("p.json");
    let stats = dir.path().join("s.jsonl");
    let out = memdp(&["solve", &model("fig1.json"), "--policy", path(&policy), "--stats", path(&stats)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "SAT\n");
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&stats)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(lines.len() >= 2);
    assert!(lines[0].get("winning_antichain").is_some());
    assert_eq!(lines.last().unwrap()["summary"]["verdict"], "satisfiable");
    let out = memdp(&["verify", &model("fig1.json"), path(&policy)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn wrong_policy_fails_in_two_environments() {
    let out = memdp(&["verify", &model("fig1.json"), &model("fig1-always-a1.json")]);
    assert_eq!(out.status.code(), Some(5));
    let text = stdout(&out);
    assert!(text.contains("1\tpass"));
    assert!(text.contains("2\tFAIL\tbad {2,3}"));
    assert!(text.contains("3\tFAIL\tbad {2,3}"));
}

#[test]
fn graph_of_running_example() {
    let out = memdp(&["graph", &model("fig1.json")]);
    assert_eq!(out.status.code(), Some(0));
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    for label in ["{1,2,3}", "{2,3}", "{1,2}", "{1,3}", "{1}", "{2}", "{3}"] {
        assert!(dot.contains(&format!("[label=\"{label}\"]")), "{label} missing");
    }
    assert!(dot.contains("v0 -> "));
}

#[test]
fn unsatisfiable_generated_model() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("u.json");
    let out = memdp(&["gen", "exponential", "3", "--unsat", "-o", path(&file)]);
    assert_eq!(out.status.code(), Some(0));
    for h in ["bfs", "dfs", "entropy", "negentropy"] {
        for b in ["lower", "upper", "both"] {
            let out = memdp(&["solve", path(&file), "--heuristic", h, "--bounds", b, "--bound0", "4"]);
            assert_eq!(stdout(&out), "UNSAT\n", "{h}/{b}");
        }
    }
}

#[test]
fn verdicts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    memdp(&["gen", "grid", "4", "4", "-o", path(&file)]);
    let a = memdp(&["solve", path(&file), "--seed", "1", "--policy", path(&dir.path().join("a"))]);
    let b = memdp(&["solve", path(&file), "--seed", "2", "--policy", path(&dir.path().join("b"))]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(
        std::fs::read(dir.path().join("a")).ok(),
        std::fs::read(dir.path().join("b")).ok()
    );
}

#[test]
fn gen_output_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.json");
    memdp(&["gen", "random", "5", "--cyclic", "-o", path(&file)]);
    let first = std::fs::read_to_string(&file).unwrap();
    let m = memdp_core::io::parse_model(&first).unwrap();
    assert_eq!(memdp_core::io::model_to_json(&m), first);
}

#[test]
fn qbf_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.qdimacs");
    std::fs::write(&f, "c example\np cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n").unwrap();
    let m = dir.path().join("m.json");
    assert_eq!(memdp(&["gen", "qbf", path(&f), "-o", path(&m)]).status.code(), Some(0));
    assert_eq!(stdout(&memdp(&["solve", path(&m)])), "SAT\n");
    std::fs::write(&f, "p cnf 2 2\n1 2 0\n").unwrap();
    assert_eq!(memdp(&["gen", "qbf", path(&f)]).status.code(), Some(3));
}

#[test]
fn exit_codes() {
    assert_eq!(memdp(&[]).status.code(), Some(2));
    assert_eq!(memdp(&["solve"]).status.code(), Some(2));
    assert_eq!(memdp(&["solve", "x.json", "--bounds", "sideways"]).status.code(), Some(2));
    assert_eq!(memdp(&["gen", "exponential", "0"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(model("fig1.json")).unwrap();
    std::fs::write(&bad, &text[..text.len() / 3]).unwrap();
    let out = memdp(&["solve", path(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    assert_eq!(memdp(&["solve", "/nonexistent/model.json"]).status.code(), Some(3));

    let big = dir.path().join("big.json");
    memdp(&["gen", "catchman", "5", "5", "-o", path(&big)]);
    assert_eq!(memdp(&["solve", path(&big), "--memcap", "50"]).status.code(), Some(4));
}

#[test]
fn crosscheck_reports_json_lines() {
    let out = memdp(&["crosscheck", "--seeds", "12", "--cyclic"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 12);
    for (i, line) in text.lines().enumerate() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["seed"], i as u64);
        assert_eq!(v["agree"], true);
    }
}
