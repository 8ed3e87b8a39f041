use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use cfguard::report::RunReport;
use cfguard::Graph;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
}

impl Run {
    fn report(&self) -> RunReport {
        RunReport::from_json(&self.stdout).expect("stdout is a report")
    }
}

fn cfguard(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_cfguard")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_decides_and_minimizes() {
    let dir = TempDir::new().unwrap();
    let c4 = file(&dir, "c4.txt", &Graph::cycle(4).to_text());
    let run = cfguard(&["solve", "cfc", s(&c4), "--k", "1"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.report().decision, Some(false));

    let run = cfguard(&["solve", "cfc", s(&c4), "--min"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.report().result["k"], 2);

    let k1 = file(&dir, "k1.txt", "p 1 0\n");
    let run = cfguard(&["solve", "scfc", s(&k1), "--k", "1"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.report().witness, Some(vec![1]));
}

#[test]
fn oracle_agrees_with_solver() {
    let dir = TempDir::new().unwrap();
    for (name, g, k) in [("p4", Graph::path(4), "1"), ("c4", Graph::cycle(4), "2"), ("k1", Graph::empty(1), "1")] {
        let path = file(&dir, name, &g.to_text());
        for problem in ["cfc", "scfc"] {
            let a = cfguard(&["solve", problem, s(&path), "--k", k]);
            let b = cfguard(&["oracle", problem, s(&path), "--k", k]);
            assert_eq!(a.code, b.code, "{name} {problem}");
            assert_eq!(a.report().decision, b.report().decision);
        }
    }
}

#[test]
fn witnesses_reverify_and_tampering_is_caught() {
    let dir = TempDir::new().unwrap();
    let g = Graph::path(5);
    let graph = file(&dir, "g.txt", &g.to_text());
    let witness = dir.path().join("w.txt");
    let run = cfguard(&["solve", "scfc", s(&graph), "--min", "--out", s(&witness)]);
    assert_eq!(run.code, 0);
    let ok = cfguard(&["verify", "coloring", s(&graph), s(&witness), "--mode", "strong"]);
    assert_eq!(ok.code, 0);

    let colors: Vec<usize> = fs::read_to_string(&witness)
        .unwrap()
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    let v = colors.iter().position(|&c| c != 0).unwrap();
    let mut tampered = colors.clone();
    tampered[v] = 0;
    let text: Vec<String> = tampered.iter().map(|c| c.to_string()).collect();
    let bad = file(&dir, "bad.txt", &(text.join(" ") + "\n"));
    let run = cfguard(&["verify", "coloring", s(&graph), s(&bad), "--mode", "strong"]);
    assert_eq!(run.code, 1);
    assert!(run.report().result["verdict"]["violation"].is_u64());

    let zeros = file(&dir, "zeros.txt", "0 0 0 0 0\n");
    let run = cfguard(&["verify", "coloring", s(&graph), s(&zeros), "--mode", "cf"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.report().result["verdict"]["violation"], 0);
}

#[test]
fn reference_terrain_commands() {
    let dir = TempDir::new().unwrap();
    let run = cfguard(&["terrain", "peel", "--reference"]);
    assert_eq!(run.code, 0);
    let r = run.report();
    assert_eq!(r.result["layers"][0], serde_json::json!([0, 1, 9, 11, 17, 19, 20]));

    let svg = dir.path().join("land.svg");
    let guards = dir.path().join("guards.json");
    let run = cfguard(&["terrain", "strong-guard", "--reference", "--svg", s(&svg), "--out", s(&guards)]);
    assert_eq!(run.code, 0);
    assert!(fs::read_to_string(&svg).unwrap().contains("<svg"));
    let g: Value = serde_json::from_str(&fs::read_to_string(&guards).unwrap()).unwrap();
    assert!(g["K"].as_u64().unwrap() <= 2 * g["p"].as_u64().unwrap());

    let terrain = file(&dir, "land.terrain", &cfguard::Terrain::reference().to_text());
    let run = cfguard(&["verify", "guarding", s(&terrain), s(&guards), "--mode", "strong"]);
    assert_eq!(run.code, 0);

    let run = cfguard(&["terrain", "pipeline", "--reference", "--problem", "scfc"]);
    assert_eq!(run.code, 0);
    let r = run.report();
    assert!(r.result["k"].as_u64().unwrap() <= 2 * r.result["p"].as_u64().unwrap());

    let dot = dir.path().join("vis.dot");
    let run = cfguard(&["terrain", "vis-graph", "--reference", "--dot", s(&dot)]);
    assert_eq!(run.code, 0);
    assert!(fs::read_to_string(&dot).unwrap().starts_with("graph G {"));
}

#[test]
fn generators_are_reproducible() {
    let run = cfguard(&["gen", "graph", "--n", "4", "--p", "1", "--seed", "3"]);
    assert_eq!(Graph::parse(&run.stdout).unwrap(), Graph::complete(4));
    let one = cfguard(&["gen", "terrain", "--n", "1", "--seed", "5"]);
    assert_eq!(one.stdout.lines().count(), 1);

    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for path in [&a, &b] {
        let run = cfguard(&["gen", "terrain", "--n", "30", "--seed", "11", "--out", s(path)]);
        assert_eq!(run.code, 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn reports_round_trip_and_text_format() {
    let dir = TempDir::new().unwrap();
    let graph = file(&dir, "g.txt", &Graph::star(3).to_text());
    let run = cfguard(&["solve", "cfc", s(&graph), "--k", "1"]);
    let report = run.report();
    assert_eq!(RunReport::from_json(&report.to_json()).unwrap(), report);
    assert_eq!(report.input_digest.as_deref().map(str::len), Some(64));
    let text = cfguard(&["solve", "cfc", s(&graph), "--k", "1", "--format", "text"]);
    assert!(text.stdout.contains("decision: true\n"));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let broken = file(&dir, "broken.txt", "p 2 1\ne 1 9\n");
    assert_eq!(cfguard(&["solve", "cfc", s(&broken), "--k", "1"]).code, 2);
    let graph = file(&dir, "g.txt", "p 2 1\ne 1 2\n");
    assert_eq!(cfguard(&["solve", "cfc", s(&graph)]).code, 2);
    assert_eq!(cfguard(&["solve", "cfc", s(&graph), "--k", "0"]).code, 2);
    assert_eq!(cfguard(&["terrain", "peel"]).code, 2);
}
