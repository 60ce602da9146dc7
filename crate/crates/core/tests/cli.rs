use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use stabforge::games::{commutation_game, materialize, PauliStrategy};

fn stabforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabforge")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn report(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

fn write_game_and_strategy(dir: &Path) -> (String, String) {
    let game = commutation_game();
    let s = materialize(&game, &PauliStrategy::new(2, 0)).unwrap();
    let (g, p) = (dir.join("game.json"), dir.join("strategy.json"));
    fs::write(&g, serde_json::to_string(&game).unwrap()).unwrap();
    fs::write(&p, serde_json::to_string(&s).unwrap()).unwrap();
    (g.display().to_string(), p.display().to_string())
}

#[test]
fn verify_suite_succeeds() {
    let out = stabforge(&["verify", "pauli", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["tool"], "stabforge");
}

#[test]
fn out_file_and_csv() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bound.json");
    let out = stabforge(&["game", "dimbound", "--k", "4", "--delta", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(report(&path)["result"]["bound"], 16.0);

    let out = stabforge(&["game", "sweep", "--kind", "commutation", "--thetas", "0.1,0.2", "--seed", "3", "--format", "csv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert!(reader.headers().unwrap().iter().any(|h| h == "seed"));
    assert_eq!(reader.records().count(), 2);
}

#[test]
fn config_matches_flags_and_reproduces() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"version": 1, "seed": 5, "experiment": {"kind": "inequality-battery", "trials": 30, "max_dim": 3}}"#)
        .unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    for out in [&a, &b] {
        let o = stabforge(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let o = stabforge(&["stab", "battery", "--trials", "30", "--max-dim", "3", "--seed", "5", "--out", c.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&a), report(&b));
    assert_eq!(report(&a)["result"], report(&c)["result"]);
}

#[test]
fn valid_strategy_file_scores() {
    let dir = TempDir::new().unwrap();
    let (g, s) = write_game_and_strategy(dir.path());
    let out = stabforge(&["game", "value", "--game", &g, "--strategy", &s]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn corrupted_strategy_is_an_invariant_failure() {
    let dir = TempDir::new().unwrap();
    let (g, s) = write_game_and_strategy(dir.path());
    // double one projector: no longer idempotent, no longer sums to Id
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&s).unwrap()).unwrap();
    let first = v["pvms"].as_object_mut().unwrap().values_mut().next().unwrap();
    for row in first[0].as_array_mut().unwrap() {
        for entry in row.as_array_mut().unwrap() {
            for part in entry.as_array_mut().unwrap() {
                *part = Value::from(part.as_f64().unwrap() * 2.0);
            }
        }
    }
    fs::write(&s, v.to_string()).unwrap();
    let out = stabforge(&["game", "value", "--game", &g, "--strategy", &s]);
    assert_eq!(code(&out), 1);
    let err = stderr_json(&out);
    assert_eq!(err["error"], "invariant");
    assert!(err["invariant"].as_str().unwrap().contains("projective"));
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, r#"{"experiment": {"kind": "kappa", "mu": [0.5, 0.5], "extra": 1}}"#).unwrap();
    let missing = dir.path().join("missing.json");

    let cases: Vec<Vec<&str>> = vec![
        vec!["verify", "nonsense"],
        vec!["run", "--config", bad.to_str().unwrap()],
        vec!["run", "--config", unknown.to_str().unwrap()],
        vec!["run", "--config", missing.to_str().unwrap()],
        // sampled experiments need a seed
        vec!["stab", "battery", "--trials", "5"],
        vec!["stab", "kappa", "--mu", "0.5,0.25,0.25"],
        vec!["stab", "graph-rep", "--k", "3", "--edges", "0-9"],
        vec!["game", "dimbound", "--k", "3", "--delta", "1.5"],
        vec!["game", "build", "--kind", "dls", "--e", "10,011"],
        vec!["code", "build", "--family", "hadamard", "--t", "0"],
    ];
    for args in cases {
        let out = stabforge(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stderr_json(&out)["error"], "invalid-input", "{args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&stabforge(&["game", "perfect"])), 2);
    assert_eq!(code(&stabforge(&["frobnicate"])), 2);
}
