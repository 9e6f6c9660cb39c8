use std::path::Path;
use std::process::{Command, Output};

fn resistnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resistnet"))
        .args(args)
        .env_remove("RESISTNET_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn polys_prints_coefficient_rows() {
    let out = resistnet(&["polys", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,p_coeffs,q_coeffs");
    assert_eq!(rows[1], "1,1,1;1");
    assert_eq!(rows[2], "2,2;1,1;1;2;1");
    assert_eq!(rows.len(), 4);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(resistnet(&["polys", "--n-max", "0"]).status.code(), Some(64));
    assert_eq!(resistnet(&["walk", "--model", "ab-line", "--A", "0.5", "--B", "2"]).status.code(), Some(64));
    assert_eq!(resistnet(&["graph", "--model", "dyadic-tree", "--N", "40"]).status.code(), Some(64));
    assert_eq!(resistnet(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(resistnet(&["energy", "--graph", "/nonexistent", "--vector", "/nonexistent"]).status.code(), Some(64));
}

#[test]
fn wrong_weights_fail_the_embedding_claim() {
    let out = resistnet(&["embed", "--N", "5", "--trials", "10", "--wrong-psi"]);
    assert_eq!(out.status.code(), Some(2));
    let ok = resistnet(&["embed", "--N", "5", "--trials", "10"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn shallow_embedding_warns() {
    let out = resistnet(&["embed", "--N", "2", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stderr.is_empty());
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_resistnet"));
        cmd.args(["walk", "--model", "half-line", "--M", "2", "--trials", "500"]);
        match seed {
            Some(s) => cmd.env("RESISTNET_SEED", s),
            None => cmd.env_remove("RESISTNET_SEED"),
        };
        stdout(&cmd.output().unwrap())
    };
    assert_eq!(run(Some("9")), run(Some("9")));
    assert_ne!(run(Some("9")), run(Some("10")));
    let json: serde_json::Value = serde_json::from_str(&run(Some("9"))).unwrap();
    assert_eq!(json["config"]["seed"], 9);
}

#[test]
fn replay_reproduces_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("walk.json");
    let first = resistnet(&["walk", "--model", "sym-line", "--M", "3", "--trials", "2000", "--seed", "4", "--report", path(&report)]);
    assert_eq!(first.status.code(), Some(0));
    let second = resistnet(&["replay", path(&report)]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));

    // the echo line at the top of text output works too
    let table = dir.path().join("polys.csv");
    let polys = resistnet(&["polys", "--n-max", "4", "--xi", "1/3"]);
    std::fs::write(&table, stdout(&polys)).unwrap();
    assert_eq!(stdout(&resistnet(&["replay", path(&table)])), stdout(&polys));
}

#[test]
fn energy_of_exported_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let vector = dir.path().join("v.csv");
    let out = resistnet(&["graph", "--model", "half-line", "--M", "2", "--N", "3"]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::write(&graph, stdout(&out)).unwrap();
    // u(n) = n on c(n−1, n) = 2ⁿ: energy 2 + 4 + 8
    std::fs::write(&vector, "vertex,value\n0,0\n1,1\n2,2\n3,3\n").unwrap();
    let report = dir.path().join("e.json");
    let e = resistnet(&["energy", "--graph", path(&graph), "--vector", path(&vector), "--report", path(&report)]);
    assert_eq!(e.status.code(), Some(0), "{}", String::from_utf8_lossy(&e.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!((json["energy"].as_f64().unwrap() - 14.0).abs() < 1e-12);
}
