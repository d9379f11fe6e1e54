use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CUBE: &str = "v 1\nv 2\nv 3\nv 4\nv 5\nv 6\nv 7\nv 8\n\
e 1 2\ne 2 3\ne 3 4\ne 4 1\ne 5 6\ne 6 7\ne 7 8\ne 8 5\ne 1 5\ne 2 6\ne 3 7\ne 4 8\n";
const K4: &str = "v 1\nv 2\nv 3\nv 4\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regcover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cover_writes_a_certificate_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "cube.graph", CUBE);
    let h = write(dir.path(), "k4.graph", K4);
    let cert = dir.path().join("cert.txt");
    let out = run(&["cover", s(&g), s(&h), "--certificate", s(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "yes k=2");

    let out = run(&["verify", s(&g), s(&h), s(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("regular=true"));

    // Breaking one group element must be caught.
    let text = std::fs::read_to_string(&cert).unwrap();
    let bad = text.replacen("g 2: 13 14", "g 2: 14 13", 1);
    assert_ne!(bad, text);
    let bad_cert = write(dir.path(), "bad.txt", &bad);
    let out = run(&["verify", s(&g), s(&h), s(&bad_cert)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "cube.graph", CUBE);
    let h = write(dir.path(), "k4.graph", K4);
    assert_eq!(run(&["cover", s(&h), s(&g)]).status.code(), Some(1));
    let broken = write(dir.path(), "broken.graph", "v 1\ne 1 9\n");
    assert_eq!(run(&["cover", s(&broken), s(&h)]).status.code(), Some(2));
    let missing = dir.path().join("missing.graph");
    assert_eq!(run(&["cover", s(&missing), s(&h)]).status.code(), Some(2));
}

#[test]
fn deterministic_json_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "cube.graph", CUBE);
    let h = write(dir.path(), "k4.graph", K4);
    let args = ["cover", s(&g), s(&h), "--json", "--deterministic"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["status"], "yes");
    assert_eq!(v["k"], 2);
    for key in ["branches_tried", "cores_tried", "wall_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn aut_and_quotients() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "cube.graph", CUBE);
    let out = run(&["aut", s(&g), "--order-only"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "order 48");

    let ours = run(&["quotients", s(&g), "--dedup"]);
    let oracle = run(&["oracle", "quotients", s(&g)]);
    let last = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().last().unwrap().to_string();
    assert_eq!(last(&ours), last(&oracle));

    let qdir = dir.path().join("q");
    let out = run(&["quotients", s(&g), "--dedup", "-k", "2", "--out", s(&qdir)]);
    assert_eq!(out.status.code(), Some(0));
    let files = std::fs::read_dir(&qdir).unwrap().count();
    assert!(files > 0);
}

#[test]
fn ivmatch_command() {
    let dir = tempfile::tempdir().unwrap();
    let yes = write(dir.path(), "yes.iv", "level even\ncluster 2\nlevel odd\ncluster 1\nadj 0 1\n");
    let out = run(&["ivmatch", s(&yes)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("solvable"));
    let no = write(dir.path(), "no.iv", "level odd\ncluster 1\nlevel even\ncluster 2\nadj 0 1\n");
    assert_eq!(run(&["ivmatch", s(&no)]).status.code(), Some(1));
    assert_eq!(run(&["ivmatch", s(&no), "--brute-force"]).status.code(), Some(1));
}

#[test]
fn reduce_prints_a_series() {
    let dir = tempfile::tempdir().unwrap();
    // Two triangles sharing an edge plus a pendant path.
    let g = write(dir.path(), "g.graph", "v 1\nv 2\nv 3\nv 4\nv 5\ne 1 2\ne 2 3\ne 3 1\ne 2 4\ne 4 3\ne 1 5\n");
    let out = run(&["reduce", s(&g)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("primitive:"));
}
