use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const LOOP_A: &str = "surface orientable 1 1\nloop : a\n";
const TRIVIAL: &str = "surface planar_holes 0   # a disk\nloop :\n";
const TREFOIL: &str = "surface planar_holes 0
crossing x1
crossing x2
crossing x3
edge x1.0 x2.3 :
edge x1.1 x2.2 :
edge x1.2 x3.1 :
edge x1.3 x3.0 :
edge x2.0 x3.3 :
edge x2.1 x3.2 :
";

fn bandkh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandkh")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn loop_on_punctured_torus() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "loop.txt", LOOP_A);
    let o = bandkh(&["homology", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.contains(&"0\t0\ta:+1\t1\t-"));
    assert!(rows.contains(&"0\t0\ta:-1\t1\t-"));
    let agg = stdout(&bandkh(&["homology", s(&f), "--aggregate"]));
    assert_eq!(agg.lines().nth(1), Some("0\t0\tZ^2"));
}

#[test]
fn trivial_loop_rows() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "o.txt", TRIVIAL);
    let out = stdout(&bandkh(&["homology", s(&f), "--coefficients", "Q"]));
    assert_eq!(out, "i\tj\ts\trank\ttorsion\n0\t-2\t0\t1\t-\n0\t2\t0\t1\t-\n");
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "surface planar_holes 0\ncrossing x1\nedge x1.0 x1.9 :\n");
    let o = bandkh(&["homology", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3, column"));
    let rp2 = write(&dir, "rp2.txt", "surface rp2\n");
    let o = bandkh(&["homology", s(&rp2)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("RP2 and closed surfaces unsupported"));
    assert_eq!(bandkh(&["homology", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(bandkh(&["verify", s(&rp2), "--suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn verify_suites_pass_on_trefoil() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.txt", TREFOIL);
    for suite in ["d2", "euler", "reidemeister", "les", "duality"] {
        let o = bandkh(&["verify", s(&f), "--suite", suite]);
        let out = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{suite}\n{out}");
        assert!(out.lines().any(|l| l.starts_with("PASS ")));
        assert!(!out.contains("FAIL"));
    }
}

#[test]
fn corrupted_golden_table_fails() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.txt", TREFOIL);
    let golden = stdout(&bandkh(&["homology", s(&f)]));
    let good = write(&dir, "good.tsv", &golden);
    let o = bandkh(&["verify", s(&f), "--suite", "d2", "--golden", s(&good)]);
    assert_eq!(o.status.code(), Some(0));
    let corrupted = golden.replacen("\t1\t-\n", "\t2\t-\n", 1);
    assert_ne!(corrupted, golden);
    let bad = write(&dir, "bad.tsv", &corrupted);
    let o = bandkh(&["verify", s(&f), "--suite", "d2", "--golden", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL golden")));
}

#[test]
fn moves_round_trip_and_preserve_homology() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.txt", TREFOIL);
    let base = stdout(&bandkh(&["homology", s(&f)]));
    let sites = stdout(&bandkh(&["moves", s(&f), "--move", "r2", "--list"]));
    let site = sites.lines().next().expect("the trefoil has second move sites");
    let out = dir.path().join("r2.txt");
    let o = bandkh(&["moves", s(&f), "--move", "r2", "--site", site, "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("crossing")).count(), 5);
    assert_eq!(stdout(&bandkh(&["homology", s(&out)])), base);
    let again = stdout(&bandkh(&["moves", s(&out), "--move", "r1neg", "--site", "e0:right"]));
    let p = write(&dir, "again.txt", &again);
    let emitted = stdout(&bandkh(&["moves", s(&p), "--move", "r1neg", "--site", "e0"]));
    assert_eq!(emitted.lines().filter(|l| l.starts_with("crossing")).count(), 7);
}

#[test]
fn first_move_on_a_loop() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "o.txt", TRIVIAL);
    let out = stdout(&bandkh(&["moves", s(&f), "--move", "r1neg", "--site", "l0"]));
    assert_eq!(out.lines().filter(|l| l.starts_with("crossing")).count(), 1);
    let p = write(&dir, "k.txt", &out);
    let h = stdout(&bandkh(&["homology", s(&p)]));
    assert_eq!(h, "i\tj\ts\trank\ttorsion\n-1\t-5\t0\t1\t-\n-1\t-1\t0\t1\t-\n");
    let o = bandkh(&["moves", s(&f), "--move", "r1neg", "--site", "e5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bracket_and_euler() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "loop.txt", LOOP_A);
    assert_eq!(stdout(&bandkh(&["bracket", s(&f)])).trim(), "a ; 1*A^0");
    let o = bandkh(&["euler", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("a:+1\t1*A^0\t1*A^0"));
}
