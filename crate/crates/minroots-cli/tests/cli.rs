//! End-to-end tests of the command-line interface: file formats, output,
//! and exit codes.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minroots"))
}

fn matrix_file(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

const FIG1: &str = "3\n1 3 4\n3 1 3\n4 3 1\n";
const A2: &str = "2\n1 3\n3 1\n";

#[test]
fn build_prints_count() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(&dir, "fig1.cox", FIG1);
    let out = bin().arg("build").arg(&m).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "N=7\n");
}

#[test]
fn build_algorithms_write_identical_canonical_files() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(&dir, "fig1.cox", FIG1);
    let out_naive = dir.path().join("naive.mrt");
    let out_brink = dir.path().join("brink.mrt");
    assert!(bin()
        .args(["build", m.to_str().unwrap(), "--algo", "naive", "--out"])
        .arg(&out_naive)
        .status()
        .unwrap()
        .success());
    assert!(bin()
        .args(["build", m.to_str().unwrap(), "--algo", "brink", "--out"])
        .arg(&out_brink)
        .status()
        .unwrap()
        .success());
    let a = std::fs::read(&out_naive).unwrap();
    let b = std::fs::read(&out_brink).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "canonical table files must be byte-identical");
}

#[test]
fn reduce_and_mult() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(&dir, "a2.cox", A2);
    let out = bin().args(["reduce", m.to_str().unwrap(), "2 1 2"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1 2 1\n");

    let out = bin().args(["mult", m.to_str().unwrap(), "1", "2 1"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1 2 1\n");

    // Identity renders as "e".
    let out = bin().args(["mult", m.to_str().unwrap(), "1", "1"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "e\n");
}

#[test]
fn growth_output() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(&dir, "a2.cox", A2);
    let out = bin().args(["growth", m.to_str().unwrap(), "--max-len", "3"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0: 1\n1: 2\n2: 2\n3: 1\n");
}

#[test]
fn stats_output() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(&dir, "fig1.cox", FIG1);
    let out = bin().args(["stats", m.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("N=7"), "{text}");
    assert!(text.contains("depth 1: 3"), "{text}");
    assert!(text.contains("build time:"), "{text}");
}

#[test]
fn verify_passes_and_fails_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(&dir, "a2.cox", A2);
    let out = bin().args(["verify", m.to_str().unwrap(), "--ball", "4"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("CHECK builder_equivalence PASS"), "{text}");
    assert!(text.contains("verify: PASS"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // Usage error: unknown subcommand.
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Usage error: malformed word.
    let m = matrix_file(&dir, "a2.cox", A2);
    let out = bin().args(["reduce", m.to_str().unwrap(), "9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Invalid matrix.
    let bad = matrix_file(&dir, "bad.cox", "2\n1 1\n1 1\n");
    let out = bin().args(["build", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Missing file is also an invalid matrix.
    let out = bin().args(["build", dir.path().join("nope.cox").to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Resource cap.
    let m = matrix_file(&dir, "fig1.cox", FIG1);
    let out = bin().args(["build", m.to_str().unwrap(), "--max-roots", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    // Help exits 0.
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(&dir, "fig1.cox", FIG1);
    let run = || bin().args(["verify", m.to_str().unwrap(), "--ball", "5"]).output().unwrap().stdout;
    assert_eq!(run(), run());
}
