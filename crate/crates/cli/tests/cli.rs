use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const EMPTY_SHA256_32: &str = "c6f67e02e6e4e1bdefb994c6098953f34636ba2b6ca20a4721d2b26a886722ff";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_incmerkle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> Vec<String> {
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

fn init_toy(state: &Path, height: &str) {
    let o = run(&[
        "init",
        "--height",
        height,
        "--hash",
        "toy",
        "--state",
        state.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
}

#[test]
fn init_prints_empty_root() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    let o = run(&[
        "init",
        "--height",
        "3",
        "--hash",
        "toy",
        "--state",
        s.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), ["-1"]);
    assert_eq!(
        stdout(&run(&["root", "--state", s.to_str().unwrap()])),
        ["-1"]
    );

    let d = dir.path().join("d");
    let o = run(&[
        "init",
        "--height",
        "32",
        "--hash",
        "sha256",
        "--state",
        d.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), [EMPTY_SHA256_32]);
}

#[test]
fn init_rejects_bad_height_and_existing_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    for h in ["33", "0"] {
        let o = run(&[
            "init",
            "--height",
            h,
            "--hash",
            "toy",
            "--state",
            s.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(2));
        assert!(!s.exists());
    }
    init_toy(&s, "2");
    let o = run(&[
        "init",
        "--height",
        "3",
        "--hash",
        "toy",
        "--state",
        s.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "init",
        "--height",
        "3",
        "--hash",
        "toy",
        "--state",
        s.to_str().unwrap(),
        "--force",
    ]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&s).unwrap().contains("height=3\n"));
}

#[test]
fn deposit_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    init_toy(&s, "3");
    let o = run(&[
        "deposit",
        "--state",
        s.to_str().unwrap(),
        "3",
        "6",
        "2",
        "-2",
        "4",
    ]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o), ["2", "-4", "-6", "-8", "-12"]);
    assert_eq!(
        stdout(&run(&["root", "--state", s.to_str().unwrap()])),
        ["-12"]
    );
    assert!(!dir.path().join("s.lock").exists());
    assert!(!dir.path().join("s.tmp").exists());
}

#[test]
fn full_tree_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    init_toy(&s, "1");
    assert!(run(&["deposit", "--state", s.to_str().unwrap(), "5"])
        .status
        .success());
    let before = fs::read(&s).unwrap();
    let o = run(&["deposit", "--state", s.to_str().unwrap(), "6"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(fs::read(&s).unwrap(), before);

    let t = dir.path().join("t");
    init_toy(&t, "2");
    let o = run(&[
        "deposit",
        "--state",
        t.to_str().unwrap(),
        "1",
        "2",
        "3",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).is_empty());
}

#[test]
fn input_file_matches_positional_values() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    init_toy(&a, "3");
    init_toy(&b, "3");
    let input = dir.path().join("values.txt");
    fs::write(&input, "3\n6\n2\n-2\n4\n").unwrap();
    let oa = run(&[
        "deposit",
        "--state",
        a.to_str().unwrap(),
        "3",
        "6",
        "2",
        "-2",
        "4",
    ]);
    let ob = run(&[
        "deposit",
        "--state",
        b.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(oa.stdout, ob.stdout);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn malformed_values_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    init_toy(&s, "3");
    let before = fs::read(&s).unwrap();
    let o = run(&["deposit", "--state", s.to_str().unwrap(), "1", "x"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(fs::read(&s).unwrap(), before);

    let d = dir.path().join("d");
    run(&[
        "init",
        "--height",
        "4",
        "--hash",
        "sha256",
        "--state",
        d.to_str().unwrap(),
    ]);
    let o = run(&["deposit", "--state", d.to_str().unwrap(), "abcd"]);
    assert_eq!(o.status.code(), Some(4));
    let upper = "AB".repeat(32);
    let o = run(&["deposit", "--state", d.to_str().unwrap(), &upper]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&d).unwrap().contains(&"ab".repeat(32)));

    let text = String::from_utf8(before)
        .unwrap()
        .replace("count=0", "count=1");
    fs::write(&s, text).unwrap();
    assert_eq!(
        run(&["root", "--state", s.to_str().unwrap()]).status.code(),
        Some(5)
    );
}

#[test]
fn locked_state_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    init_toy(&s, "3");
    fs::write(dir.path().join("s.lock"), "1\n").unwrap();
    let o = run(&["deposit", "--state", s.to_str().unwrap(), "1"]);
    assert_eq!(o.status.code(), Some(7));
}

#[test]
fn zero_hash_table() {
    assert_eq!(
        stdout(&run(&["zero-hashes", "--height", "3", "--hash", "toy"])),
        ["0", "-1", "-1"]
    );
    let lines = stdout(&run(&["zero-hashes", "--height", "32", "--hash", "sha256"]));
    assert_eq!(lines.len(), 32);
    assert_eq!(lines[0], "0".repeat(64));
    assert_eq!(
        lines[1],
        "f5a5fd42d16a20302798ef6ed309979b43003d2320d9f0e8ea9831a92759fb4b"
    );
}

#[test]
fn check_passes_on_unmodified_build() {
    let o = run(&["check", "--max-height", "4", "--cases", "100"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let lines = stdout(&o);
    assert_eq!(lines.len(), 13);
    assert!(lines.iter().all(|l| l.contains("\"passed\":true")));
}

#[test]
fn check_fails_with_injected_fault() {
    let o = run(&[
        "check",
        "--max-height",
        "3",
        "--cases",
        "10",
        "--draws",
        "2",
        "--property",
        "oracle_root_agreement",
        "--inject-fault",
        "mutated-combiner",
    ]);
    assert_eq!(o.status.code(), Some(6));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shrunk counterexample"));
    assert_eq!(run(&["check", "--property", "nope"]).status.code(), Some(2));
}

#[test]
fn bench_reports_both_sides() {
    let o = run(&["bench", "--height", "10", "--n", "100"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("incremental_per_deposit="));
    assert!(text.contains("oracle_rebuild="));
    let o = run(&["bench", "--height", "20", "--n", "10"]);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("oracle_rebuild=skipped"));
    assert_eq!(
        run(&["bench", "--height", "2", "--n", "4"]).status.code(),
        Some(3)
    );
}
