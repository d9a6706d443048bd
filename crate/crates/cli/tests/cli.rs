use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractalcss"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn piped(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fractalcss"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn gen_prints_dimension() {
    let o = run(&[
        "gen", "--dim", "3", "--p", "3", "--q", "1", "--level", "1", "--holes", "m",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("D_H=2.9656"));
    let o = run(&[
        "gen", "--dim", "3", "--p", "6", "--q", "4", "--level", "1", "--holes", "m",
    ]);
    assert!(stdout(&o).contains("D_H=2.8039"));
}

#[test]
fn gen_level_zero_is_plain() {
    let o = run(&["gen", "--dim", "2", "--p", "3", "--q", "1", "--level", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("holes 0"));
}

#[test]
fn odd_gap_is_a_validation_error() {
    let o = run(&["gen", "--p", "4", "--q", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pipeline_composes() {
    let complex = run(&["gen", "--level", "1", "--out", "-"]);
    assert!(complex.status.success());
    let code = piped(&["code", "--complex", "-"], &complex.stdout);
    assert!(code.status.success());
    let d = piped(&["distance", "--code", "-"], &code.stdout);
    assert_eq!(
        stdout(&d),
        "dz=3 kind=certified_above_2 verified=true\ndx=3 kind=certified_above_2 verified=true\n"
    );
    let d = piped(&["distance", "--complex", "-"], &complex.stdout);
    assert_eq!(
        stdout(&d),
        "dz=3 kind=exact verified=true\ndx=8 kind=exact verified=true\n"
    );
    let p = piped(&["params", "--complex", "-"], &complex.stdout);
    assert!(stdout(&p).contains("k=1"));
}

#[test]
fn scan_is_reproducible_across_threads() {
    let a = run(&["scan", "--levels", "1..2", "--threads", "1"]);
    let b = run(&["scan", "--levels", "1..2", "--threads", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        stdout(&a),
        "n,p,q,level,L,k,dz,dz_kind,dx,dx_kind,seconds\n3,3,1,1,3,1,3,exact,8,exact,\n3,3,1,2,9,1,9,exact,64,exact,\n"
    );
}

#[test]
fn scan_e_holes() {
    let o = run(&["scan", "--holes", "e", "--level", "2"]);
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let f: Vec<&str> = row.split(',').collect();
    assert_eq!(f[5], "28");
    assert!(f[6].parse::<usize>().unwrap() <= 2);
}

#[test]
fn gate_check_exit_codes() {
    let pass = run(&["gate-check", "ccz", "--vb", "--L", "2"]);
    assert_eq!(pass.status.code(), Some(0));
    assert!(!stdout(&pass).contains("FAIL"));
    let fail = run(&["gate-check", "ccz", "--vb", "--L", "3", "--hole", "center"]);
    assert_eq!(fail.status.code(), Some(4));
    assert!(stdout(&fail).contains("FAIL witness: a="));
    assert_eq!(
        run(&["gate-check", "s", "--colorcode", "--L", "2"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["gate-check", "cz", "--L", "3"]).status.code(),
        Some(0)
    );
    assert_eq!(run(&["gate-check", "ccz"]).status.code(), Some(2));
    assert_eq!(
        run(&["gate-check", "ccz", "--vb", "--L", "2", "--hole", "center"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn reports_are_byte_identical() {
    let a = run(&["gate-check", "ccz", "--vb", "--L", "3", "--hole", "center"]);
    let b = run(&["gate-check", "ccz", "--vb", "--L", "3", "--hole", "center"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = Command::new(env!("CARGO_BIN_EXE_fractalcss"))
        .args([
            "distance",
            "--method",
            "exhaustive",
            "--type",
            "x",
            "--w-max",
            "6",
            "--level",
            "1",
        ])
        .env("FRACTALCSS_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn homology_and_lefschetz() {
    let o = run(&["homology", "--primal", "--lefschetz"]);
    let s = stdout(&o);
    assert!(s.contains("betti=1\n"));
    assert!(s.contains("PASS"));
}

#[test]
fn merge_reports_parity() {
    let s = stdout(&run(&["merge", "--level", "1"]));
    assert!(s.contains("k_merged=1\n"));
    assert!(s.contains("parity_identity=PASS\n"));
}

#[test]
fn export_writes_all_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fc");
    let o = run(&["export", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    for f in ["complex.txt", "code.txt", "hx.txt", "hz.txt", "params.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let params = std::fs::read_to_string(out.join("params.txt")).unwrap();
    assert!(params.contains("k=1"));
}

#[test]
fn mixed_hole_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("holes.txt");
    std::fs::write(&path, "# centre hole rough\nhole 0 e\n").unwrap();
    let holes = format!("mixed:{}", path.display());
    let mixed = stdout(&run(&["params", "--holes", &holes]));
    let rough = stdout(&run(&["params", "--holes", "e"]));
    assert_eq!(mixed, rough);
    std::fs::write(&path, "hole zero e\n").unwrap();
    assert_eq!(run(&["params", "--holes", &holes]).status.code(), Some(2));
}

#[test]
fn table1_rows() {
    let s = stdout(&run(&["table1"]));
    assert!(s
        .lines()
        .any(|l| l.starts_with("FC(3;1),3,3,1,2.9656,1.8928,3;9,3;9,8;64,1.8928,")));
    assert!(s
        .lines()
        .any(|l| l.starts_with("FC(6;4),3,6,4,2.8039,1.6720,")));
}
