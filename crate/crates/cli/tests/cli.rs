use std::path::PathBuf;
use std::process::{Command, Output};

fn instances() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn seqpatrol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqpatrol"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn instance(name: &str) -> String {
    instances().join(name).to_string_lossy().into_owned()
}

#[test]
fn fig3_solve_reports_equilibrium_path() {
    let out = seqpatrol(&[
        "solve",
        &instance("fig3.instance"),
        "--k",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(2).unwrap();
    assert_eq!(row, "sequential,2,vD,0,t1,vD v1 t2 v3 t1,");
}

#[test]
fn fig2_modes_differ() {
    let seq = seqpatrol(&[
        "solve",
        &instance("fig2.instance"),
        "--k",
        "2",
        "--format",
        "csv",
    ]);
    let sim = seqpatrol(&[
        "solve",
        &instance("fig2.instance"),
        "--k",
        "2",
        "--simultaneous",
        "--format",
        "csv",
    ]);
    let value = |o: &Output| {
        stdout(o)
            .lines()
            .nth(2)
            .unwrap()
            .split(',')
            .nth(3)
            .unwrap()
            .to_string()
    };
    assert_eq!(value(&seq), "-1");
    assert_eq!(value(&sim), "0");
}

#[test]
fn echo_line_comes_first() {
    let out = seqpatrol(&["table", "--k", "3"]);
    assert!(stdout(&out).starts_with("# seqpatrol table "));
}

#[test]
fn table_has_expected_rows() {
    let out = seqpatrol(&["table", "--k", "3,4", "--format", "csv"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows[0], "k,h,gamma_r,gamma_d,gamma_r_exact,gamma_d_exact");
    assert_eq!(rows[1], "3,1,0.87,0.50,0.875,0.5");
    assert!(rows[2].starts_with("4,2,0.69,0.33,0.6875,"));
}

#[test]
fn exit_codes() {
    assert_eq!(seqpatrol(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(seqpatrol(&["solve"]).status.code(), Some(2));
    let broken = seqpatrol(&["validate", &instance("broken.instance")]);
    assert_eq!(broken.status.code(), Some(3));
    assert!(!broken.stderr.is_empty());
    let budget = seqpatrol(&["oracle", &instance("paris.instance"), "--k", "2"]);
    assert_eq!(budget.status.code(), Some(4));
    let missing = seqpatrol(&["validate", "/nonexistent/file.instance"]);
    assert_eq!(missing.status.code(), Some(5));
}

#[test]
fn csv_output_is_deterministic() {
    let args = [
        "online",
        "--family",
        "randomized",
        "--k",
        "4",
        "--h",
        "2",
        "--trials",
        "2000",
        "--seed",
        "11",
        "--format",
        "csv",
    ];
    let a = seqpatrol(&args);
    let b = seqpatrol(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn generated_instances_validate() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["--family", "under-ratio", "--k", "3", "--guess", "2"],
        &["--family", "over-high", "--k", "2", "--guess", "5"],
        &["--family", "lower-bound", "--k", "4"],
        &["--family", "randomized", "--k", "3", "--h", "1"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let path = dir.path().join(format!("{i}.instance"));
        let path = path.to_string_lossy().into_owned();
        let mut args = vec!["generate"];
        args.extend_from_slice(case);
        args.extend_from_slice(&["-o", &path]);
        assert_eq!(seqpatrol(&args).status.code(), Some(0), "{case:?}");
        assert_eq!(
            seqpatrol(&["validate", &path]).status.code(),
            Some(0),
            "{case:?}"
        );
    }
}

#[test]
fn lower_bound_online_matches() {
    let out = seqpatrol(&[
        "online",
        "--family",
        "lower-bound",
        "--k",
        "4",
        "--policy",
        "first-alarm",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().nth(2).unwrap().contains("0.333333"), "{text}");
}
