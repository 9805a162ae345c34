use std::process::Command;

use ellchi_cli::args::Format;
use ellchi_cli::output::OutputRecord;
use ellchi_cli::{verify, EXIT_INVALID, EXIT_OK, EXIT_VERIFY};
use ellchi_core::formulas;
use ellchi_core::oracles::{CheckRecord, Overrides, Report, Status, Suite};
use ellchi_core::{Engine, Scalar};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = ellchi_cli::run(
        std::iter::once("ellchi").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn lattice_count(d: i64) -> i64 {
    (0..=d / 4).filter(|a| (d - 4 * a) % 6 == 0).count() as i64
}

#[test]
fn single_values() {
    assert_eq!(
        run(&["chi", "--n", "1", "--hodge", "0", "--exps", "4"]).1,
        "1\n"
    );
    assert_eq!(
        run(&["chi", "--n", "2", "--hodge", "0", "--exps", "1,1"]).1,
        "0\n"
    );
    assert_eq!(
        run(&["chi", "--n", "2", "--exps", "0,0", "--mode", "series"]).1,
        "1\n"
    );
}

#[test]
fn invalid_input_exits_2() {
    let (code, out, err) = run(&["chi", "--n", "0", "--exps", "1"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.is_empty());
    assert!(err.contains("n must be at least 1"), "{err}");

    for args in [
        &["chi", "--n", "2", "--exps", "1"][..],
        &["chi", "--n", "1", "--exps", "x"],
        &["chi", "--n", "1", "--exps", "1", "--mode", "fast"],
        &["chi", "--n", "6", "--exps", "-1,0,0,0,0,0"],
        &["genfun", "--n", "5"],
        &["genfun", "--n", "2", "--m", "3"],
        &["table", "--n", "2", "--exps", "0..1,0..1,0..1"],
        &["chi", "--n", "1", "--exps", "1", "--jobs", "0"],
        &["cache", "clear", "--no-cache"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).0, EXIT_INVALID, "{args:?}");
    }
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify"));
}

#[test]
fn csv_table_matches_lattice_count() {
    let (code, out, _) = run(&["table", "--n", "1", "--exps", "0..30", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,hodge,d1,chi"));
    for (d, line) in (0..=30).zip(lines) {
        assert_eq!(line, format!("1,0,{d},{}", lattice_count(d)));
    }
    assert!(out.contains("\n1,0,12,2\n"));
}

#[test]
fn empty_table_is_header_only() {
    let (code, out, _) = run(&["table", "--n", "2", "--exps", "3..1", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "n,hodge,d1,d2,chi\n");
}

#[test]
fn table_rows_are_lexicographic() {
    let (_, out, _) = run(&[
        "table", "--n", "2", "--hodge", "-1..0", "--exps", "0..1", "--format", "csv",
    ]);
    let keys: Vec<Vec<i64>> = out
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .skip(1)
                .take(3)
                .map(|x| x.parse().unwrap())
                .collect()
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(keys.len(), 8);
}

#[test]
fn json_records() {
    let (code, out, _) = run(&["table", "--n", "1", "--exps", "10..12", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with('\n'));
    let recs: Vec<OutputRecord> = serde_json::from_str(&out).unwrap();
    let chis: Vec<String> = recs.iter().map(|r| r.chi.to_string()).collect();
    assert_eq!(chis, ["1", "0", "2"]);
    assert!(recs.iter().all(|r| r.mode == ellchi_core::Mode::Exact));
    let (_, single, _) = run(&["chi", "--n", "1", "--exps", "12", "--format", "json"]);
    let rec: OutputRecord = serde_json::from_str(&single).unwrap();
    assert_eq!(rec, recs[2]);
}

#[test]
fn genfun_is_canonical_serialization() {
    let (code, out, _) = run(&["genfun", "--n", "1", "--m", "0"]);
    assert_eq!(code, EXIT_OK);
    let parsed = ellchi_core::arith::parse_rational_function(out.trim(), 2).unwrap();
    assert_eq!(parsed, formulas::one_point_linv(2, 0));
    assert_eq!(parsed.to_string(), out.trim());
}

#[test]
fn series_dump() {
    let (code, out, _) = run(&["series", "--n", "1", "--order", "12", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("q,q1,coefficient\n"));
    assert!(out.contains("\n0,12,2\n"));
    let (_, text, _) = run(&["series", "--n", "1", "--order", "12"]);
    assert!(text.contains("2*q1^12"), "{text}");
}

#[test]
fn jobs_do_not_change_output() {
    let base = [
        "table",
        "--n",
        "3",
        "--hodge",
        "-1..1",
        "--exps",
        "-1..1",
        "--no-cache",
    ];
    let one = run(&[&base[..], &["--jobs", "1"]].concat());
    let many = run(&[&base[..], &["--jobs", "3"]].concat());
    assert_eq!(one.0, EXIT_OK, "{}", one.2);
    assert_eq!(one.1, many.1);
    assert_eq!(one.1, run(&[&base[..], &["--jobs", "1"]].concat()).1);
}

#[test]
fn cache_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["cache", "warm", "--n", "2", "--cache", p]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "warmed 5 entries\n");
    let (_, info, _) = run(&["cache", "info", "--cache", p]);
    assert!(
        info.contains("entries: 5\n") && info.contains("P(2,2)"),
        "{info}"
    );
    let (_, cleared, _) = run(&["cache", "clear", "--cache", p]);
    assert!(cleared.starts_with("removed"));
    assert!(!path.exists());
    let (_, again, _) = run(&["cache", "clear", "--cache", p]);
    assert!(again.starts_with("no cache file"));
}

#[test]
fn no_cache_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    let p = path.to_str().unwrap();
    run(&[
        "chi",
        "--n",
        "2",
        "--exps",
        "1,1",
        "--cache",
        p,
        "--no-cache",
    ]);
    assert!(!path.exists());
    let (_, info, _) = run(&["cache", "info", "--no-cache"]);
    assert_eq!(info, "cache disabled\n");
}

fn report_of(bytes: &[u8]) -> Report {
    serde_json::from_slice(bytes).unwrap()
}

fn find<'a>(r: &'a Report, name: &str) -> &'a CheckRecord {
    r.checks.iter().find(|c| c.name == name).unwrap()
}

#[test]
fn fast_suite_passes() {
    let (code, out, _) = run(&["verify", "--suite", "fast"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.lines().take(5).all(|l| l.starts_with("PASS ")));
    let (_, json, _) = run(&["verify", "--format", "json"]);
    let r = report_of(json.as_bytes());
    assert_eq!(r.suite, Suite::Fast);
    assert!(r.passed());
}

#[test]
fn full_suite_and_corrupted_constant() {
    let engine = Engine::default();
    let (bytes, _) = verify(Suite::All, &engine, &Overrides::default(), Format::Json);
    let good = report_of(&bytes);
    assert!(good.checks.len() >= 10);
    assert_eq!(find(&good, "p1_stratum").status, Status::Pass);

    let overrides = Overrides {
        sigma4: Some(formulas::sigma4_with_constant(Scalar::new(
            1.into(),
            4.into(),
        ))),
    };
    let (bytes, code) = verify(Suite::All, &engine, &overrides, Format::Json);
    assert_eq!(code, EXIT_VERIFY);
    let bad = report_of(&bytes);
    let p1 = find(&bad, "p1_stratum");
    assert_eq!(p1.status, Status::Fail);
    assert!(p1.witness.is_some());
    for c in &good.checks {
        if c.name != "p1_stratum" {
            assert_eq!(find(&bad, &c.name).status, c.status, "{}", c.name);
        }
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ellchi");
    let ok = Command::new(bin)
        .args(["chi", "--n", "1", "--exps", "6", "--no-cache"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(ok.stdout, b"1\n");
    let bad = Command::new(bin)
        .args(["chi", "--n", "0", "--exps", "1"])
        .env_remove("ELLCHI_CACHE")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("n must be at least 1"));
}

#[test]
fn cache_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env.txt");
    let out = Command::new(env!("CARGO_BIN_EXE_ellchi"))
        .args(["chi", "--n", "1", "--exps", "12"])
        .env("ELLCHI_CACHE", &path)
        .output()
        .unwrap();
    assert_eq!(out.stdout, b"2\n");
    assert!(path.exists());
}
