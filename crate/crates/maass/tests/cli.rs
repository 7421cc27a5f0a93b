//! End-to-end runs of the `maass` binary.

use std::path::Path;
use std::process::{Command, Output};

use maass::report::parse;

fn maass(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maass"))
        .args(args)
        .env("MAASS_CACHE_DIR", cache)
        .output()
        .expect("running maass")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 output")
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .expect("column present")
}

#[test]
fn weight_sweep_forms_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = maass(&["weights", "--sweep", "--samples", "200"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows, _) = parse(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 200);
    let pairs = [("q_direct", "q_piecewise"), ("q1_direct", "q1_piecewise")];
    for (a, b) in pairs {
        let (i, j) = (column(&header, a), column(&header, b));
        for r in &rows {
            let (x, y): (f64, f64) = (r[i].parse().unwrap(), r[j].parse().unwrap());
            assert!(
                (x - y).abs() <= 1e-12 * (1.0 + x.abs()),
                "{a} {x} vs {b} {y}"
            );
        }
    }
}

#[test]
fn output_is_deterministic_in_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, file: &str| {
        let path = dir.path().join(file);
        let out = maass(
            &[
                "--seed",
                seed,
                "--output",
                path.to_str().unwrap(),
                "weights",
                "--sweep",
                "--samples",
                "50",
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        std::fs::read(path).unwrap()
    };
    let a = run("5", "a.csv");
    assert_eq!(a, run("5", "b.csv"));
    assert_ne!(a, run("6", "c.csv"));
    let text = String::from_utf8(a).unwrap();
    assert!(text.lines().last().unwrap().starts_with("# maass "));
}

#[test]
fn missing_cache_is_a_capacity_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("nothing-here");
    let out = maass(&["moment"], &empty);
    assert_eq!(out.status.code(), Some(69), "{}", stderr(&out));
}

#[test]
fn usage_errors_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let out = maass(&["weights", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("--bogus"));

    let out = maass(&["bounds", "--eps", "0"], dir.path());
    assert_eq!(out.status.code(), Some(64), "{}", stderr(&out));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# sweep settings\nsweep = true\nsamples = 7\nseed = 3\n",
    )
    .unwrap();
    let cfg_arg = cfg.to_str().unwrap();

    let out = maass(&["--config", cfg_arg, "weights"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (_, rows, notes) = parse(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 7);
    assert!(notes.iter().any(|n| n.contains("samples")), "{notes:?}");

    let out = maass(
        &["--config", cfg_arg, "weights", "--samples", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(parse(&stdout(&out)).unwrap().1.len(), 3);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let out = maass(&["--config", cfg_arg, "weights"], dir.path());
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("colour"));
}

#[test]
fn solve_writes_a_readable_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = maass(
        &[
            "solve",
            "--parity",
            "odd",
            "--window",
            "9:10",
            "--n-coeffs",
            "200",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows, _) = parse(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 1);
    let t: f64 = rows[0][column(&header, "t")].parse().unwrap();
    assert!((t - 9.533695261354).abs() < 1e-9, "t = {t}");

    let forms = maass::cache::read_all(dir.path()).unwrap();
    assert_eq!(forms.len(), 1);
    assert!((forms[0].t - t).abs() < 1e-12);
    assert!((forms[0].coefficient(1) - 1.0).abs() < 1e-12);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = maass(&["selftest"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}\n{}",
        stdout(&out),
        stderr(&out)
    );
}
