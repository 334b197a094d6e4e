//! Drives the `khessian` binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use khessian::{GridField, GridSpec};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khessian")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn identities_pass_and_are_deterministic() {
    let a = run(&["identities", "--seed", "3", "--trials", "5"]);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    let b = run(&["identities", "--seed", "3", "--trials", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["identities", "--trials", "0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["lemma31", "--k", "4", "--n", "3"])), 2);
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn scaling_writes_reproducible_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "# oscillation family\nfamily = sect4\nm_list = 4,8,16\n");
    let out1 = tmp.path().join("a");
    let out2 = tmp.path().join("b");
    let r = run(&["scaling", "--config", &cfg, "--out", out1.to_str().unwrap(), "--plot"]);
    assert_eq!(code(&r), 0, "{}", stdout(&r));
    assert!(stdout(&r).contains("PASS pairing_slope"));
    run(&["scaling", "--config", &cfg, "--out", out2.to_str().unwrap()]);
    let csv = fs::read_to_string(out1.join("report.csv")).unwrap();
    assert!(csv.starts_with("m,grid_points,norm_sp,pairing\n"));
    assert_eq!(csv.lines().count(), 4);
    assert_eq!(csv, fs::read_to_string(out2.join("report.csv")).unwrap());
    let manifest = fs::read_to_string(out1.join("manifest.txt")).unwrap();
    assert!(manifest.contains("seed = 1") && manifest.contains("version = "));
    let svg = fs::read_to_string(out1.join("sect4.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<circle"));
    assert!(!out2.join("sect4.svg").exists());
}

#[test]
fn bad_configs_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    for text in ["family = sect4\ncolour = red\n", "n = 3\n", "family = sect4\nm_list = 8,4,16\n"] {
        let cfg = write_config(tmp.path(), text);
        assert_eq!(code(&run(&["scaling", "--config", &cfg, "--out", out])), 2, "{text:?}");
    }
    assert_eq!(code(&run(&["scaling", "--config", "/nonexistent/run.cfg", "--out", out])), 2);
}

#[test]
fn embedding_and_radial_check() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("table.csv");
    let r = run(&["embedding", "--k", "3", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&r), 0);
    let table = fs::read_to_string(&path).unwrap();
    assert_eq!(table.lines().count(), 401);
    assert!(table.lines().skip(1).all(|l| l.ends_with(",true")));
    let r = run(&["lemma31", "--k", "2", "--n", "2"]);
    assert_eq!(code(&r), 0, "{}", stdout(&r));
    assert_eq!(stdout(&r).matches("PASS").count(), 2);
}

#[test]
fn norm_and_pairing_on_field_files() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = GridSpec::cube(2, -1.0, 1.0, 41).unwrap();
    let u = GridField::sample(&grid, |x| 0.5 * x[0] * x[0] + 1.5 * x[1] * x[1]).unwrap();
    let phi = GridField::sample(&grid, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 < 0.64 {
            (1.0 - r2 / 0.64).powi(4)
        } else {
            0.0
        }
    })
    .unwrap();
    let (uf, pf) = (tmp.path().join("u.txt"), tmp.path().join("phi.txt"));
    u.write_file(&uf).unwrap();
    phi.write_file(&pf).unwrap();
    let (uf, pf) = (uf.to_str().unwrap(), pf.to_str().unwrap());

    let r = run(&["norm", "--field", uf, "--s", "1.5", "--p", "2", "--budget", "5000"]);
    assert_eq!(code(&r), 0);
    assert!(stdout(&r).starts_with("method,s,p,w1p,seminorm,total,budget,seed\ngagliardo,"));

    // det D^2 u = 3 everywhere, so the pairing is 3 int phi
    let r = run(&["pairing", "--field", uf, "--phi", pf, "--k", "2"]);
    assert_eq!(code(&r), 0);
    let value: f64 = stdout(&r).lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((value - 3.0 * phi.integrate()).abs() < 1e-9 * value.abs());
    let r = run(&["pairing", "--field", uf, "--phi", pf, "--k", "2", "--method", "weak2"]);
    assert_eq!(code(&r), 0);
    assert_eq!(code(&run(&["pairing", "--field", uf, "--phi", pf, "--k", "2", "--method", "separable"])), 2);
    assert_eq!(code(&run(&["pairing", "--field", uf, "--phi", pf, "--k", "3"])), 2);
}

#[test]
fn continuity_sweep_small() {
    let r = run(&["continuity", "--samples", "8", "--points", "16", "--budget", "3000"]);
    assert_eq!(code(&r), 0, "{}", stdout(&r));
    assert!(stdout(&r).starts_with("PASS continuity_ratio"));
}
