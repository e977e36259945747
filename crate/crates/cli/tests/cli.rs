use std::process::Command as Process;

use betagamma_cli::table::Cell;
use betagamma_cli::{args, emit_convergence_report, parse_generator, run, Command, RunConfig};

fn parse(line: &str) -> RunConfig {
    args::parse(std::iter::once("betagamma").chain(line.split_whitespace())).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let header: Vec<&str> = csv
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    data_rows(csv).into_iter().map(|r| r[idx].clone()).collect()
}

#[test]
fn eval_beta_one_two() {
    let out = run(&parse("eval --fn beta --x 1 --y 2"));
    assert_eq!(out.exit_code, 0);
    let v: f64 = column(&out.csv, "value")[0].parse().unwrap();
    assert!((v - 0.5).abs() < 1e-14);
}

#[test]
fn ray_krull_matches_oracle() {
    let out = run(&parse(
        "ray --k 1 --method krull --xs 0.5:4.5:0.5 --tol 1e-10",
    ));
    assert_eq!(out.exit_code, 0);
    let errs = column(&out.csv, "rel_err");
    assert_eq!(errs.len(), 9);
    assert!(errs.iter().all(|e| e.parse::<f64>().unwrap() < 1e-8));
}

#[test]
fn header_echoes_parameters() {
    let out = run(&parse("ray --k 1 --method gm --xs 1:2:1"));
    let comments: Vec<&str> = out.csv.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(comments.contains(&"# k = 1"));
    assert!(comments.contains(&"# method = gm"));
    assert!(comments.contains(&"# xs = 1:2:1"));
    assert!(comments.iter().any(|l| l.starts_with("# tol = ")));
}

#[test]
fn certify_final_corollary() {
    let out = run(&parse("certify --target final-corollary --grid 0.5:4:0.5"));
    assert_eq!(out.exit_code, 0);
    assert_eq!(out.summary.last().unwrap(), "3/3 hypotheses pass");
    let out = run(&parse(
        "certify --target final-corollary --grid 0.5:4:0.5 --perturb 0.1",
    ));
    assert_eq!(
        out.exit_code, 0,
        "a failed certificate is still a successful run"
    );
    assert_eq!(out.summary.last().unwrap(), "2/3 hypotheses pass");
}

#[test]
fn certify_ray_concavity() {
    let out = run(&parse(
        "certify --target ray-concavity --grid 0.1:10:0.3 --ks 0:10:2.5",
    ));
    assert_eq!(out.exit_code, 0);
    assert!(column(&out.csv, "ok").iter().all(|v| v == "true"));
}

#[test]
fn betatype_equality_and_fit() {
    let out = run(&parse(
        "betatype --g1 gamma --g2 expgamma:-1 --grid 0.5:5:0.5",
    ));
    assert_eq!(out.exit_code, 0);
    assert!(out.summary[0].contains(" = "), "{:?}", out.summary);
    let out = run(&parse("betatype --g1 gamma --g2 2*gamma --grid 0.5:5:0.5"));
    assert!(out.summary[0].contains(" ≠ "), "{:?}", out.summary);
    assert!(run(&parse("betatype --g1 gamma --g2 exp:1 --grid 1:2:1")).exit_code == 1);
}

#[test]
fn generator_labels() {
    for label in [
        "gamma",
        "identity",
        "power:2",
        "exp:3",
        "expgamma:-2",
        "2*gamma",
        "0.5*power:1",
    ] {
        assert!(parse_generator(label).is_ok(), "{label}");
    }
    for label in ["gamma:1", "power", "-1*gamma", "beta"] {
        assert!(parse_generator(label).is_err(), "{label}");
    }
}

#[test]
fn scan_example_is_concave_across() {
    let out = run(&parse("scan --fn example --h 1,-1 --xs -2:2:1"));
    assert_eq!(out.exit_code, 0);
    assert!(column(&out.csv, "classification")
        .iter()
        .all(|c| c == "concave"));
    let out = run(&parse("scan --fn poly --coeffs 0,0,0,2,-3,1 --xs -1:1:1"));
    assert!(column(&out.csv, "classification")
        .iter()
        .all(|c| c == "indeterminate"));
}

#[test]
fn scan_records_failed_points() {
    let out = run(&parse("scan --fn logbeta --xs 0.0005:1.0005:0.5"));
    assert_eq!(out.exit_code, 0);
    let classes = column(&out.csv, "classification");
    assert!(classes.iter().any(|c| c == "failed"));
}

#[test]
fn convergence_report_columns() {
    let t = emit_convergence_report(&[(10, 1.1, 1.0), (100, 1.01, 1.0)]);
    assert_eq!(
        t.columns,
        ["n", "value", "oracle", "abs_err", "rel_err", "err_ratio"]
    );
    assert!(matches!(t.rows[0][5], Cell::Num(v) if v.is_nan()));
    assert!(matches!(t.rows[1][5], Cell::Num(v) if (v - 0.1).abs() < 1e-12));
}

#[test]
fn converge_unit_factor_is_exact() {
    let out = run(&parse("converge --solver gm --factor one --xs 0.5:2.5:1"));
    assert_eq!(out.exit_code, 0);
    assert!(column(&out.csv, "rel_err")
        .iter()
        .all(|e| e.parse::<f64>().unwrap() == 0.0));
}

#[test]
fn converge_gm_error_decreases() {
    let out = run(&parse("converge --solver gm --k 1 --xs 1.5"));
    let errs: Vec<f64> = column(&out.csv, "rel_err")
        .iter()
        .map(|e| e.parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn converge_krull_logs_terms() {
    let out = run(&parse("converge --solver krull --k 1 --xs 0.5:2.5:0.5"));
    let terms = column(&out.csv, "terms_used");
    assert_eq!(terms.len(), 5);
    assert!(terms.iter().all(|t| t.parse::<usize>().is_ok()));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&parse("eval --fn gamma --x=-1")).exit_code, 1);
    assert_eq!(run(&parse("eval --fn zeta --x 1")).exit_code, 1);
    assert_eq!(run(&parse("ray --k 1 --xs 1 --tol=-1")).exit_code, 1);
    // Too short a schedule for the requested agreement: the product has not settled.
    let unsettled = run(&parse("ray --k 1 --method gm --xs 0.5 --tol 1e-9"));
    assert_eq!(unsettled.exit_code, 2, "{:?}", unsettled.summary);
    let cfg = RunConfig::new(Command::Eval)
        .with("fn", "gamma")
        .with("x", "1")
        .with("bogus", "1");
    assert_eq!(run(&cfg).exit_code, 1);
}

#[test]
fn writes_output_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ray.csv");
    let svg = dir.path().join("ray.svg");
    let mut cfg = parse("ray --k 2 --method oracle --xs 0.5:3:0.5");
    cfg.output_path = Some(csv.clone());
    cfg.plot_path = Some(svg.clone());
    let out = run(&cfg);
    assert_eq!(out.exit_code, 0);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), out.csv);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn binary_reports_exit_status() {
    let exe = env!("CARGO_BIN_EXE_betagamma");
    let ok = Process::new(exe)
        .args(["eval", "--fn", "beta", "--x", "1", "--y", "2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("5.0000000000000000e-1"));
    let bad = Process::new(exe)
        .args(["eval", "--fn", "beta", "--x", "0", "--y", "2"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let usage = Process::new(exe).args(["frobnicate"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
}

#[test]
fn tolerance_from_environment() {
    let exe = env!("CARGO_BIN_EXE_betagamma");
    let out = Process::new(exe)
        .args(["ray", "--k", "1", "--xs", "1.5"])
        .env("BETAGAMMA_TOL", "1e-9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("# tol = 1e-9"));
    let out = Process::new(exe)
        .args(["ray", "--k", "1", "--xs", "1.5"])
        .env("BETAGAMMA_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
