use std::path::PathBuf;
use std::process::{Command, Output};

use resurgence::pipeline::AnalysisReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resurgence")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> AnalysisReport {
    AnalysisReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("valid report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn analyze_euler() {
    let out = run(&["analyze", "--op", "x*theta^2 + theta - 1", "--order", "30"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let us: Vec<_> = r.basis.iter().map(|b| b.u.exact.clone().unwrap()).collect();
    assert_eq!(us, vec!["0", "1"]);
    let a = &r.borel.unwrap()["stokes"]["A"];
    assert!(a[0].as_f64().unwrap().abs() < 1e-12);
    assert!((a[1].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-10);
}

#[test]
fn analyze_quartic() {
    let out = run(&["analyze", "--k", "2", "--order", "40"]);
    assert!(out.status.success());
    let r = report(&out);
    let slopes: Vec<_> = r.polygon_zero.as_ref().unwrap()["slopes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["q"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(slopes, vec!["0", "1"]);
    let us: Vec<_> = r.basis.iter().map(|b| b.u.exact.clone().unwrap()).collect();
    assert_eq!(us, vec!["0", "1/16"]);
    let poles = r.borel.as_ref().unwrap()["poles"].as_array().unwrap().clone();
    let stable = poles.iter().find(|p| p[2].as_bool().unwrap()).unwrap();
    assert!((stable[0].as_f64().unwrap() + 1.0 / 16.0).abs() < 1e-6);
}

#[test]
fn partition_matches_quadrature() {
    let out = run(&["partition", "--k", "2", "--lambda", "0.05", "--tol", "1e-10"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r.partition.len(), 1);
    assert!(r.partition[0].difference <= 1e-8, "{}", r.partition[0].difference);
    assert_eq!(r.options.unwrap().tol, 1e-10);
}

#[test]
fn resum_from_file_and_out_flag() {
    // Σ (-1)^n n! x^{n+1}, the Euler series, summed at z = 1
    let coeffs = scratch("euler.txt");
    let mut text = String::from("# Euler series\n");
    let mut f = 1u128;
    for n in 0..24u128 {
        if n > 0 {
            f *= n;
        }
        text += &format!("{}{}\n", if n % 2 == 1 { "-" } else { "" }, f);
    }
    std::fs::write(&coeffs, text).unwrap();
    let out_file = scratch("euler_report.json");
    let out = run(&["resum", "--coeffs", coeffs.to_str().unwrap(), "--beta", "1", "--direction", "0", "--z", "1", "--out", out_file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&out_file).unwrap();
    let r = AnalysisReport::from_json(&written).unwrap();
    let v = r.borel.unwrap()["laplace"]["value"][0].as_f64().unwrap();
    assert!((v - 0.596_347_362_323_194_1).abs() < 1e-14, "{v}");
}

#[test]
fn airy_and_round_trip() {
    let out = run(&["airy", "--q", "1", "--order", "12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let r = AnalysisReport::from_json(&text).unwrap();
    assert_eq!(r.to_json() + "\n", text);
    assert_eq!(r.airy.unwrap().u_plus.exact.as_deref(), Some("2/3"));
}

#[test]
fn module_errors_set_the_exit_code() {
    let out = run(&["airy", "--q", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r.errors[0].kind, "degenerate");

    let out = run(&["analyze", "--op", "1 + theta + x*theta^2 + x^3*theta^3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out).errors[0].kind, "unsupported-level");
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["partition", "--k", "2", "--lambda-grid", "0.1:0.2"]).status.code(), Some(2));
    assert_eq!(run(&["resum", "--coeffs", "/nonexistent", "--direction", "0", "--z", "1"]).status.code(), Some(2));
}
