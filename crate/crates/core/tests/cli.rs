//! End-to-end runs of the `prominence` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prominence"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|rest| rest.starts_with(' ')))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .trim()
        .parse()
        .unwrap()
}

fn csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_examples() {
    let o = run(&["solve", "--s", "0.03125", "--r", "0.0", "--mode", "unobservable"]);
    assert!(o.status.success());
    let t = stdout(&o);
    assert!((field(&t, "p1") - 0.4464).abs() < 1e-4);
    assert!((field(&t, "p2") - 0.4737).abs() < 2e-4);

    let t = stdout(&run(&["solve", "--s", "0.03125", "--r", "0.7"]));
    assert!(t.contains("BothZero"));

    let t = stdout(&run(&["solve", "--a", "0.75", "--r", "0.0625", "--mode", "observable"]));
    assert!((field(&t, "p1") - 0.39194).abs() < 1e-5);
    assert!((field(&t, "p2") - 0.39194).abs() < 1e-5);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["solve", "--s", "0.2", "--r", "0.1"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--a", "0.75", "--r", "0.5", "--mode", "observable"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--s", "0.03", "--a", "0.7"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    // One failing suite gives 3 + 1.
    assert_eq!(run(&["verify", "--suite", "monotonicity", "--s", "0.0625"]).status.code(), Some(4));
}

#[test]
fn gap_sweep_is_decreasing_with_one_sign_change() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gap.csv");
    let o = run(&[
        "sweep", "--param", "r", "--from", "0", "--to", "0.59", "--steps", "200", "--s", "0.0625",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "param_value,regime,p1,p2,q1,q2,pi1,pi2,gap,industry,cs,ad_revenue,residual,status"
    );
    let rows = csv(&text);
    assert_eq!(rows.len(), 200);
    let gaps: Vec<f64> = rows.iter().map(|r| r[8].parse().unwrap()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    let flips = gaps.windows(2).filter(|w| w[0] > 0.0 && w[1] <= 0.0).count();
    assert_eq!(flips, 1);
    assert!(rows.iter().all(|r| r[13].starts_with("ok")));
}

#[test]
fn sweep_output_is_byte_stable() {
    let args = ["sweep", "--param", "alpha", "--from", "0.5", "--to", "1", "--steps", "11", "--s", "0.05", "--r", "0.2"];
    let (x, y) = (run(&args), run(&args));
    assert!(x.status.success());
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn consumer_cost_sweep_starts_at_base_solve() {
    let t = stdout(&run(&["sweep", "--param", "rs", "--from", "0", "--to", "0.05", "--steps", "6", "--s", "0.05", "--r", "0.3"]));
    let first = &csv(&t)[0];
    let base = stdout(&run(&["solve", "--s", "0.05", "--r", "0.3"]));
    let p1: f64 = first[2].parse().unwrap();
    assert_eq!(p1, field(&base, "p1"));
}

#[test]
fn exogenous_sweep_crosses_at_inverted_threshold() {
    let t = stdout(&run(&[
        "sweep", "--param", "p", "--mode", "exogenous", "--r", "0.2", "--s", "0.03125", "--from", "0.4",
        "--to", "0.75", "--steps", "36",
    ]));
    let rows = csv(&t);
    let cross = rows
        .windows(2)
        .find(|w| w[0][8].parse::<f64>().unwrap() < 0.0 && w[1][8].parse::<f64>().unwrap() >= 0.0)
        .map(|w| w[1][0].parse::<f64>().unwrap())
        .unwrap();
    assert!((cross - 0.6).abs() < 1e-9, "{cross}");
}

#[test]
fn sweep_range_outside_domain_is_rejected_up_front() {
    let o = run(&["sweep", "--param", "rs", "--from", "0", "--to", "0.1", "--steps", "3", "--s", "0.01", "--r", "0.06"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain error"));
}

#[test]
fn simulate_reports_closed_forms() {
    let t = stdout(&run(&["simulate", "--a", "0.75", "--p1", "0", "--p2", "0", "--n", "1000000", "--seed", "1"]));
    let d1n: Vec<f64> = t
        .lines()
        .find(|l| l.starts_with("d1n,"))
        .unwrap()
        .split(',')
        .skip(1)
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((d1n[0] - 0.25).abs() < 3.0 * 0.000433);
    assert_eq!(d1n[2], 0.25);
}

#[test]
fn verify_suites_pass() {
    for suite in ["partition", "ordering", "cs", "allocation", "observable"] {
        let o = run(&["verify", "--suite", suite, "--seed", "7"]);
        assert!(o.status.success(), "{suite}: {}", stdout(&o));
    }
    let o = run(&["verify", "--suite", "prominence-sign", "--s", "0.0625"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("turns negative inside"));
}
