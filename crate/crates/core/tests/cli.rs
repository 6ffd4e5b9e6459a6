use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mixqmc"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn experiment_smoke_is_deterministic() {
    let args = ["experiment", "--model", "toy", "--m-min", "3", "--m-max", "3", "--reps", "2", "--seed", "5"];
    let (code, a, _) = run(&args);
    assert_eq!(code, 0);
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "estimator,m,n,variance,mean,wall_ms");
    let names: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["mc", "rqmc", "rqmc-adj:rho=2", "rqmc-2:rho=3", "rqmc-l:rho=3"]);
}

#[test]
fn experiment_thread_count_does_not_change_output() {
    let base = ["experiment", "--model", "flood", "--m-min", "4", "--m-max", "5", "--reps", "8", "--estimators", "rqmc-adj", "--rho", "1,2,3,inf"];
    let (c1, one, _) = run(&[&base[..], &["--threads", "1"]].concat());
    let (c2, two, _) = run(&[&base[..], &["--threads", "3"]].concat());
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(one, two);
    assert_eq!(one.lines().count(), 1 + 4 * 2);
}

#[test]
fn experiment_writes_out_file_and_slopes_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    let (code, stdout, stderr) = run(&[
        "experiment", "--m-min", "3", "--m-max", "5", "--reps", "4", "--estimators", "mc,rqmc",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert!(stderr.contains("mc:"));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn model_file_loads_and_bad_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("m.json");
    std::fs::write(
        &good,
        r#"{"integrand": "toy", "strata": [
            {"weight": 0.6, "coords": [{"kind": "shifted-normal", "params": {"theta": 0.5}}]},
            {"weight": 0.4, "coords": [{"kind": "normal", "params": {"mean": 2.0, "sd": 0.5}}]}]}"#,
    )
    .unwrap();
    let spec = format!("file:{}", good.display());
    let (code, out, _) = run(&["experiment", "--model", &spec, "--m-min", "3", "--m-max", "3", "--reps", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"integrand\": \"toy\",\n \"strata\": [}").unwrap();
    let (code, _, err) = run(&["experiment", "--model", &format!("file:{}", bad.display()), "--reps", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn allocate_examples() {
    let (code, out, _) = run(&["allocate", "--alpha", "0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125", "-n", "64", "--pow2"]);
    assert_eq!(code, 0);
    assert!(out.lines().skip(1).all(|l| l.split(',').nth(4) == Some("8")));
    let (code, _, err) = run(&["allocate", "--alpha", "0.5,0.3,0.2", "-n", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("infeasible"));
    let (code, _, _) = run(&["allocate", "--alpha", "0.5,0.3,0.2", "-n", "12", "--pow2"]);
    assert_eq!(code, 2);
}

#[test]
fn partitions_counts() {
    let (_, out, _) = run(&["partitions", "--strata", "7"]);
    assert_eq!(out.lines().count(), 10);
    assert_eq!(out.lines().last(), Some("count 9"));
    let (code, _, _) = run(&["partitions", "--strata", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn inefficiency_equal_weights_all_one() {
    let (code, out, _) = run(&["inefficiency", "--alpha", "0.25,0.25,0.25,0.25", "--i1"]);
    assert_eq!(code, 0);
    for line in out.lines().filter(|l| l.starts_with("I0,") || l.starts_with("I1,")) {
        for v in line.split(',').skip(2) {
            assert!((v.parse::<f64>().unwrap() - 1.0).abs() < 1e-9, "{line}");
        }
    }
}

#[test]
fn netcheck_reports() {
    let (code, out, _) = run(&["netcheck", "-d", "2", "-m", "8"]);
    assert_eq!(code, 0);
    assert!(out.contains("stratified yes"));
    let (_, out, _) = run(&["netcheck", "-d", "3", "-m", "10", "--beta", "1/2,1/4,1/8,1/8"]);
    assert_eq!(out.matches("net pass").count(), 4);
    let (code, _, _) = run(&["netcheck", "--beta", "0.5,0.3,0.2", "--require-nets"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["netcheck", "-d", "9"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["bogus"]).0, 2);
    assert_eq!(run(&["experiment", "--rho", "0.5"]).0, 2);
    assert_eq!(run(&["experiment", "--m-min", "5", "--m-max", "4"]).0, 2);
    assert_eq!(run(&["experiment", "--reps", "1"]).0, 2);
}
