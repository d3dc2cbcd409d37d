use std::path::Path;

use shearball::cli::main_with_args;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("shearball").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn certify_reference_series() {
    let (code, out, _) = run(&["certify", "--input", "data/half_powers.json"]);
    assert_eq!(code, 0);
    assert!(out.contains("Starlike,Certified,,1.59807621135"));
    assert!(out.contains("Starshapelike,Certified,,1.5000000000000000e0"));
    assert!(out.contains("Embeddable,Certified,2,0.0000000000000000e0"));
    assert!(out
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("# config: certify input=data/half_powers.json"));
}

#[test]
fn certify_builtin_is_not_certified() {
    let (code, out, _) = run(&["certify", "--builtin", "counterexample"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("NotCertified").count(), 3);
}

#[test]
fn counterexample_grid_flag() {
    let (code, out, _) = run(&["counterexample", "--grid", "0.6:0.99", "--c-report", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("# verdict: affirmative"));
    let (_, single, _) = run(&["counterexample", "--grid", "0.6:0.6:1"]);
    assert!(single.contains("# verdict: insufficient-grid"));
    let (code, _, err) = run(&["counterexample", "--grid", "0.3:0.9:4"]);
    assert_eq!(code, 2);
    assert!(err.contains("(1/2, 1)"), "{err}");
}

#[test]
fn starlike_scan_exit_status_reflects_violation() {
    let (code, out, _) = run(&[
        "starlike-scan",
        "--input",
        "data/monomial_2_7.json",
        "--radius",
        "0.99",
        "--random",
        "1000",
    ]);
    assert_eq!(code, 1);
    let row = out.lines().last().unwrap();
    let extremum: f64 = row.split(',').next().unwrap().parse().unwrap();
    assert!(extremum <= -0.01);
    let (code, _, _) = run(&[
        "starlike-scan",
        "--input",
        "data/monomial_sharp.json",
        "--radius",
        "0.999",
        "--random",
        "1000",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn eq1_scan_detects_counterexample_with_probe() {
    // z2 = 1 - 0.012 e^{i pi/6}
    let z2 = num_complex::Complex64::new(1.0, 0.0)
        - num_complex::Complex64::from_polar(0.012, std::f64::consts::FRAC_PI_6);
    let probe = format!("0,0;{},{}", z2.re, z2.im);
    let (code, out, err) = run(&[
        "eq1-scan",
        "--builtin",
        "counterexample",
        "--alpha",
        "0.5:0.5:1",
        "--radius",
        "0.5",
        "--radial",
        "2",
        "--split",
        "3",
        "--phases",
        "4",
        "--random",
        "10",
        "--probe",
        &probe,
    ]);
    assert_eq!(code, 1, "{err}");
    assert!(out
        .lines()
        .last()
        .unwrap()
        .starts_with("-inf,5.0000000000000000e-1"));
    let (code, _, _) = run(&[
        "eq1-scan",
        "--input",
        "data/half_powers.json",
        "--random",
        "500",
        "--radial",
        "5",
        "--split",
        "5",
        "--phases",
        "4",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn growth_scan_refuses_uncertified_and_passes_certified() {
    let (code, _, err) = run(&["growth-scan", "--input", "data/monomial_2_7.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("S0"), "{err}");
    let (code, out, _) = run(&[
        "growth-scan",
        "--input",
        "data/half_powers.json",
        "--angular",
        "64",
        "--disk-radial",
        "8",
        "--grid",
        "0.1:0.9:9",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.matches(",true").count(), 9);
}

#[test]
fn embed_reports_tail_sums() {
    let (code, out, _) = run(&["embed", "--input", "data/half_powers.json"]);
    assert_eq!(code, 0);
    assert!(out.contains("1,1.5000000000000000e0,false"));
    assert!(out.contains("2,1.0000000000000000e0,true"));
    assert!(out.contains("# certificate: Embeddable,Certified,2,"));
    let (code, _, err) = run(&["embed", "--builtin", "counterexample"]);
    assert_eq!(code, 2);
    assert!(err.contains("coefficient"), "{err}");
}

#[test]
fn eval_probes_and_overflow() {
    let (code, out, _) = run(&[
        "eval",
        "--input",
        "data/monomial_2_7.json",
        "--probe",
        "0.1,0;0.5,0",
    ]);
    assert_eq!(code, 0);
    let row: Vec<f64> = out
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((row[4] - (0.1 + 2.7 * 0.25)).abs() < 1e-15);
    // z2 = 1 - 0.05 e^{i pi/6}: ln|g| is about 0.05^-3 = 8000
    let (code, _, err) = run(&[
        "eval",
        "--builtin",
        "counterexample",
        "--probe",
        "0,0;0.9566987298107781,-0.025",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("log-magnitude"), "{err}");
}

#[test]
fn json_mirrors_csv() {
    let (code, out, _) = run(&[
        "certify",
        "--input",
        "data/half_powers.json",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "certify");
    assert_eq!(v["certificates"][2]["degree"], 2);
    assert_eq!(v["certificates"][0]["kind"], "Starlike");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\"start\": 2,\n  \"coeffs\": [[1.0, 0.0],\n  [2.0]]}",
    )
    .unwrap();
    let (code, _, err) = run(&["certify", "--input", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");
    let start = dir.path().join("start.json");
    std::fs::write(&start, r#"{"start": 0, "coeffs": []}"#).unwrap();
    let (code, _, err) = run(&["certify", "--input", start.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("start must be 2"), "{err}");
    assert_eq!(
        run(&[
            "starlike-scan",
            "--input",
            "data/half_powers.json",
            "--radius",
            "1.0"
        ])
        .0,
        2
    );
    assert_eq!(run(&["certify"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(
        run(&[
            "starlike-scan",
            "--input",
            "data/half_powers.json",
            "--probe",
            "0.1,0"
        ])
        .0,
        2
    );
}

#[test]
fn out_and_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let trace = dir.path().join("trace.csv");
    let (code, stdout, _) = run(&[
        "starlike-scan",
        "--input",
        "data/half_powers.json",
        "--radius",
        "0.9",
        "--radial",
        "2",
        "--split",
        "2",
        "--phases",
        "2",
        "--random",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("extremum,"));
    let t = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(t.lines().next().unwrap(), "s,t,phase1,phase2,value");
    assert_eq!(t.lines().count(), 1 + 2 * 2 * 4 + 3);
}

#[test]
fn data_files_exist() {
    for f in [
        "half_powers.json",
        "monomial_2_7.json",
        "monomial_sharp.json",
    ] {
        assert!(Path::new("data").join(f).exists());
    }
}
