use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use weierstrass::verify::{case_names, IdentityCase, IdentityReport};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weierstrass"))
        .args(args)
        .env_remove("WEIERSTRASS_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_error(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert!(v["error"].is_string() && v["message"].is_string(), "{v}");
    v
}

#[test]
fn eval_e2_at_i() {
    let out = run(&["eval", "--fn", "e2", "--tau", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["re"].as_f64().unwrap() - 3.0 / std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
    assert!(v["est_error"].as_f64().unwrap() >= 0.0);
}

#[test]
fn eval_all_functions_have_the_same_shape() {
    for f in ["wp", "wp1", "zeta", "e2", "e4", "e6", "g2", "g3", "delta"] {
        let out = run(&["eval", "--fn", f, "--tau", "-0.3,0.4", "--z", "0.2,-0.1"]);
        assert_eq!(out.status.code(), Some(0), "{f}");
        let v = stdout_json(&out);
        let obj = v.as_object().unwrap();
        assert_eq!(obj.len(), 3);
        for k in ["re", "im", "est_error"] {
            assert!(obj[k].is_f64(), "{f}.{k}");
        }
    }
}

#[test]
fn numbers_are_plain_decimal() {
    let out = run(&["eval", "--fn", "g2", "--tau", "0.1,1.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("NaN") && !text.contains("inf") && !text.contains(", "));
}

#[test]
fn reduce_reports_the_matrix_and_cell_data() {
    let out = run(&["reduce", "--tau", "0.3,0.2", "--z", "1.5,0.7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let g = &v["gamma"];
    let (a, b, c, d) = (g["a"].as_i64().unwrap(), g["b"].as_i64().unwrap(), g["c"].as_i64().unwrap(), g["d"].as_i64().unwrap());
    assert_eq!(a * d - b * c, 1);
    assert!(v["tau_star"]["im"].as_f64().unwrap() >= 0.866);
    assert!(v["m"].is_i64() && v["n"].is_i64());
    assert!(v["z_star"]["re"].is_f64() && v["scale"]["im"].is_f64());
}

#[test]
fn diff_prints_text_form() {
    let out = run(&["diff", "--expr", "zeta", "--var", "z"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "-(wp)");
    let out = run(&["diff", "--expr", "E4", "--var", "tau"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("E2") && text.contains("E6"), "{text}");
}

#[test]
fn series_goldens() {
    let out = run(&["series", "--fn", "e2", "--order", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), serde_json::json!([1, -24, -72, -96, -168, -144]));
    let out = run(&["series", "--fn", "e4", "--order", "3"]);
    assert_eq!(stdout_json(&out), serde_json::json!([1, 240, 2160, 6720]));
    let out = run(&["series", "--fn", "e6", "--order", "2"]);
    assert_eq!(stdout_json(&out), serde_json::json!([1, -504, -16632]));
}

#[test]
fn series_term_tables() {
    for f in ["wp0", "zeta0"] {
        let out = run(&["series", "--fn", f, "--order", "3"]);
        assert_eq!(out.status.code(), Some(0));
        let v = stdout_json(&out);
        assert_eq!(v["fn"], f);
        let terms = v["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 4);
        assert_eq!(terms[2]["m"], 2);
        assert!(terms[2]["term"].as_str().unwrap().contains("q^2"));
    }
}

#[test]
fn verify_json_matches_the_report_type() {
    let out = run(&["verify", "--seed", "42", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: IdentityReport = serde_json::from_slice(&out.stdout).expect("report schema");
    assert_eq!(report.seed, 42);
    let names: Vec<&str> = report.cases.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, case_names());
    assert!(report.cases.iter().all(|c| c.passed == (c.max_residual <= c.tolerance)));
    assert_eq!(report.resolved.s_law_exponent, 2);
    assert_eq!(report.resolved.zeta_identity_sign, "-");
}

#[test]
fn verify_is_deterministic_modulo_timestamp() {
    let a: IdentityReport = serde_json::from_slice(&run(&["verify", "--seed", "7"]).stdout).unwrap();
    let b: IdentityReport = serde_json::from_slice(&run(&["verify", "--seed", "7"]).stdout).unwrap();
    assert_eq!(a.cases, b.cases);
    assert_eq!(a.resolved, b.resolved);
}

#[test]
fn verify_csv_columns() {
    let out = run(&["verify", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["name", "sample_count", "max_residual", "mean_residual", "tolerance", "passed", "notes"]
    );
    let rows: Vec<IdentityCase> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), case_names().len());
}

#[test]
fn failing_case_exits_one() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# impossible bound\ncase.ode = 0").unwrap();
    let path = f.path().to_str().unwrap();
    let out = run(&["verify", "--tol-file", path]);
    assert_eq!(out.status.code(), Some(1));
    let report: IdentityReport = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<_> = report.cases.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert_eq!(failed, ["ode"]);
}

#[test]
fn config_path_from_environment() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "case.sine_limit = 0").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_weierstrass"))
        .args(["verify", "--csv"])
        .env("WEIERSTRASS_CONFIG", f.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_arguments_exit_two() {
    for args in [
        vec!["eval", "--fn", "wp", "--tau", "0,1"],
        vec!["eval", "--fn", "nope", "--tau", "0,1"],
        vec!["eval", "--fn", "e4", "--tau", "0"],
        vec!["eval", "--fn", "e4", "--tau", "0,-1"],
        vec!["diff", "--expr", "wp +", "--var", "z"],
        vec!["diff", "--expr", "wp", "--var", "q"],
        vec!["series", "--fn", "e2", "--order", "-1"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        stderr_error(&out);
    }
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "identity_tol = banana").unwrap();
    let out = run(&["verify", "--tol-file", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "Config");
}

#[test]
fn evaluation_errors_exit_three() {
    let out = run(&["eval", "--fn", "wp", "--tau", "0,1", "--z", "1,1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error(&out)["error"], "PoleProximity");
}

#[test]
fn committed_config_reproduces_the_defaults() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../config/tolerances.conf");
    let with_file: IdentityReport = serde_json::from_slice(&run(&["verify", "--tol-file", path]).stdout).unwrap();
    let builtin: IdentityReport = serde_json::from_slice(&run(&["verify"]).stdout).unwrap();
    for (a, b) in with_file.cases.iter().zip(&builtin.cases) {
        assert_eq!((&a.name, a.tolerance, a.passed), (&b.name, b.tolerance, b.passed));
    }
}

#[test]
fn eval_modular_values_match_the_library() {
    use weierstrass::reduction::ModularQuantity;
    let engine = weierstrass::Engine::default();
    let tau = weierstrass::UpperHalfPoint::from_parts(0.1, 0.3).unwrap();
    let lib = engine.modular_anywhere(tau, ModularQuantity::Delta).unwrap();
    let v = stdout_json(&run(&["eval", "--fn", "delta", "--tau", "0.1,0.3"]));
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-15 * b.abs();
    assert!(close(v["re"].as_f64().unwrap(), lib.value.re));
    assert!(close(v["est_error"].as_f64().unwrap(), lib.est_error));
    assert!(lib.est_error > 0.0 && lib.est_error < 1e-6 * lib.value.norm());
}
