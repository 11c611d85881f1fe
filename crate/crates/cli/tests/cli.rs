use std::path::PathBuf;
use std::process::{Command, Output};

fn supsize(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supsize"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    let line = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(line.trim()).expect("stderr is one JSON record")
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "--seed", "11", "simulate", "--family", "zipf:k=500,alpha=1", "--n-grid", "100,400", "--trials", "4",
    ];
    let a = supsize(&args);
    let b = supsize(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("family,sampling,estimator,n,support_size,k,trials,undefined_count,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn estimate_reports_json_record() {
    let o = supsize(&[
        "--format",
        "json",
        "estimate",
        "--fingerprint",
        &data("shakespeare_et76.txt"),
        "--k",
        "1e6",
        "--estimator",
        "wy",
    ]);
    assert!(o.status.success());
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(rec["estimator"], "wy");
    assert_eq!(rec["L"], 6);
    assert_eq!(rec["n"], 194_667);
    for key in ["value", "rounded", "k", "l", "r"] {
        assert!(rec[key].is_number(), "{key}");
    }
}

#[test]
fn estimate_from_text_with_clamp() {
    let text = scratch("tiny.txt");
    std::fs::write(&text, "a b b c c c\n\nd, e! a").unwrap();
    let o = supsize(&[
        "estimate",
        "--text",
        text.to_str().unwrap(),
        "--k",
        "10",
        "--estimators",
        "plugin,wy",
        "--clamp",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let plugin = out.lines().find(|l| l.starts_with("plugin,")).unwrap();
    assert!(plugin.starts_with("plugin,5.0,5,9,5,"), "{plugin}");
    let wy: f64 = out.lines().find(|l| l.starts_with("wy,")).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((5.0..=10.0).contains(&wy));
}

#[test]
fn missing_file_gives_io_record() {
    let o = supsize(&["estimate", "--fingerprint", "/definitely/not/here", "--estimator", "plugin"]);
    assert_eq!(o.status.code(), Some(1));
    let rec = error_record(&o);
    assert_eq!(rec["error"], "io");
    assert!(rec["message"].as_str().unwrap().contains("/definitely/not/here"));
}

#[test]
fn usage_errors_exit_with_two() {
    let o = supsize(&["simulate", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "usage");
    let o = supsize(&["coeffs", "--k", "1e6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(error_record(&o)["message"].as_str().unwrap().contains("--n"));
}

#[test]
fn help_lists_csv_columns() {
    let o = supsize(&["simulate", "--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("undefined_count, mean_estimate, std_dev, rmse"));
}

#[test]
fn undefined_estimators_become_error_columns() {
    let o = supsize(&[
        "estimate",
        "--fingerprint",
        &data("shakespeare_et76.txt"),
        "--estimators",
        "plugin,cl1",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let cl1 = out.lines().find(|l| l.starts_with("cl1,")).unwrap();
    assert!(cl1.contains("censored"));
}

#[test]
fn config_file_supplies_defaults() {
    let cfg = scratch("run.conf");
    std::fs::write(&cfg, "# shared settings\nk = 6e5\nestimator = wy\nformat = json\n").unwrap();
    let fp = data("shakespeare_et76.txt");
    let from_file = supsize(&["--config", cfg.to_str().unwrap(), "estimate", "--fingerprint", &fp]);
    assert!(from_file.status.success());
    let rec: serde_json::Value = serde_json::from_str(stdout(&from_file).trim()).unwrap();
    assert_eq!(rec["k"], 600_000.0);
    assert_eq!(rec["L"], 5);

    // flags win over the file
    let flagged = supsize(&["--config", cfg.to_str().unwrap(), "estimate", "--fingerprint", &fp, "--k", "1e6"]);
    let rec: serde_json::Value = serde_json::from_str(stdout(&flagged).trim()).unwrap();
    assert_eq!(rec["L"], 6);

    std::fs::write(&cfg, "not-a-flag = 3\n").unwrap();
    let bad = supsize(&["--config", cfg.to_str().unwrap(), "coeffs"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn output_file_and_theory_fields() {
    let path = scratch("approx.csv");
    let o = supsize(&["--output", path.to_str().unwrap(), "theory", "approx", "-L", "2", "--a", "1", "--b", "5"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let mut fields = std::collections::HashMap::new();
    for rec in rows.records() {
        let rec = rec.unwrap();
        fields.insert(rec[0].to_string(), rec[1].to_string());
    }
    let err: f64 = fields["error"].parse().unwrap();
    let closed: f64 = fields["closed_form_error"].parse().unwrap();
    assert!((err - closed).abs() <= 1e-10 * closed);
}

#[test]
fn certify_recipe_is_valid() {
    let o = supsize(&["--format", "json", "theory", "certify", "--k", "1e6", "--epsilon", "0.1"]);
    assert!(o.status.success());
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(rec["valid"], true);
    assert!(rec["implied_epsilon"].as_f64().unwrap() > 0.1);
}

#[test]
fn probe_half_epsilon_is_zero() {
    let o = supsize(&["--format", "json", "probe", "--family", "uniform:k=100", "--epsilon", "0.5"]);
    assert!(o.status.success());
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(rec["n_star"], 0);
}
