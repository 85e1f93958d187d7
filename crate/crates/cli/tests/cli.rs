use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(stdout(out)).unwrap()
}

fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn row<'a>(rows: &'a [Value], m: &str, ell: &str) -> &'a Value {
    rows.iter()
        .find(|r| r["m"].to_string().trim_matches('"') == m && r["ell"].to_string().trim_matches('"') == ell)
        .unwrap_or_else(|| panic!("no row ({m}, {ell})"))
}

#[test]
fn sweep_matches_closed_forms() {
    let rows = json(&gcl(&["sweep", "--m", "2,inf", "--ell", "1,inf"]));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let phi = phi();
    assert!((num(&row(rows, "2", "1")["bound"]) - 2.3399441).abs() < 1e-7);
    assert!((num(&row(rows, "2", "inf")["bound"]) - ((phi + 5.0).sqrt() / 2.0 + 1.0)).abs() < 1e-8);
    assert!((num(&row(rows, "inf", "inf")["bound"]) - ((phi + 3.0).sqrt() + 1.0)).abs() < 1e-8);
    // the printed values
    assert!((num(&row(rows, "2", "inf")["bound"]) - 2.2863).abs() < 5e-5);
    assert!((num(&row(rows, "inf", "inf")["bound"]) - 3.1490).abs() < 5e-5);

    let r = row(rows, "2", "1");
    let alpha = num(&r["alpha"]);
    assert!((alpha + num(&r["beta"]) - 1.0).abs() < 1e-8);
    assert!((num(&r["y_ell"]) - phi / alpha).abs() < 1e-7);
    assert!((num(&r["x_ell"]) - (1.0 + alpha / phi)).abs() < 1e-7);
    assert_eq!(row(rows, "inf", "1")["increasing_in_m"], Value::Bool(true));
    assert_eq!(r["increasing_in_m"], Value::Null);
}

#[test]
fn sweep_csv_and_json_agree() {
    let args = ["sweep", "--m", "2,3,4,8,64,inf", "--ell", "1,2,4,inf"];
    let rows = json(&gcl(&args));
    let csv = gcl(&[&args[..], &["--format", "csv"]].concat());
    assert!(csv.status.success());
    let text = stdout(&csv);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let rows = rows.as_array().unwrap();
    let mut count = 0;
    for (line, row) in lines.zip(rows) {
        count += 1;
        for (field, name) in line.split(',').zip(&header) {
            let v = &row[*name];
            match v {
                Value::Number(n) => assert_eq!(field.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{name}"),
                Value::String(s) => assert_eq!(field, s),
                Value::Bool(b) => assert_eq!(field, b.to_string()),
                Value::Null => assert_eq!(field, ""),
                other => panic!("unexpected {other}"),
            }
        }
    }
    assert_eq!(count, rows.len());
    assert_eq!(count, 24);
    for line in text.lines().skip(1) {
        for field in line.split(',').skip(2).take(5) {
            let digits = field.trim_start_matches('-').replace('.', "");
            assert!(digits.trim_start_matches('0').len() <= 9, "{field}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["sweep", "--format", "csv"][..],
        &["verify", "--only", "thm3"],
        &["gen", "--family", "thm2", "--m", "4"],
        &["lemma1", "--k", "2,3"],
    ] {
        let a = gcl(args);
        let b = gcl(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn verify_only_runs_one_check() {
    let out = gcl(&["verify", "--only", "thm6"]);
    let outcomes = json(&out);
    let outcomes = outcomes.as_array().unwrap();
    assert_eq!(outcomes.len(), 1);
    assert_eq!(outcomes[0]["name"], "thm6");
    assert_eq!(outcomes[0]["pass"], true);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("PASS thm6"));
    assert!(stderr.contains("1/1 checks passed"));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(gcl(&["verify", "lemma1", "--k", "2,3"]).status.code(), Some(0));
    // the bound is increasing in k, so listing k out of order is a failed check
    let out = gcl(&["verify", "lemma1", "--k", "3,2"]);
    assert_eq!(out.status.code(), Some(1));
    let outcomes: Value = serde_json::from_str(stdout(&out)).unwrap();
    assert_eq!(outcomes[0]["pass"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL lemma1"));
    // an exact-solve cap too small for the instance is a configuration error
    assert_eq!(gcl(&["verify", "--only", "instance1", "--cap-opt", "0"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["sweep", "--m", "1"],
        &["sweep", "--m", "two"],
        &["sweep", "--format", "xml"],
        &["verify", "--only", "nope"],
        &["run", "--instance", "/nonexistent/instance.json"],
        &["run", "--instance", "x.json", "--algo", "component:x"],
        &["gen", "--family", "thm2", "--m", "2"],
        &[],
    ] {
        assert_eq!(gcl(args).status.code(), Some(2), "{args:?}");
    }
}

fn write(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_string();
    let out = gcl(&[&["gen"][..], args, &["--out", &path]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_run_opt_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let tight = write(dir.path(), "tight.json", &["--family", "tight"]);

    let opt = json(&gcl(&["opt", "--instance", &tight]));
    assert_eq!(num(&opt["opt"]), 2.0);
    assert_eq!(num(&opt["lb"]), 2.0);
    let a = opt["assignment"].as_array().unwrap();
    assert_eq!(a[0], a[1]);
    assert_ne!(a[0], a[2]);

    let phi = phi();
    let x1 = (phi + (13.0 - 7.0 * phi).sqrt()) / 2.0;
    let run = json(&gcl(&["run", "--instance", &tight, "--algo", "revised"]));
    assert!((num(&run["expected_makespan"]) - 3.0 * x1).abs() < 1e-9);
    let components = run["components"].as_array().unwrap();
    assert_eq!(components.len(), 2);
    for c in components {
        let machines: Vec<u64> = c["placements"].as_array().unwrap().iter().map(|p| p["machine"].as_u64().unwrap()).collect();
        assert_eq!(machines, [0, 1, 0]);
        assert!(c["placements"].as_array().unwrap().iter().all(|p| p["tested"] == false));
    }
    let weights: f64 = components.iter().map(|c| num(&c["weight"])).sum();
    assert!((weights - 1.0).abs() < 1e-12);

    let single = json(&gcl(&["run", "--instance", &tight, "--algo", "component:0", "--ell", "2"]));
    assert_eq!(single["algo"], "component:0");
    assert!((num(&single["schedule"]["makespan"]) - 3.0 * x1).abs() < 1e-9);
    assert_eq!(gcl(&["run", "--instance", &tight, "--algo", "component:3", "--ell", "2"]).status.code(), Some(2));
}

#[test]
fn games_run_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let forced = write(dir.path(), "forced.json", &["--family", "forced", "--m", "3"]);
    let run = json(&gcl(&["run", "--instance", &forced, "--algo", "component:0"]));
    assert_eq!(num(&run["schedule"]["makespan"]), 5.0);
    let jobs = run["instance"]["jobs"].as_array().unwrap();
    assert_eq!(jobs.len(), 7);
    let realized = dir.path().join("realized.json");
    std::fs::write(&realized, run["instance"].to_string()).unwrap();
    let opt = json(&gcl(&["opt", "--instance", realized.to_str().unwrap()]));
    assert_eq!(num(&opt["opt"]), 3.0);

    let thm6 = write(dir.path(), "thm6.json", &["--family", "thm6"]);
    let gcl_run = json(&gcl(&["run", "--instance", &thm6, "--algo", "gcl"]));
    assert!(gcl_run.get("instance").is_none());
    let components = gcl_run["components"].as_array().unwrap();
    assert_eq!(components.len(), 2);
    let expected: f64 = components.iter().map(|c| num(&c["weight"]) * num(&c["makespan"])).sum();
    assert!((expected - num(&gcl_run["expected_makespan"])).abs() < 1e-12);
    assert!(components.iter().all(|c| c["instance"]["jobs"].as_array().unwrap().len() == 3));
    // games cannot be solved offline until realized
    assert_eq!(gcl(&["opt", "--instance", &thm6]).status.code(), Some(2));
}

#[test]
fn lemma1_reports_exact_ratio() {
    let rows = json(&gcl(&["lemma1", "--k", "2,3"]));
    let rows = rows.as_array().unwrap();
    assert!((num(&rows[0]["exact"]) - 46.0 / 27.0).abs() < 1e-12);
    assert!(num(&rows[1]["exact"]) >= num(&rows[1]["paper_bound"]));
    let capped = json(&gcl(&["lemma1", "--k", "3", "--cap", "4"]));
    assert_eq!(capped[0]["exact"], Value::Null);
}
