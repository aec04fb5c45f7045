//! End-to-end runs of the `gt` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn gt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gt"))
        .current_dir(dir)
        .env_remove("GT_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SINGLE_FULL_QUERY: &str =
    r#"{"n":4,"k":2,"alpha":2,"beta":1,"construction":"manual","seed":0,"queries":[[1,2,3,4]]}"#;

#[test]
fn selector_generation_reports_metrics() {
    let d = TempDir::new().unwrap();
    let out = gt(d.path(), &["generate", "--construction", "selector", "--n", "7", "--alpha", "3", "-o", "s.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("length=3 w=1 rho=3"), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(json["queries"].as_array().unwrap().len(), 3);
}

#[test]
fn binary_generation_is_byte_identical() {
    let d = TempDir::new().unwrap();
    let args = |o: &'static str| {
        vec![
            "generate", "--construction", "binary", "--n", "16", "--k", "4", "--alpha", "2", "--delta", "1", "--seed", "7",
            "-o", o,
        ]
    };
    assert_eq!(code(&gt(d.path(), &args("a.json"))), 0);
    assert_eq!(code(&gt(d.path(), &args("b.json"))), 0);
    assert_eq!(fs::read(d.path().join("a.json")).unwrap(), fs::read(d.path().join("b.json")).unwrap());
}

#[test]
fn seed_comes_from_the_environment() {
    let d = TempDir::new().unwrap();
    let base = ["generate", "--construction", "small", "--n", "8", "--k", "2", "--alpha", "1"];
    let flag = gt(d.path(), &[&base[..], &["--seed", "5"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_gt"))
        .current_dir(d.path())
        .env("GT_SEED", "5")
        .args(base)
        .output()
        .unwrap();
    let other = gt(d.path(), &[&base[..], &["--seed", "6"]].concat());
    assert_eq!(stdout(&flag), stdout(&env));
    assert_ne!(stdout(&flag), stdout(&other));
}

#[test]
fn general_generation_records_code_choice() {
    let d = TempDir::new().unwrap();
    let out = gt(
        d.path(),
        &["generate", "--construction", "general", "--n", "12", "--k", "4", "--alpha", "4", "--beta", "16", "-o", "g.json"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(json["notes"]["beta_prime"], "4");
    assert!(json["notes"]["code_width"].as_str().unwrap().parse::<usize>().unwrap() <= 15);
    let v = gt(d.path(), &["verify", "--seq", "g.json", "--feedback", "genfeed"]);
    assert_eq!(code(&v), 0, "{}", stderr(&v));
}

#[test]
fn invalid_parameters_exit_two() {
    let d = TempDir::new().unwrap();
    let out = gt(d.path(), &["generate", "--construction", "small", "--n", "7", "--k", "9", "--alpha", "3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("k-exceeds-n"));
}

#[test]
fn verify_exit_codes_follow_solvability() {
    let d = TempDir::new().unwrap();
    gt(d.path(), &["generate", "--construction", "selector", "--n", "6", "--alpha", "2", "-o", "s.json"]);
    let ok = gt(
        d.path(),
        &["verify", "--seq", "s.json", "--feedback", "full", "--adversary", "malicious", "--k", "2", "--report", "r.json"],
    );
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["solved"], true);

    write(d.path(), "one.json", SINGLE_FULL_QUERY);
    let bad = gt(d.path(), &["verify", "--seq", "one.json", "--feedback", "par", "--adversary", "malicious", "--k", "2"]);
    assert_eq!(code(&bad), 1);
    assert!(stderr(&bad).contains("witness"));
    let report: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(report["witness"]["K1"], serde_json::json!([1, 2]));
}

#[test]
fn criteria_agree_under_malicious() {
    let d = TempDir::new().unwrap();
    let seqs = [
        SINGLE_FULL_QUERY,
        r#"{"n":4,"k":2,"alpha":1,"beta":1,"construction":"manual","seed":0,"queries":[[1],[2],[3],[4]]}"#,
        r#"{"n":5,"k":2,"alpha":2,"beta":1,"construction":"manual","seed":0,"queries":[[1,2],[2,3],[3,4],[4,5],[1,5]]}"#,
    ];
    for (i, s) in seqs.iter().enumerate() {
        let name = format!("s{i}.json");
        write(d.path(), &name, s);
        for fb in ["par", "full", "f1", "f2"] {
            let a = gt(d.path(), &["verify", "--seq", &name, "--feedback", fb, "--criterion", "prop2"]);
            let b = gt(d.path(), &["verify", "--seq", &name, "--feedback", fb, "--criterion", "def6", "--adversary", "malicious"]);
            assert_eq!(code(&a), code(&b), "{name} {fb}");
        }
    }
}

#[test]
fn cap_breach_exits_two() {
    let d = TempDir::new().unwrap();
    write(d.path(), "one.json", SINGLE_FULL_QUERY);
    let out = gt(d.path(), &["--cap-pairs", "2", "verify", "--seq", "one.json", "--feedback", "par"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("resource-limit"));
    let out = gt(d.path(), &["verify", "--seq", "one.json", "--feedback", "par", "--cap-subsets", "3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn decode_round_trip_and_failures() {
    let d = TempDir::new().unwrap();
    gt(d.path(), &["generate", "--construction", "selector", "--n", "7", "--alpha", "3", "-o", "s.json"]);
    let sim = gt(d.path(), &["simulate", "--seq", "s.json", "--feedback", "full", "--hidden", "2,5", "-o", "obs.json"]);
    assert_eq!(code(&sim), 0, "{}", stderr(&sim));
    let dec = gt(d.path(), &["decode", "--seq", "s.json", "--feedback", "full", "--k", "2", "--observed", "obs.json"]);
    assert_eq!(code(&dec), 0);
    assert_eq!(stdout(&dec).trim(), "2 5");

    let short = write(d.path(), "short.json", r#"["000000"]"#);
    let dec = gt(
        d.path(),
        &["decode", "--seq", "s.json", "--feedback", "full", "--observed", short.to_str().unwrap()],
    );
    assert_eq!(code(&dec), 2);
    assert!(stderr(&dec).contains("length-mismatch"));

    // FULL over 5 elements with capacity 1 never produces 111
    gt(d.path(), &["generate", "--construction", "selector", "--n", "5", "--alpha", "1", "-o", "s5.json"]);
    write(d.path(), "bad.json", r#"["111","111","111","111","111"]"#);
    let dec = gt(d.path(), &["decode", "--seq", "s5.json", "--feedback", "full", "--k", "2", "--observed", "bad.json"]);
    assert_eq!(code(&dec), 4);
    assert_eq!(stdout(&dec).trim(), "NO_CANDIDATE");
}

#[test]
fn witness_vector_decodes_ambiguously() {
    let d = TempDir::new().unwrap();
    write(d.path(), "one.json", SINGLE_FULL_QUERY);
    let v = gt(d.path(), &["verify", "--seq", "one.json", "--feedback", "par", "--k", "2"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    let k1: Vec<String> = report["witness"]["K1"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.to_string())
        .collect();
    gt(d.path(), &["simulate", "--seq", "one.json", "--feedback", "par", "--hidden", &k1.join(","), "-o", "o.json"]);
    let dec = gt(d.path(), &["decode", "--seq", "one.json", "--feedback", "par", "--k", "2", "--observed", "o.json"]);
    assert_eq!(code(&dec), 3);
    let text = stdout(&dec);
    assert!(text.starts_with("AMBIGUOUS"));
    assert!(text.lines().any(|l| l == "1 2") && text.lines().any(|l| l == "{}"), "{text}");
}

#[test]
fn bcc_and_counterexample_commands() {
    let d = TempDir::new().unwrap();
    let out = gt(d.path(), &["bcc", "--n", "12", "--gamma", "2", "-o", "c.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(json["codewords"].as_array().unwrap().len(), 12);
    let out = gt(d.path(), &["bcc", "--n", "12", "--gamma", "2", "--width", "6"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("budget-infeasible"));

    write(
        d.path(),
        "q.json",
        r#"{"n":8,"k":3,"alpha":2,"beta":1,"construction":"manual","seed":0,"queries":[[1,2,3,4,5,6,7,8]]}"#,
    );
    let out = gt(d.path(), &["counterexample-f1", "--seq", "q.json"]);
    assert_eq!(code(&out), 0);
    let pair: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(pair, serde_json::json!({"K1": [1, 2, 8], "K2": [1, 2]}));
}

#[test]
fn separation_appends_csv_rows() {
    let d = TempDir::new().unwrap();
    let args = [
        "separation", "--n", "64", "--k", "8", "--alpha", "2", "--delta", "2", "--samples", "20000", "--seed", "3", "-o",
        "sep.csv",
    ];
    assert_eq!(code(&gt(d.path(), &args)), 0);
    assert_eq!(code(&gt(d.path(), &args)), 0);
    let text = fs::read_to_string(d.path().join("sep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "n,k,alpha,delta,samples,empirical,bound,passed");
    assert_eq!(lines[1], lines[2]);
    assert!(lines[1].ends_with(",true"));
}

#[test]
fn experiment_sweep_scales_with_alpha() {
    let d = TempDir::new().unwrap();
    write(
        d.path(),
        "exp.json",
        r#"{"grid":{"n":[16],"k":[4],"alpha":[1,2,4],"construction":["binary"]},"seeds":[1,2],"outputs":{"csv":"out.csv"}}"#,
    );
    let out = gt(d.path(), &["--jobs", "2", "experiment", "exp.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut rdr = csv::Reader::from_path(d.path().join("out.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    let length = |r: &csv::StringRecord| r[col("length")].parse::<usize>().unwrap();
    // seeds change nothing about lengths
    for pair in rows.chunks(2) {
        assert_eq!(length(&pair[0]), length(&pair[1]));
    }
    let (l1, l2, l4) = (length(&rows[0]), length(&rows[2]), length(&rows[4]));
    assert!(l1 > l2 && l2 > l4, "{l1} {l2} {l4}");
    for r in &rows {
        assert!(["true", "false"].contains(&&r[col("verified")]));
        assert!(r[col("attempts")].parse::<usize>().unwrap() >= 1);
    }
}

#[test]
fn experiment_compares_feedbacks() {
    let d = TempDir::new().unwrap();
    write(
        d.path(),
        "exp.json",
        r#"{"grid":{"n":[12],"k":[3],"alpha":[3],"construction":["full","binary"]},"seeds":[4]}"#,
    );
    let out = gt(d.path(), &["experiment", "exp.json", "-o", "o.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(d.path().join("o.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("full,12,3,3,1,1,full,malicious,4,"));
    assert!(lines[2].starts_with("binary,12,3,3,1,1,par,malicious,4,"));
}

#[test]
fn experiment_flushes_rows_before_a_cap_breach() {
    let d = TempDir::new().unwrap();
    write(
        d.path(),
        "exp.json",
        r#"{"grid":{"n":[6,16],"k":[3],"alpha":[2],"construction":["selector"]},"seeds":[1]}"#,
    );
    let out = gt(d.path(), &["--cap-pairs", "20000", "experiment", "exp.json", "-o", "o.csv"]);
    assert_ne!(code(&out), 0);
    let text = fs::read_to_string(d.path().join("o.csv")).unwrap();
    assert_eq!(text.lines().count(), 2, "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("selector,6,"));
}

#[test]
fn experiment_rejects_invalid_grid_points() {
    let d = TempDir::new().unwrap();
    write(
        d.path(),
        "exp.json",
        r#"{"grid":{"n":[8],"k":[2],"alpha":[3],"construction":["binary"]}}"#,
    );
    let out = gt(d.path(), &["experiment", "exp.json", "-o", "o.csv"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("capacity-exceeds-k"));
    assert!(!d.path().join("o.csv").exists());
}
