use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn kergrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kergrad")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = kergrad(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let schema: Value =
        serde_json::from_str(include_str!("../schema/output.schema.json")).expect("schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}");
    v
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn estimate_on_the_largest_box() {
    let o = kergrad(&["estimate", "--field", "3", "--boxes", "6:6,10:8", "--no-meta"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("box,dim,size,estimate_num,estimate_den,estimate_float"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][..5], ["10:8", "796", "2560", "199", "640"]);
    json(&["estimate", "--boxes", "2:2", "--format", "json"]);
}

#[test]
fn census_lists_paths() {
    let v = json(&["census", "--window", "8", "--field", "3", "--no-meta"]);
    let data = v["data"].as_array().unwrap();
    for k in 1..=6u64 {
        let row = data.iter().find(|r| r["vertices"] == k).unwrap();
        let m = kergrad::Dyadic::new(k as i64, (k + 1) as u32).to_rational();
        assert_eq!(row["measure"], format!("{}/{}", m.numer(), m.denom()));
        assert_eq!(row["kernel_dim"], k % 2);
        assert_eq!(row["interior"], true);
    }
    assert_eq!(data.last().unwrap()["interior"], false);
}

#[test]
fn closed_forms() {
    let v = json(&["closed-form", "thm13", "--prime", "3", "--no-meta"]);
    assert_eq!(v["data"]["exact"], "1993/2688");
    assert_eq!(v["data"]["tail"], "0/1");
    let v = json(&["closed-form", "sigma", "--set", "", "--no-meta"]);
    assert_eq!(v["data"]["exact"], "1/64");
    let v = json(&["closed-form", "thm12", "--trunc", "0", "--no-meta"]);
    assert_eq!(v["data"]["exact"], "1/64");
    json(&["closed-form", "thm58", "--prime", "5", "--kmax", "10", "--lmax", "10"]);
    assert_eq!(kergrad(&["closed-form", "thm13", "--prime", "2"]).status.code(), Some(2));
}

#[test]
fn table_rows_and_errors() {
    let rows = csv_rows(&stdout(&kergrad(&["table", "--primes", "3,5", "--no-meta"])));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][..4], ["3", "2", "2 4", "1993/2688"]);
    assert_eq!(rows[1][0], "5");
    let rows = csv_rows(&stdout(&kergrad(&["table", "--primes", "3,3", "--no-meta"])));
    assert_eq!(rows.len(), 1);
    assert_eq!(kergrad(&["table", "--primes", "2"]).status.code(), Some(2));
    assert_eq!(kergrad(&["table", "--primes", "9"]).status.code(), Some(2));
    json(&["table", "--primes", "3,7", "--format", "json"]);
}

#[test]
fn verify_suites() {
    for suite in ["families", "crosscheck", "closedforms"] {
        let o = kergrad(&["verify", "--suite", suite, "--no-meta"]);
        assert!(o.status.success(), "{suite}: {}", stdout(&o));
        assert!(csv_rows(&stdout(&o)).iter().all(|r| r[2] == "pass"));
    }
    assert_eq!(kergrad(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    json(&["verify", "--suite", "linalg", "--format", "json"]);
}

#[test]
fn families_check() {
    let o = kergrad(&["families", "--check", "--kmax", "3", "--lmax", "4", "--primes", "3,5"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2 * (3 + 3 + 4 + 12));
    assert!(rows.iter().all(|r| r[4] == "pass"));
    assert_eq!(kergrad(&["families", "--primes", "4"]).status.code(), Some(2));
}

#[test]
fn kernel_command() {
    let v = json(&["kernel", "--family", "Path:3", "--field", "5"]);
    assert_eq!(v["data"]["kernel_dim"], 1);
    let v = json(&["kernel", "--operator", "t + t^-1 + t u + u t^-1", "--box", "4:4"]);
    assert_eq!(v["data"]["kernel_dim"], 16);
    assert_eq!(kergrad(&["kernel", "--family", "G9:1"]).status.code(), Some(2));
}

#[test]
fn reruns_are_identical_without_meta() {
    let args = ["census", "--window", "6", "--no-meta"];
    assert_eq!(kergrad(&args).stdout, kergrad(&args).stdout);
    let with_meta = stdout(&kergrad(&["table", "--primes", "3"]));
    assert!(with_meta.lines().any(|l| l.starts_with("# generated:")));
    assert!(!stdout(&kergrad(&["table", "--primes", "3", "--no-meta"])).contains("generated"));
}

#[test]
fn output_file_and_workers() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("kergrad-table.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_kergrad"))
        .args(["table", "--primes", "5", "--no-meta", "--output", path.to_str().unwrap()])
        .env("KERGRAD_WORKERS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(csv_rows(&std::fs::read_to_string(&path).unwrap())[0][0], "5");
    let bad = Command::new(env!("CARGO_BIN_EXE_kergrad")).args(["table", "--primes", "3"]).env("KERGRAD_WORKERS", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
