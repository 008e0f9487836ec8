use std::process::{Command, Output};

use afl::report::ReportJson;
use afl::schema::InstanceJson;

const ODD_LINE: &str = r#"{"field":{"p":3},"gram":[[3]],"x":[[0]],"j":[1]}"#;

fn afl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afl"))
        .args(args)
        .env_remove("AFL_FORMAT")
        .env_remove("AFL_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn reports(o: &Output) -> Vec<ReportJson> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn orbital_odd_line() {
    let o = afl(&["orbital", ODD_LINE]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"], serde_json::json!({"0": 1, "1": 1}));
    assert_eq!(v["series"], serde_json::json!([[0, 1], [1, -1]]));
    assert_eq!(v["derived"], 1);
    assert_eq!(v["stable"], true);
}

#[test]
fn parity_of_forms() {
    let o = afl(&["parity", r#"{"field":{"p":5},"gram":[[1,0],[0,5]]}"#]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["parity"], "odd");
    assert_eq!(v["dual_index"], 1);
    let o = afl(&["parity", r#"{"field":{"p":5},"gram":[[5,0],[0,5]]}"#]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["parity"], "even");
}

#[test]
fn non_hermitian_gram_is_a_schema_error() {
    let bad = r#"{"field":{"p":3},"gram":[[1,1],[2,1]],"x":[[0,0],[0,0]],"j":[1,1]}"#;
    let o = afl(&["fl-check", bad]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(reports(&o)[0].verdict, "invalid");
    assert_eq!(afl(&["orbital", bad]).status.code(), Some(2));
    assert_eq!(afl(&["orbital", "{not json"]).status.code(), Some(2));
    assert_eq!(afl(&["orbital", r#"{"field":{"p":3},"gram":[[1]],"x":[[0]],"j":[1],"extra":1}"#]).status.code(), Some(2));
}

#[test]
fn check_failure_exits_one() {
    // an odd pair fed to the FL check is a precondition failure
    let o = afl(&["fl-check", ODD_LINE]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(reports(&o)[0].verdict, "fail");
}

#[test]
fn cap_exits_three_with_required_size() {
    let o = afl(&["vanishing-check", "--cap", "2", r#"{"field":{"p":3},"gram":[[27]],"x":[[0]],"j":[1]}"#]);
    assert_eq!(o.status.code(), Some(3));
    let r = &reports(&o)[0];
    assert_eq!(r.verdict, "cap");
    assert!(r.diagnostics[0].contains("729"), "{:?}", r.diagnostics);
}

#[test]
fn vanishing_batch_of_seeded_odd_instances() {
    let g = afl(&["gen", "--p", "3", "--n", "2", "--parity", "odd", "--count", "100", "--seed", "1000"]);
    assert_eq!(g.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("odd.jsonl");
    std::fs::write(&path, stdout(&g)).unwrap();
    let o = afl(&["vanishing-check", "--jobs", "4", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = reports(&o);
    assert_eq!(r.len(), 100);
    assert!(r.iter().all(|x| x.passed() && x.precisions.len() == 2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["scan", "--p", "3", "--n", "2", "--parity", "even", "--count", "12", "--seed", "7", "--jobs", "3"];
    let a = afl(&args);
    let b = afl(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let g1 = afl(&["gen", "--count", "5", "--seed", "3"]);
    let g2 = afl(&["gen", "--count", "5", "--seed", "3"]);
    assert_eq!(g1.stdout, g2.stdout);
    // reports come out in digest order
    let r = reports(&a);
    assert!(r.windows(2).all(|w| w[0].inputs_digest <= w[1].inputs_digest));
}

#[test]
fn generated_instances_round_trip() {
    let g = afl(&["gen", "--count", "4", "--seed", "11", "--structure", "split", "--n", "3", "--parity", "even"]);
    for line in stdout(&g).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let inst = InstanceJson::parse(v).unwrap();
        assert_eq!(inst.canonical(), line);
        let back = InstanceJson::from_data(&inst.to_data().unwrap());
        assert_eq!(back, inst);
    }
}

#[test]
fn scan_resumes_from_journal() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("journal.jsonl");
    let js = j.to_str().unwrap();
    let first = afl(&["scan", "--count", "6", "--seed", "40", "--journal", js]);
    assert_eq!(first.status.code(), Some(0));
    let lines = std::fs::read_to_string(&j).unwrap().lines().count();
    assert_eq!(lines, 6);
    // a larger scan only adds the new instances
    let second = afl(&["scan", "--count", "9", "--seed", "40", "--journal", js]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&j).unwrap().lines().count(), 9);
    let a = reports(&first);
    let b = reports(&second);
    assert_eq!(b.len(), 9);
    assert!(a.iter().all(|r| b.contains(r)));
    // a torn final line is ignored
    let mut text = std::fs::read_to_string(&j).unwrap();
    text.push_str("{\"digest\":\"abc\",\"rep");
    std::fs::write(&j, text).unwrap();
    assert_eq!(afl(&["scan", "--count", "9", "--seed", "40", "--journal", js]).stdout, second.stdout);
}

#[test]
fn product_base_change_and_extension_checks() {
    let split = afl(&["gen", "--count", "3", "--seed", "5", "--structure", "split", "--n", "2", "--parity", "odd"]);
    let o = afl(&["product-check", &stdout(&split)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let bc = r#"{"kind":"base_change","field":{"p":3,"f0":3},"gram":[[3]],"x":[[{"coords":[0,1]}]],"j":[1]}"#;
    let o = afl(&["base-change-check", bc]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(reports(&o)[0].lhs, serde_json::json!([0, 3]));
    assert_eq!(afl(&["base-change-check", ODD_LINE]).status.code(), Some(2));
    let group = r#"{"field":{"p":3},"gram":[[3]],"x":[[0]],"j":[1],"stability":"group","cayley":true}"#;
    let o = afl(&["extend-check", group]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = afl(&["extend-check", ODD_LINE]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn witt_check_and_formats() {
    let o = afl(&["witt-check", r#"{"p":3,"e":2,"len":2}"#]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(reports(&o).len(), 7);
    assert_eq!(afl(&["witt-check", r#"{"p":3,"len":9}"#]).status.code(), Some(2));
    let csv = afl(&["--format", "csv", "vanishing-check", ODD_LINE]);
    let text = stdout(&csv);
    assert!(text.starts_with("identity,inputs_digest,verdict"));
    assert_eq!(text.lines().count(), 2);
    let env = Command::new(env!("CARGO_BIN_EXE_afl"))
        .args(["vanishing-check", ODD_LINE])
        .env("AFL_FORMAT", "pretty")
        .output()
        .unwrap();
    assert!(stdout(&env).starts_with("[PASS] vanishing"));
}

#[test]
fn precision_flag_sets_the_start() {
    let o = afl(&["--precision", "20", "vanishing-check", ODD_LINE]);
    assert_eq!(reports(&o)[0].precisions, vec![20, 24]);
    let t = afl(&["--timings", "vanishing-check", ODD_LINE]);
    assert!(reports(&t)[0].millis.is_some());
    assert!(reports(&o)[0].millis.is_none());
}
