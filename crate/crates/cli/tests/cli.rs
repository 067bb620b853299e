use std::process::{Command, Output};

fn cwilf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwilf"))
        .args(args)
        .env_remove("CWILF_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = cwilf(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn occurrence_positions() {
    assert_eq!(stdout(&["occ", "--pattern", "231", "--perm", "245361"]), "{\"positions\":[2,4]}\n");
    assert_eq!(stdout(&["occ", "--pattern", "2,3,1", "--perm", "1,2,3"]), "{\"positions\":[]}\n");
}

#[test]
fn overlap_report() {
    assert_eq!(
        stdout(&["overlap", "--pattern", "2143"]),
        "{\"indices\":[2,3],\"nonoverlapping\":false,\"pattern\":\"2143\",\"standard_form\":\"2143\",\"symmetry\":\"identity\"}\n"
    );
    let v = json(&["overlap", "--pattern", "16358472"]);
    assert_eq!(v["indices"], serde_json::json!([7]));
    assert_eq!(v["nonoverlapping"], true);
}

#[test]
fn cluster_counts() {
    assert_eq!(stdout(&["cluster", "--pattern", "23514", "--n", "12", "--marks", "1,4,8"]), "148\n");
    assert_eq!(stdout(&["cluster", "--pattern", "25134", "--n", "12", "--marks", "1,4,8"]), "180\n");
    assert_eq!(stdout(&["cluster", "--pattern", "23567184", "--n", "15", "--k", "2"]), "840\n");
    assert_eq!(stdout(&["cluster", "--pattern", "23514", "--n", "12", "--marks", "1,4,9"]), "0\n");
}

#[test]
fn series_json_uses_decimal_strings() {
    let v = json(&["gf", "--pattern", "123", "--nmax", "4"]);
    assert_eq!(v[4], serde_json::json!({"coeffs": ["17", "6", "1"], "n": 4}));
    let r = json(&["gf", "--pattern", "23567184", "--nmax", "15", "--cluster"]);
    assert_eq!(r[15]["coeffs"][2], "840");
}

#[test]
fn classify_formats() {
    let v = json(&["classify", "--m", "4", "--level", "strong", "--nmax", "13"]);
    assert_eq!(v["classes"].as_array().unwrap().len(), 7);
    assert_eq!(v["level"], "strong");
    assert_eq!(v["horizon"], 13);
    let table = stdout(&["classify", "--m", "4", "--level", "superstrong", "--nmax", "13", "--format", "table"]);
    assert!(table.starts_with("# m=4 strong=7 superstrong=8"), "{table}");
    assert!(table.lines().any(|l| l == "1423, 4132 | 2314, 3241"), "{table}");
    let cwilf = json(&["classify", "--m", "4", "--level", "c-wilf", "--nmax", "10"]);
    // at length 4 avoider counts already separate every strong class
    assert_eq!(cwilf["classes"].as_array().unwrap().len(), 7);
}

#[test]
fn output_is_independent_of_worker_count() {
    let args = ["classify", "--m", "5", "--level", "superstrong", "--nmax", "13"];
    let one = stdout(&[&["--jobs", "1"], &args[..]].concat());
    let many = stdout(&[&["--jobs", "4"], &args[..]].concat());
    assert_eq!(one, many);
}

#[test]
fn asymptotic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nk.csv");
    stdout(&["asym", "--pattern", "34671285", "--kmax", "6", "--out", path.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,N_k,lower_bound,upper_bound,pattern,a,b");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("2,") && lines[1].ends_with(",34671285,3,5"));

    let v = json(&["asym", "--m", "8", "--a", "2", "--b", "4", "--kmax", "3"]);
    assert_eq!(v["realization"], "23567184");
    assert_eq!(v["triples"][1]["actual"], "11642400");
}

#[test]
fn exit_codes() {
    let bad = cwilf(&["occ", "--pattern", "2x1", "--perm", "123"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("2x1"));
    assert_eq!(cwilf(&["occ", "--pattern", "224", "--perm", "123"]).status.code(), Some(2));
    assert_eq!(cwilf(&["classify", "--m", "9", "--level", "cwilf"]).status.code(), Some(3));
    let tight = cwilf(&["--max-states", "50", "cluster", "--pattern", "2413", "--n", "30", "--k", "10"]);
    assert_eq!(tight.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&tight.stderr).contains("downset-states"));
    assert_eq!(cwilf(&["asym", "--m", "8", "--a", "5", "--b", "6"]).status.code(), Some(2));
}

#[test]
fn cache_file_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.jsonl");
    let cache = path.to_str().unwrap();
    let args = ["--cache", cache, "cluster", "--pattern", "23514", "--n", "12", "--marks", "1,4,8"];
    assert_eq!(stdout(&args), "148\n");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains(r#"{"pattern":"2,3,5,1,4","n":12,"marks":[1,4,8],"count":"148"}"#), "{text}");
    assert_eq!(stdout(&args), "148\n");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text, "a hit appends nothing");

    let out = Command::new(env!("CARGO_BIN_EXE_cwilf"))
        .args(["cluster", "--pattern", "23567184", "--n", "15", "--k", "2"])
        .env("CWILF_CACHE", cache)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "840\n");
    assert!(std::fs::read_to_string(&path).unwrap().contains(r#""k":2,"count":"840""#));
}

#[test]
fn verify_paper_fast_tier_passes() {
    let text = stdout(&["verify-paper", "--tier", "fast"]);
    assert!(text.lines().all(|l| !l.starts_with("FAIL")), "{text}");
    assert!(text.trim_end().ends_with("11 of 11 checks passed"), "{text}");
}
