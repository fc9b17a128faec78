use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn engulf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_engulf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = engulf(&all);
    let v = serde_json::from_str(&stdout(&o)).expect("one JSON object");
    (v, o.status.code().expect("exit code"))
}

fn pres(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn reduce_prints_identity_as_one() {
    let o = engulf(&["reduce", "abBA"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
    assert_eq!(stdout(&engulf(&["reduce", "aabB", "1", "Ab"])), "aa\n1\nAb\n");
}

#[test]
fn engulf_squares_has_index_two_witness() {
    let (v, code) = json(&["engulf", "--gens", "aa,bb", "--max-index", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"]["size"], 2);
    assert_eq!(v["searched_to"], 2);
}

#[test]
fn engulf_negative_verdict_exits_zero() {
    let (v, code) = json(&["engulf", "--gens", "a,b", "--max-index", "3"]);
    assert_eq!(code, 0);
    assert!(v["witness"].is_null());
}

#[test]
fn infinite_index_enumeration_is_bounded_search() {
    let dir = tempfile::tempdir().unwrap();
    let p = pres(dir.path(), "z2.pres", "gens: a b\nrel: abAB\n");
    let p = p.to_str().unwrap();
    let (v, code) = json(&["enum", "--pres", p, "--gens", "a", "--max-cosets", "50"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "bounded_search");
    assert_eq!(v["searched_to"], 50);
    let o = engulf(&["enum", "--pres", p, "--gens", "a", "--max-cosets", "50"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn finite_enumeration_over_presentation() {
    let dir = tempfile::tempdir().unwrap();
    let p = pres(dir.path(), "s3.pres", "gens: a b\nrel: aaa\nrel: bb\nrel: abab\n");
    let (v, code) = json(&["enum", "--pres", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["size"], 6);
    let (v, _) = json(&["index", "--pres", p.to_str().unwrap(), "--gens", "b"]);
    assert_eq!(v["index"], 3);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(engulf(&["bogus"]).status.code(), Some(1));
    assert_eq!(engulf(&[]).status.code(), Some(1));
    assert_eq!(engulf(&["fold"]).status.code(), Some(1));
    assert_eq!(engulf(&["member", "--gens", "ab", "a#"]).status.code(), Some(1));
    let (v, code) = json(&["fixed", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "no_axis");
    let (_, code) = json(&["member", "--rank", "2", "--gens", "ab", "c"]);
    assert_eq!(code, 1);
}

#[test]
fn membership_and_index() {
    assert_eq!(stdout(&engulf(&["member", "--gens", "ab,bA", "abbA"])), "yes\n");
    assert_eq!(stdout(&engulf(&["member", "--gens", "ab,bA", "a"])), "no\n");
    assert_eq!(stdout(&engulf(&["index", "--gens", "aa,ab,ba"])), "2\n");
    assert_eq!(stdout(&engulf(&["index", "--gens", "ab"])), "infinite\n");
    let (v, _) = json(&["member", "--gens", "ab,bA", "abbA"]);
    assert_eq!(v["member"], true);
}

#[test]
fn boundary_commands() {
    assert_eq!(stdout(&engulf(&["fixed", "ab"])), "+ (ab)\n- (BA)\n");
    assert_eq!(stdout(&engulf(&["absorb", "ab", "--plus", "ab", "--minus", "BA"])), "2\n");
    let o = engulf(&["schottky", "--gens", "aa,bb", "--pairs", "a/A,b/B"]);
    assert_eq!(o.status.code(), Some(0));
    let o = engulf(&["schottky", "--gens", "aa,bb", "--pairs", "a/A,a/B"]);
    assert_eq!(o.status.code(), Some(1));
    let (v, code) = json(&["limitset", "--gens", "ab", "--depth", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["proper"], true);
}

#[test]
fn hall_witness_excludes_word() {
    let (v, code) = json(&["hall", "--gens", "ab", "aa"]);
    assert_eq!(code, 0);
    assert_eq!(v["excluded"], "aa");
    assert!(v["witness"]["size"].as_u64().unwrap() >= 2);
}

#[test]
fn experiments_verify() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["experiment", "resfin", "--normal", "aa,ab,ba"],
        &["experiment", "subgpsep", "--gens", "ab"],
        &["experiment", "nonengulfed", "--max-index", "3"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let path = dir.path().join(format!("r{i}.json"));
        let mut all = args.to_vec();
        all.extend(["--json", "--out", path.to_str().unwrap()]);
        let o = engulf(&all);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert!(o.stdout.is_empty());
        let (v, code) = json(&["verify", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(v["valid"], true);
    }
}

#[test]
fn verify_rejects_tampered_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = engulf(&["experiment", "resfin", "--normal", "aa,ab,ba", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    v["certificate"]["torfree"]["new_generators"][0] = Value::from("a");
    fs::write(&path, v.to_string()).unwrap();
    let (v, code) = json(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["valid"], false);
}

#[test]
fn same_seed_gives_identical_output() {
    let args = ["experiment", "subgpsep", "--gens", "aab,bA", "--seed", "7", "--json"];
    assert_eq!(engulf(&args).stdout, engulf(&args).stdout);
    let args = ["pinball", "--gens", "ab", "--count", "10", "--seed", "3"];
    let o = engulf(&args);
    assert_eq!(o.stdout, engulf(&args).stdout);
    assert!(stdout(&o).ends_with("10 traces, 0 mismatches\n"));
}

const GOLDEN: &[(&str, &[&str])] = &[
    ("reduce", &["reduce", "abBA", "aBbA", "abAB"]),
    ("fold", &["fold", "--gens", "ab,bA"]),
    ("fold_json", &["fold", "--gens", "aab,bA", "--json"]),
    ("lowindex", &["lowindex", "--max-index", "3"]),
    ("engulf", &["engulf", "--gens", "aa,bb", "--max-index", "2", "--json"]),
    ("torfreegens", &["torfreegens", "--normal", "aa,ab,bb,ba"]),
    ("build_b", &["build-b", "--gens", "ab"]),
    ("pinball", &["pinball", "--gens", "ab", "--count", "8"]),
    ("resfin", &["experiment", "resfin", "--normal", "aa,ab,ba", "--json"]),
];

#[test]
fn golden_outputs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let bless = std::env::var_os("BLESS").is_some();
    for (name, args) in GOLDEN {
        let got = stdout(&engulf(args));
        let path = dir.join(format!("{name}.out"));
        if bless {
            fs::write(&path, &got).unwrap();
        } else {
            let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {name}"));
            assert_eq!(got, want, "golden {name}");
        }
    }
}
