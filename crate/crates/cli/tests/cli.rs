use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quadric_cto::bundles::{reconstruct_hypersurface, BundleMatrix};
use quadric_cto::forms::HomogeneousForm;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadric-cto"))
}

/// A fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quadric-cto-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn run_to(dir: &Path, file: &str, args: &[&str]) -> (Output, String) {
    let path = dir.join(file);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--out", &p]);
    let out = run(&full);
    let text = fs::read_to_string(&path).unwrap_or_default();
    (out, text)
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn every_command_is_deterministic() {
    let dir = scratch("determinism");
    let residue_input = dir.join("class.json");
    fs::write(&residue_input, r#"{"n": 2, "factors": ["x1", "x2", "x0 + x2"], "symbols": [[[0, 1], [1, 2]]]}"#).unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["construct", "--n", "2", "--r", "2", "--variant", "c", "--seed", "7"],
        vec!["construct", "--n", "3", "--r", "4", "--variant", "ctildeprime", "--seed", "2"],
        vec!["verify", "--n", "3", "--seed", "5"],
        vec!["classify", "--n", "3", "--r", "5", "--d", "40"],
        vec!["hypersurface", "--n", "2", "--r", "2", "--d", "2", "--seed", "3"],
        vec!["doublecover", "--n", "2", "--r", "2", "--d", "2", "--seed", "3"],
        vec!["residue", "--class", residue_input.to_str().unwrap(), "--divisor", "0"],
    ];
    for args in commands {
        let (a, first) = run_to(&dir, "a.json", &args);
        let (b, second) = run_to(&dir, "b.json", &args);
        assert_eq!(code(&a), 0, "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(code(&b), 0);
        assert!(!first.is_empty());
        assert_eq!(first, second, "{args:?} output differs between runs");
        let ma = fs::read_to_string(dir.join("a.json.manifest.json")).unwrap();
        let mb = fs::read_to_string(dir.join("b.json.manifest.json")).unwrap();
        assert_eq!(ma.replace("a.json", "b.json"), mb);
    }
}

#[test]
fn construct_writes_the_n2_ledger() {
    let dir = scratch("construct");
    let (out, text) = run_to(&dir, "c.json", &["construct", "--n", "2", "--r", "2", "--variant", "c", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let v = json(&text);
    assert_eq!(v["schema"], "bundle/1");
    assert_eq!(v["ledger"]["m"], serde_json::json!([0, 2, 8, 10]));
    assert_eq!(v["model"]["padding"], serde_json::json!([0, 0, 0, 0]));
    assert_eq!(v["config"]["schema"], "cto/1");
    let manifest = json(&fs::read_to_string(dir.join("c.json.manifest.json")).unwrap());
    assert_eq!(manifest["command"], "construct");
    assert_eq!(manifest["flags"]["seed"], "7");
}

#[test]
fn construct_rejects_r_outside_the_range() {
    let out = run(&["construct", "--n", "2", "--r", "3", "--variant", "c"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("r = 3"));
}

#[test]
fn verify_seeded_and_from_construct_output() {
    let dir = scratch("verify");
    let (out, text) = run_to(&dir, "v.json", &["verify", "--n", "3", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let cert = json(&text);
    assert_eq!(cert["verdict"], "certified");
    for check in ["c1", "c2", "c3", "c4"] {
        assert_eq!(cert[check]["status"], "pass");
    }
    let (built, _) = run_to(&dir, "c.json", &["construct", "--n", "2", "--r", "1", "--seed", "4"]);
    assert_eq!(code(&built), 0);
    let config = dir.join("c.json");
    let out = run(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn corrupted_config_exits_2_and_names_the_check() {
    let dir = scratch("corrupt");
    let (_, text) = run_to(&dir, "c.json", &["construct", "--n", "2", "--r", "2", "--seed", "9"]);
    let mut config = json(&text)["config"].clone();
    // Change one coefficient of g_(1,1) so it is no longer g_(1,0) + h_1.
    config["g"][0][1]["terms"][0][1] = Value::String("12345/1".into());
    let path = dir.join("corrupt.json");
    fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();
    let (out, text) = run_to(&dir, "cert.json", &["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("C4"));
    assert_eq!(json(&text)["c4"]["status"], "fail");
}

#[test]
fn malformed_json_exits_1() {
    let dir = scratch("malformed");
    let path = dir.join("bad.json");
    fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(&run(&["verify", "--config", path.to_str().unwrap()])), 1);
    assert_eq!(code(&run(&["verify", "--config", dir.join("missing.json").to_str().unwrap()])), 1);
    assert_eq!(code(&run(&["residue", "--class", path.to_str().unwrap(), "--divisor", "0"])), 1);
}

#[test]
fn classify_examples() {
    let v = json(&String::from_utf8(run(&["classify", "--n", "4", "--r", "8"]).stdout).unwrap());
    assert_eq!(v["k"], 4);
    assert_eq!(v["in_threshold_range"], true);
    let v = json(&String::from_utf8(run(&["classify", "--n", "2", "--r", "1", "--d", "5"]).stdout).unwrap());
    assert_eq!(v["flags"][0]["threshold"], 5);
    assert_eq!(v["flags"][0]["met"], true);
    let v = json(&String::from_utf8(run(&["classify", "--n", "2", "--r", "3"]).stdout).unwrap());
    assert_eq!(v["lang_rational"], true);
    assert_eq!(code(&run(&["classify", "--n", "0", "--r", "3"])), 1);
}

#[test]
fn hypersurface_output_re_verifies() {
    let dir = scratch("hypersurface");
    let (out, text) = run_to(&dir, "h.json", &["hypersurface", "--n", "2", "--r", "1", "--d", "2", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&text);
    assert_eq!(v["matrix"]["type"], serde_json::json!([2, 2, 4]));
    let form: HomogeneousForm = serde_json::from_value(v["form"].clone()).unwrap();
    let matrix: BundleMatrix = serde_json::from_value(v["matrix"].clone()).unwrap();
    assert_eq!(form.degree(), 4);
    assert_eq!(reconstruct_hypersurface(&matrix).unwrap(), form);
}

#[test]
fn double_cover_needs_even_degree() {
    assert_eq!(code(&run(&["doublecover", "--n", "2", "--r", "1", "--d", "3"])), 1);
    let v = json(&String::from_utf8(run(&["doublecover", "--n", "2", "--r", "2", "--d", "2"]).stdout).unwrap());
    assert_eq!(v["matrix"]["type"], serde_json::json!([0, 2, 2, 4]));
}

#[test]
fn residue_examples_through_files() {
    let dir = scratch("residue");
    let cases = [
        // (x1 x2, x2 (x0 + x2)) along x1: one odd entry.
        (r#"{"n": 2, "factors": ["x1", "x2", "x0 + x2"], "symbols": [[[0, 1], [1, 2]]]}"#, 0, Some("(x1)*(x0 + x1)")),
        // Units along x1 + x2.
        (r#"{"n": 2, "factors": ["x0 + x1", "x0 + x2", "x1 + x2"], "symbols": [[[0], [1]]]}"#, 2, None),
        // (x1 u1, x1 u2) along x1: two odd entries give (u1 u2).
        (r#"{"n": 2, "factors": ["x1", "x0 + x2", "x0 + 2*x2"], "symbols": [[[0, 1], [0, 2]]]}"#, 0, Some("(x0 + x1)*(x0 + 2*x1)")),
    ];
    for (i, (input, divisor, expected)) in cases.into_iter().enumerate() {
        let path = dir.join(format!("in{i}.json"));
        fs::write(&path, input).unwrap();
        let d = divisor.to_string();
        let (out, text) = run_to(&dir, "out.json", &["residue", "--class", path.to_str().unwrap(), "--divisor", &d]);
        assert_eq!(code(&out), 0);
        let v = json(&text);
        assert_eq!(v["schema"], "residue/1");
        match expected {
            None => assert_eq!(v["is_zero"], true),
            Some(text) => assert_eq!(v["readable"], serde_json::json!([[text]])),
        }
    }
}

#[test]
fn residue_errors() {
    let dir = scratch("residue-bad");
    let path = dir.join("in.json");
    // The chart hyperplane x0 = 0 carries no residue in this model.
    fs::write(&path, r#"{"n": 2, "factors": ["x0", "x1"], "symbols": [[[0], [1]]]}"#).unwrap();
    let out = run(&["residue", "--class", path.to_str().unwrap(), "--divisor", "0"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    // A quadric is not a divisor of the supported kind.
    fs::write(&path, r#"{"n": 2, "factors": ["x0^2 + x1^2 + x2^2"], "symbols": [[[0]]]}"#).unwrap();
    assert_eq!(code(&run(&["residue", "--class", path.to_str().unwrap(), "--divisor", "0"])), 1);
    assert_eq!(code(&run(&["residue", "--class", path.to_str().unwrap(), "--divisor", "5"])), 1);
}
