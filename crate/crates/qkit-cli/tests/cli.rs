use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn qkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkit")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = qkit(&all);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn validator() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

#[test]
fn bell_counts_are_balanced() {
    let r = json(&["run", &data("bell.qasm"), "--shots", "1000", "--seed", "7"]);
    let counts = &r["result"]["counts"];
    let n00 = counts["00"].as_u64().unwrap();
    let n11 = counts["11"].as_u64().unwrap();
    assert_eq!(n00 + n11, 1000);
    assert!((n00 as i64 - 500).abs() < 60, "{counts}");
    assert_eq!(r["config"]["seed"], 7);
    assert_eq!(r["version"], qkit::VERSION);
}

#[test]
fn statevector_dump_of_bell() {
    let r = json(&["run", &data("bell.qasm"), "--mode", "statevector"]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amp = |k: &str| r["result"]["amplitudes"][k][0].as_f64().unwrap();
    assert!((amp("00") - h).abs() < 1e-12 && (amp("11") - h).abs() < 1e-12);
    assert_eq!(amp("01"), 0.0);
}

#[test]
fn malformed_qasm_exits_2_with_position() {
    let out = qkit(&["run", &data("malformed.qasm")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("column"), "{err}");
    assert_eq!(qkit(&["run", "/nonexistent/file.qasm"]).status.code(), Some(2));
}

#[test]
fn execution_errors_exit_3() {
    let dir = std::env::temp_dir().join(format!("qkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mid.qasm");
    std::fs::write(&path, "OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\nh q[0];\nmeasure q[0] -> c[0];\nh q[0];\n").unwrap();
    let out = qkit(&["run", path.to_str().unwrap(), "--mode", "statevector"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_algorithm_and_bad_params() {
    assert_eq!(qkit(&["teleport"]).status.code(), Some(4));
    assert_eq!(qkit(&["shor", "--n", "abc"]).status.code(), Some(5));
    assert_eq!(qkit(&["shor", "--n", "13"]).status.code(), Some(5));
    assert_eq!(qkit(&["qaoa", "--graph", "triangle", "--gamma", "0.8pi"]).status.code(), Some(5));
    assert_eq!(qkit(&["qec", "--idle", "12"]).status.code(), Some(5));
    assert_eq!(qkit(&["run", &data("bell.qasm"), "--shots", "0"]).status.code(), Some(5));
}

#[test]
fn shor_factors_15() {
    let r = json(&["shor", "--n", "15"]);
    let mut f: Vec<u64> = r["result"]["factors"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    f.sort();
    assert_eq!(f, [3, 5]);
}

#[test]
fn qaoa_triangle_with_pi_literals() {
    let r = json(&["qaoa", "--graph", "triangle", "--r", "1", "--gamma", "0.8pi", "--beta", "0.4pi"]);
    let e = r["result"]["exact"]["expected_cut"].as_f64().unwrap();
    assert!((e - 1.999).abs() <= 0.005, "{e}");
    assert_eq!(r["result"]["gamma"][0].as_f64().unwrap(), 0.8 * std::f64::consts::PI);
}

#[test]
fn grover_finds_11() {
    let r = json(&["grover", "--n", "2", "--target", "3"]);
    assert_eq!(r["result"]["outcome"], "11");
}

#[test]
fn reports_are_byte_identical_per_seed() {
    for args in [
        vec!["run", "BELL", "--shots", "500", "--seed", "3", "--output", "json"],
        vec!["qec", "--noise-kind", "both", "--shots", "2000", "--seed", "9", "--output", "json"],
        vec!["minfind", "--values", "5,2,8,1,9,3", "--seed", "4", "--output", "json"],
    ] {
        let bell = data("bell.qasm");
        let args: Vec<&str> = args.iter().map(|a| if *a == "BELL" { bell.as_str() } else { a }).collect();
        let a = qkit(&args);
        let b = qkit(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn every_subcommand_matches_the_schema() {
    let v = validator();
    let bell = data("bell.qasm");
    let dir = std::env::temp_dir().join(format!("qkit-schema-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let record = dir.join("record.json");
    std::fs::write(&record, r#"{"counts": {"z": {"0": 50, "1": 50}, "y": {"0": 50, "1": 50}, "x": {"0": 100}}}"#).unwrap();
    let record = record.to_string_lossy().into_owned();
    let cases: Vec<Vec<&str>> = vec![
        vec!["run", &bell],
        vec!["run", &bell, "--mode", "statevector"],
        vec!["run", &bell, "--over-rotation", "0.05", "--shots", "200"],
        vec!["grover", "--n", "3", "--target", "5"],
        vec!["bv", "--secret", "1011"],
        vec!["qft", "--n", "3", "--input", "2"],
        vec!["shor", "--n", "15", "--compiled"],
        vec!["hhl", "--b", "-", "--shots", "512"],
        vec!["qaoa", "--graph", "triangle-edge", "--r", "2", "--gamma", "0.2pi,0.4pi", "--beta", "0.15pi,0.05pi", "--shots", "100"],
        vec!["qaoa", "--edges", "0-1,1-2", "--grid", "8"],
        vec!["walk", "--steps", "4", "--shots", "50"],
        vec!["vqe", "--n", "3", "--h", "0.5", "--restarts", "1", "--max-iters", "100", "--shots", "200"],
        vec!["pca", "--x1", "4,3,4,4,3", "--x2", "3.0,1.3,2.7,2.5,1.3"],
        vec!["potts", "--edges", "0-1:1.0,1-2:0.5", "--q", "3", "--beta", "0.7"],
        vec!["schrodinger", "--n", "2", "--phi", "pi/2", "--steps", "3", "--initial", "[0,1,1,0]"],
        vec!["minfind", "--values", "3,7,1,9,4,6,2,8"],
        vec!["layered", "--nodes", "5", "--edges", "0-1,1-2,2-3"],
        vec!["group", "--group", "a4", "--element", "1", "--part", "im", "--shots", "400"],
        vec!["prep", "--amplitudes", "[[0.5,0],[0,0.5],[0.5,0],[0,-0.5]]"],
        vec!["synth", "--unitary", "[[1,0,0,0],[0,1,0,0],[0,0,0,1],[0,0,1,0]]"],
        vec!["tomography", "--povm", "bell", "--state", "[0,0.7071067811865476,0.7071067811865476,0]"],
        vec!["tomography", "--circuit", &bell, "--povm", "products:2", "--method", "both", "--shots", "300"],
        vec!["tomography", "--record", &record],
        vec!["qec", "--noise-kind", "rotation", "--shots", "500"],
    ];
    for args in cases {
        let r = json(&args);
        let errors: Vec<String> = v.iter_errors(&r).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    // The schema does reject malformed reports.
    let mut bad = json(&["grover", "--n", "2", "--target", "3"]);
    bad["result"].as_object_mut().unwrap().remove("outcome");
    assert!(!v.is_valid(&bad));
}

#[test]
fn tomography_recovers_plus_state() {
    let r = json(&["tomography", "--state", "[1,1]", "--method", "both"]);
    assert!(r["result"]["ml"]["fidelity"].as_f64().unwrap() > 0.9999);
    assert!(r["result"]["linear"]["fidelity"].as_f64().unwrap() > 0.9999);
}

#[test]
fn qec_bitflip_is_suppressed() {
    let r = json(&["qec", "--noise-kind", "bitflip", "--p", "0.1", "--shots", "20000"]);
    let enc = r["result"]["p_encoded"].as_f64().unwrap();
    let raw = r["result"]["p_unencoded"].as_f64().unwrap();
    assert!(enc < raw && (enc - 0.028).abs() < 0.006, "{enc} vs {raw}");
}

#[test]
fn prep_emits_qasm_that_reparses() {
    let r = json(&["prep", "--amplitudes", "[0.6,0.8]"]);
    let src = r["result"]["qasm"].as_str().unwrap();
    let s = qkit::circuit::parse_qasm(src).unwrap().run_statevector().unwrap();
    assert!((s.probabilities()[1] - 0.64).abs() < 1e-12);
}

#[test]
fn text_output_is_readable() {
    let out = qkit(&["grover", "--n", "2", "--target", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("qkit ") && text.contains("outcome: 11"), "{text}");
}
