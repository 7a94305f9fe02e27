use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use luequiv::io::{manifest_to_json, operator_to_json};
use luequiv::random::{haar_unitary, random_density, random_local_unitary, sub_rng};
use luequiv::{BipartiteOperator, ComplexMatrix};

fn luequiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_luequiv"))
        .args(args)
        .env_remove("LUEQUIV_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write_operator(dir: &Path, name: &str, op: &BipartiteOperator) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, operator_to_json(op).to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_fixtures() {
    let out = luequiv(&["classify", "paper.rho1", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["output"]["is_npt"], true);
    assert!(v.get("timings_ms").is_none());

    let v = json(&luequiv(&["classify", "maximally_mixed.2x2", "--json"]));
    assert_eq!(v["output"]["is_ppt"], true);
    assert_eq!(v["output"]["extremal"], "neither");

    let v = json(&luequiv(&["classify", "paper.tiles_upb_state", "--json"]));
    assert_eq!(v["output"]["ppt_entangled_candidate"], true);
}

#[test]
fn text_output_has_header() {
    let out = luequiv(&["classify", "paper.rho1"]);
    let text = stdout(&out);
    assert!(text.starts_with("luequiv classify (seed 42)"), "{text}");
    assert!(text.contains("NPT"));
}

#[test]
fn lu_test_exit_codes() {
    let out = luequiv(&["lu-test", "paper.crlu.rho", "paper.crlu.sigma", "--json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["output"]["kind"], "inequivalent");

    let dir = TempDir::new().unwrap();
    let mut rng = sub_rng(11, 0);
    let k = random_density(&mut rng, 2, 3);
    let h = k.conjugate(&random_local_unitary(&mut rng, 2, 3)).unwrap();
    let (hp, kp) = (write_operator(dir.path(), "h.json", &h), write_operator(dir.path(), "k.json", &k));
    let out = luequiv(&["lu-test", s(&hp), s(&kp)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("equivalent (residual"));
}

#[test]
fn undecided_with_one_restart() {
    // Threefold degenerate spectrum in a generic basis: one start is not enough.
    let mut rng = sub_rng(12, 0);
    let diag = ComplexMatrix::from_real_diagonal(&[0.1, 0.1, 0.1, 0.3, 0.3, 0.3, 0.6, 0.6, 0.6]);
    let k = BipartiteOperator::new(3, 3, diag.conjugate_by(&haar_unitary(&mut rng, 9))).unwrap();
    let h = k.conjugate(&random_local_unitary(&mut rng, 3, 3)).unwrap();
    let dir = TempDir::new().unwrap();
    let (hp, kp) = (write_operator(dir.path(), "h.json", &h), write_operator(dir.path(), "k.json", &k));
    let out = luequiv(&["lu-test", s(&hp), s(&kp), "--restarts", "1"]);
    assert_eq!(code(&out), 2, "{}", stdout(&out));
    assert!(stdout(&out).contains("undecided"));
}

#[test]
fn slu_test_manifests() {
    let out = luequiv(&["slu-test", "paper.cex", "--json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["output"]["certificate"]["type"], "commutant_obstruction");

    let out = luequiv(&["slu-test", "paper.cex.13"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn dimension_mismatch_exits_64() {
    let out = luequiv(&["lu-test", "paper.rho1", "paper.tiles_upb_state"]);
    assert_eq!(code(&out), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn non_orthogonal_manifest_exits_65() {
    let dir = TempDir::new().unwrap();
    let p0 = BipartiteOperator::pure(&luequiv::linalg::basis_vector(4, 0), 2, 2).unwrap();
    let plus = {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![luequiv::Complex64::new(0.0, 0.0); 4];
        v[0] = luequiv::Complex64::new(h, 0.0);
        v[1] = luequiv::Complex64::new(h, 0.0);
        v
    };
    let p1 = BipartiteOperator::pure(&plus, 2, 2).unwrap();
    let manifest = manifest_to_json(&[p0.clone(), p1.clone()], &[p0, p1]);
    let path = dir.path().join("m.json");
    std::fs::write(&path, manifest.to_string()).unwrap();
    let out = luequiv(&["slu-test", s(&path)]);
    assert_eq!(code(&out), 65);
}

#[test]
fn missing_file_and_bad_usage_exit_3() {
    assert_eq!(code(&luequiv(&["classify", "/nonexistent/op.json"])), 3);
    assert_eq!(code(&luequiv(&["no-such-command"])), 3);
    assert_eq!(code(&luequiv(&["--help"])), 0);
}

#[test]
fn repro_passes() {
    let out = luequiv(&["repro"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("all graded claims pass"));

    let v = json(&luequiv(&["repro", "--json"]));
    assert_eq!(v["output"]["all_pass"], true);
    let claims = v["output"]["claims"].as_array().unwrap();
    assert!(claims.iter().any(|c| c["id"] == "cex.triple" && c["status"] == "pass"));
}

#[test]
fn output_is_deterministic_for_a_seed() {
    let args = ["lu-test", "paper.alpha1", "paper.alpha2", "--seed", "7", "--json"];
    let (a, b) = (luequiv(&args), luequiv(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 7);
}

#[test]
fn seed_flag_overrides_environment() {
    let run = |env: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_luequiv"))
            .args(args)
            .env("LUEQUIV_SEED", env)
            .output()
            .unwrap()
    };
    let from_env = json(&run("99", &["classify", "paper.rho1", "--json"]));
    assert_eq!(from_env["seed"], 99);
    let from_flag = json(&run("99", &["classify", "paper.rho1", "--json", "--seed", "5"]));
    assert_eq!(from_flag["seed"], 5);
}

#[test]
fn timings_only_on_request() {
    let v = json(&luequiv(&["classify", "paper.rho1", "--json", "--timings"]));
    assert!(v["timings_ms"]["classify"].is_u64());
}

#[test]
fn witness_modes() {
    let v = json(&luequiv(&["witness", "--mode", "top", "paper.rho1", "--json"]));
    assert!(v["output"]["mu"].as_f64().unwrap() < 0.4);
    assert_eq!(v["output"]["w1"]["status"], "verified_ew");

    let v = json(&luequiv(&["witness", "--mode", "eigenspace", "--index", "0", "paper.rho1", "--json"]));
    assert!(v["output"]["w"]["operator"]["matrix"].is_array());

    let out = luequiv(&["witness", "--mode", "verify", "paper.rho1", "--json"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["output"]["status"].is_string());
}
