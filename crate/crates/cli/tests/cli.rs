//! End-to-end checks of the command-line surface: exact output grammar,
//! exit codes and the file formats.

use std::process::Command;

fn strandhf(args: &[&str]) -> (String, String, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_strandhf"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code(),
    )
}

#[test]
fn poincare_prints_the_exact_ascii_grammar() {
    let (stdout, _, code) = strandhf(&["poincare", "--pmc", "antipodal2"]);
    assert_eq!(code, Some(0));
    assert_eq!(stdout.trim(), "T^-2 + 32*T^-1 + 70 + 32*T + T^2");
    let (stdout, _, _) = strandhf(&["poincare", "--pmc", "torus", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["poincare"], "T^-1 + 8 + T");
}

#[test]
fn ext_prints_the_rank() {
    let (stdout, _, code) = strandhf(&["ext", "--from", "cfd.zero", "--to", "cfd.inf"]);
    assert_eq!(code, Some(0));
    assert!(stdout.starts_with("Ext rank: 1"), "got: {stdout}");
}

#[test]
fn algebra_reports_dimensions() {
    let (stdout, _, code) =
        strandhf(&["algebra", "--pmc", "torus", "--i", "0", "--format", "json"]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["dim"], 8);
    assert_eq!(v["homology_dim"], 8);
}

#[test]
fn check_rejects_a_broken_delta_with_exit_one() {
    let dir = std::env::temp_dir().join("strandhf-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(
        &path,
        r#"{
            "name": "broken",
            "algebra": "torus",
            "generators": [{"name": "s", "idem": ["iota0"]}, {"name": "t", "idem": ["iota1"]}],
            "delta": [["s", "rho1", "t"], ["t", "rho2", "s"]]
        }"#,
    )
    .unwrap();
    let (stdout, _, code) = strandhf(&["check", "--in", path.to_str().unwrap()]);
    assert_eq!(code, Some(1));
    assert!(stdout.contains("rho12"), "violation names the residue: {stdout}");
}

#[test]
fn check_accepts_the_documented_type_d_file() {
    let dir = std::env::temp_dir().join("strandhf-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cfd-inf.json");
    std::fs::write(
        &path,
        r#"{
            "name": "cfd.inf",
            "algebra": "torus",
            "generators": [{"name": "s", "idem": ["iota1"]}],
            "delta": [["s", "rho23", "s"]]
        }"#,
    )
    .unwrap();
    let (stdout, _, code) = strandhf(&["check", "--in", path.to_str().unwrap()]);
    assert_eq!(code, Some(0), "stdout: {stdout}");
}

#[test]
fn koszul_check_passes_for_the_identity_bimodule() {
    let (stdout, _, code) = strandhf(&["koszul-check", "--in", "dd.id(torus)"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("pass"));
}

#[test]
fn serre_and_hh_run_on_the_torus() {
    let (stdout, _, code) = strandhf(&["serre", "--from", "cfd.zero", "--to", "cfd.inf"]);
    assert_eq!(code, Some(0), "serre: {stdout}");
    let (stdout, _, code) = strandhf(&["hh", "--pmc", "torus", "--format", "json"]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["rank"], 4);
    assert_eq!(v["mor_generators"], 18);
}

#[test]
fn reduce_emits_the_module_format() {
    let dir = std::env::temp_dir().join("strandhf-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    // reduce the boxed identity: bar(torus,0) against cfd.inf is not
    // directly boxable, so use box + reduce on named objects instead
    let (stdout, _, code) = strandhf(&["box", "--left", "dd.halfid.torus", "--right", "cfd.inf"]);
    assert_eq!(code, Some(1), "no valid pairing between two D-flavored objects: {stdout}");
    let (stdout, _, code) = strandhf(&["reduce", "--in", "cfd.inf"]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 1);
}

#[test]
fn box_pairs_a_da_file_against_a_named_module() {
    let dir = std::env::temp_dir().join("strandhf-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let id = strandhf::module::identity_da(strandhf::zoo::torus_algebra());
    let path = dir.join("identity-da.json");
    std::fs::write(&path, strandhf::serialize::object_to_json(&id).unwrap()).unwrap();
    let (stdout, stderr, code) =
        strandhf(&["box", "--left", path.to_str().unwrap(), "--right", "cfd.inf"]);
    assert_eq!(code, Some(0), "stderr: {stderr}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 1);
    assert_eq!(v["generators"][0]["name"], "id1*s");
}

#[test]
fn byte_identical_output_across_thread_counts() {
    let a = strandhf(&["poincare", "--pmc", "split2", "--threads", "1"]);
    let b = strandhf(&["poincare", "--pmc", "split2", "--threads", "4"]);
    assert_eq!(a.0, b.0);
    assert_eq!(a.2, Some(0));
}
