//! Process-level tests of the `wlim` binary: determinism of reports, the
//! exit-status contract, and dump shapes.

use std::process::Command;

fn wlim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wlim"))
}

const SMALL: &[&str] = &[
    "--n-max",
    "8",
    "--trunc-N",
    "3",
    "--k-max",
    "3",
    "--quad-levels",
    "3",
    "--cn-samples",
    "80",
    "--cn-near-samples",
    "20",
    "--boundary-angles",
    "6",
    "--psi-samples",
    "2000",
    "--normalizer-samples",
    "600",
    "--trials",
    "10",
];

fn tmp_dir(tag: &str) -> String {
    let dir = std::env::temp_dir().join(format!("wlim-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir.to_string_lossy().into_owned()
}

#[test]
fn same_config_and_seed_yield_byte_identical_reports() {
    let d1 = tmp_dir("det1");
    let d2 = tmp_dir("det2");
    for out in [&d1, &d2] {
        let status = wlim()
            .arg("verify")
            .args(SMALL)
            .args(["--seed", "42", "--out", out])
            .status()
            .expect("spawn wlim verify");
        assert!(status.success());
    }
    let r1 = std::fs::read(format!("{d1}/report.json")).unwrap();
    let r2 = std::fs::read(format!("{d2}/report.json")).unwrap();
    assert_eq!(r1, r2, "reports differ between identical runs");

    let v: serde_json::Value = serde_json::from_slice(&r1).unwrap();
    assert!(v["checks"].as_array().unwrap().len() >= 20);
    assert_eq!(v["failed"], 0);
}

#[test]
fn exit_status_reflects_failures() {
    let out = tmp_dir("fail");
    let status = wlim()
        .arg("verify")
        .args(SMALL)
        .args(["--seed", "5", "--tol", "diagonal_identity=0", "--out", &out])
        .status()
        .expect("spawn wlim verify");
    assert!(!status.success(), "zero tolerance must fail the battery");

    let report = std::fs::read_to_string(format!("{out}/report.json")).unwrap();
    assert!(report.contains("tolerance unreachable"));
}

#[test]
fn dumps_write_expected_files() {
    let out = tmp_dir("dump");
    let status = wlim()
        .args(["dump", "weight", "--k", "2", "--points", "100", "--out", &out])
        .status()
        .expect("spawn wlim dump weight");
    assert!(status.success());
    let csv = std::fs::read_to_string(format!("{out}/weight_k2.csv")).unwrap();
    assert!(csv.starts_with("theta_rad,value"));
    assert_eq!(csv.lines().count(), 101);

    let status = wlim()
        .args(["dump", "exponent", "--n", "1", "--grid", "8", "--out", &out])
        .status()
        .expect("spawn wlim dump exponent");
    assert!(status.success());
    let csv = std::fs::read_to_string(format!("{out}/exponent_n1.csv")).unwrap();
    assert!(csv.starts_with("r,theta_rad,re_h,im_h,tail_bound"));
    assert_eq!(csv.lines().count(), 65);

    let status = wlim()
        .args(["dump", "matrix", "--trunc-N", "3", "--quad-levels", "3", "--out", &out])
        .status()
        .expect("spawn wlim dump matrix");
    assert!(status.success());
    let csv = std::fs::read_to_string(format!("{out}/matrix_n3.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn show_config_prints_hash() {
    let output = wlim()
        .args(["show-config", "--seed", "7"])
        .output()
        .expect("spawn wlim show-config");
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("\"seed\": 7"));
    assert!(text.contains("hash: "));
}
