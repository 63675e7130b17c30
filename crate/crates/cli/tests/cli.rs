use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ncfun::format::{IsometryFile, MatrixFile, PolyFile, PropertyFile, ScanFile};
use ncfun_core::{ComplexMatrix, C64};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn ncfun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncfun"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json<T: serde::de::DeserializeOwned>(out: &Output) -> T {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad stdout ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn matrix(out: &Output) -> ComplexMatrix {
    stdout_json::<MatrixFile>(out).to_matrix().unwrap()
}

fn gap(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    ncfun_core::verify::relative_gap(a, b)
}

#[test]
fn commutator_at_shift_pair() {
    let out = ncfun(&["eval", "--handle", &path("commutator.json"), "--point", &path("shift_point.json")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let want = ComplexMatrix::from_rows(&[
        [C64::new(-1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ])
    .unwrap();
    assert!(gap(&matrix(&out), &want) < 1e-14);
}

fn derive(method: &str, k: &str, extra: &[&str]) -> Output {
    let mut args = vec!["derive", "--handle"];
    let handle = path("square.json");
    let point = path("point_1x2.json");
    let dirs = path("direction_1x2.json");
    args.extend([handle.as_str(), "--point", point.as_str(), "--directions", dirs.as_str()]);
    args.extend(["--method", method, "--k", k]);
    args.extend(extra);
    ncfun(&args)
}

fn direction() -> ComplexMatrix {
    let dirs: Vec<ncfun::format::PointFile> =
        serde_json::from_str(&std::fs::read_to_string(data("direction_1x2.json")).unwrap()).unwrap();
    dirs[0].to_tuple().unwrap().component(0).clone()
}

#[test]
fn second_derivative_of_square_is_twice_h_squared() {
    let h = direction();
    let want = (&h * &h).scale(C64::new(2.0, 0.0));
    for method in ["block", "fd", "polarized"] {
        let out = derive(method, "2", &[]);
        assert_eq!(code(&out), 0, "{method}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(gap(&matrix(&out), &want) < 1e-8, "{method}");
    }
}

#[test]
fn one_sided_fd_error_shrinks_with_lambda() {
    let block = matrix(&derive("block", "1", &[]));
    let coarse = gap(&block, &matrix(&derive("fd", "1", &["--lambda", "1e-2"])));
    let fine = gap(&block, &matrix(&derive("fd", "1", &["--lambda", "1e-3"])));
    assert!(fine < coarse && fine < 1e-2, "{coarse} {fine}");
}

#[test]
fn first_derivative_cross_check_is_within_tolerance() {
    let out = derive("block", "1", &["--cross-check", "--lambda", "1e-3"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    let gap = report["cross_check"]["block_vs_fd"].as_f64().unwrap();
    assert!(gap <= 1e-5, "{gap}");
}

#[test]
fn cross_check_reports_on_stderr() {
    let out = derive("block", "2", &["--cross-check"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["cross_check"]["within_tolerance"], true);
}

#[test]
fn zeroth_derivative_is_value() {
    let d0 = matrix(&derive("block", "0", &[]));
    let point = path("point_1x2.json");
    let value = matrix(&ncfun(&["eval", "--handle", &path("square.json"), "--point", &point]));
    assert!(gap(&d0, &value) < 1e-15);
}

#[test]
fn block_method_rejects_several_directions() {
    let dirs = tempfile::NamedTempFile::new().unwrap();
    let one = std::fs::read_to_string(data("direction_1x2.json")).unwrap();
    let one: Vec<serde_json::Value> = serde_json::from_str(&one).unwrap();
    let two = vec![one[0].clone(), one[0].clone()];
    std::fs::write(dirs.path(), serde_json::to_string(&two).unwrap()).unwrap();
    let out = ncfun(&[
        "derive",
        "--handle",
        &path("square.json"),
        "--point",
        &path("point_1x2.json"),
        "--directions",
        dirs.path().to_str().unwrap(),
        "--k",
        "2",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn expand_round_trips_a_polynomial() {
    let out = ncfun(&["expand", "--handle", &path("commutator.json"), "--maxdeg", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let got = stdout_json::<PolyFile>(&out).to_poly().unwrap();
    let want: ncfun::format::HandleFile =
        serde_json::from_str(&std::fs::read_to_string(data("commutator.json")).unwrap()).unwrap();
    let want: PolyFile = serde_json::from_value(want.payload).unwrap();
    let diff = got.max_coeff_distance(&want.to_poly().unwrap());
    assert!(diff < 1e-9, "{got}");
    let diagnostics: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diagnostics["max_degree"], 3);
}

#[test]
fn expand_writes_diagnostics_next_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("series.json");
    let out = ncfun(&[
        "expand",
        "--handle",
        &path("geometric.json"),
        "--maxdeg",
        "4",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("series.json"));
    let poly: PolyFile = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(poly.terms.len(), 5);
    for t in &poly.terms {
        assert!((t.re - 1.0).abs() < 1e-9 && t.im.abs() < 1e-9);
    }
    assert!(dir.path().join("series.json.diagnostics.json").exists());
}

#[test]
fn constant_handle_expands_to_constant() {
    let handle = tempfile::NamedTempFile::new().unwrap();
    let text = r#"{"kind":"poly","payload":{"d":2,"terms":[{"word":[],"re":2.5,"im":-1.0}]}}"#;
    std::fs::write(handle.path(), text).unwrap();
    let out = ncfun(&["expand", "--handle", handle.path().to_str().unwrap(), "--maxdeg", "2"]);
    assert_eq!(code(&out), 0);
    let poly: PolyFile = stdout_json(&out);
    assert_eq!(poly.terms.len(), 1);
    assert!(poly.terms[0].word.is_empty());
    assert!((poly.terms[0].re - 2.5).abs() < 1e-12 && (poly.terms[0].im + 1.0).abs() < 1e-12);
}

#[test]
fn word_cap_is_a_usage_error() {
    let config = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(config.path(), r#"{"word_cap": 5}"#).unwrap();
    let out = ncfun(&[
        "expand",
        "--handle",
        &path("commutator.json"),
        "--maxdeg",
        "3",
        "--config",
        config.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn mobius_colligation_is_isometric() {
    for file in ["mobius.json", "mobius_handle.json"] {
        let out = ncfun(&["realize-check", "--handle", &path(file)]);
        assert_eq!(code(&out), 0);
        let report: IsometryFile = stdout_json(&out);
        assert!(report.isometric && report.isometry_residual < 1e-12);
    }
}

#[test]
fn scan_is_deterministic_and_contractive() {
    let run = |seed: &str| {
        let out = ncfun(&["realize-scan", "--handle", &path("mobius.json"), "--n", "3", "--seed", seed]);
        assert_eq!(code(&out), 0);
        stdout_json::<ScanFile>(&out)
    };
    let a = run("11");
    let b = run("11");
    assert_eq!(a.max_norm.to_bits(), b.max_norm.to_bits());
    assert_eq!(a.draws, b.draws);
    assert!(a.passed && a.max_norm <= 1.0);
}

#[test]
fn realize_eval_matches_closed_form_and_rejects_outside_points() {
    let inside = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(
        inside.path(),
        r#"{"d":1,"n":1,"components":[{"rows":1,"cols":1,"entries":[[{"re":0.25}]]}]}"#,
    )
    .unwrap();
    let out = ncfun(&["realize-eval", "--handle", &path("mobius.json"), "--point", inside.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let want = (0.25 - 0.5) / (1.0 - 0.5 * 0.25);
    let got = matrix(&out)[(0, 0)];
    assert!((got - C64::new(want, 0.0)).norm() < 1e-13);

    let out = ncfun(&["realize-eval", "--handle", &path("mobius.json"), "--point", &path("outside_point.json")]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_passes_for_a_polynomial() {
    let out = ncfun(&["verify", "--handle", &path("commutator.json"), "--config", &path("verify_config.json")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let reports: Vec<PropertyFile> = stdout_json(&out);
    assert_eq!(reports.len(), 11);
    assert!(reports.iter().all(|r| r.passed && r.seed == 7));
}

#[test]
fn verify_names_failing_properties_of_a_control() {
    let out = ncfun(&["verify", "--handle", &path("conjugate_control.json")]);
    assert_eq!(code(&out), 1);
    let reports: Vec<PropertyFile> = stdout_json(&out);
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    assert!(failed.contains(&"intertwining_similarity"), "{failed:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("intertwining_similarity"));
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    let out = ncfun(&["verify", "--handle", "/nonexistent/handle.json"]);
    assert_eq!(code(&out), 2);

    let bad = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad.path(), "{\"kind\": \"poly\", \"payload\": ").unwrap();
    let out = ncfun(&["eval", "--handle", bad.path().to_str().unwrap(), "--point", &path("shift_point.json")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let out = ncfun(&["eval", "--handle", &path("commutator.json")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let config = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(config.path(), r#"{"seeds": 3}"#).unwrap();
    let out = ncfun(&["verify", "--handle", &path("commutator.json"), "--config", config.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn out_flag_writes_file_and_prints_path() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("value.json");
    let out = ncfun(&[
        "eval",
        "--handle",
        &path("commutator.json"),
        "--point",
        &path("shift_point.json"),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), target.to_str().unwrap());
    let m: MatrixFile = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!((m.rows, m.cols), (2, 2));
}

#[test]
fn dimension_cap_is_enforced() {
    let out = ncfun(&["realize-scan", "--handle", &path("mobius.json"), "--n", "100"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn extraction_failure_exits_5_and_names_the_word() {
    let handle = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(handle.path(), r#"{"kind":"control","payload":{"control":"non_graded","d":1}}"#).unwrap();
    let out = ncfun(&["expand", "--handle", handle.path().to_str().unwrap(), "--maxdeg", "2"]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("word [0]"));
}

#[test]
fn non_isometric_colligation_fails_check() {
    let mut r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data("mobius.json")).unwrap()).unwrap();
    r["D"]["entries"][0][0]["re"] = serde_json::json!(0.9);
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), r.to_string()).unwrap();
    let out = ncfun(&["realize-check", "--handle", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report: IsometryFile = stdout_json(&out);
    assert!(!report.isometric);
}
