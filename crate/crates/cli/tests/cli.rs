use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use toric_moduli::io::{self, CensusFile, PiecewiseFile, VerdictFile, WeightedFlagFile};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-moduli"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Re-serialising the parsed output gives the same bytes.
fn assert_round_trip<T: serde::Serialize + serde::de::DeserializeOwned>(o: &Output) {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let parsed: T = io::parse_json("stdout", &text).unwrap();
    assert_eq!(io::to_json_string(&parsed), text);
}

#[test]
fn p2_lines_are_accepted_with_three_witnesses() {
    let o = run(&[
        "moduli",
        "check",
        "--fan",
        &data("p2.json"),
        "--psi",
        &data("p2_tangent_psi.json"),
        "--cand",
        &data("p2_lines.json"),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["status"], "ACCEPTED");
    let cones = v["cones"].as_array().unwrap();
    assert_eq!(cones.len(), 3);
    assert!(cones
        .iter()
        .all(|c| c["basis"].is_array() && c["gammas"].is_array()));
    assert_round_trip::<VerdictFile>(&o);
}

#[test]
fn no_witnesses_drops_bases() {
    let o = run(&[
        "moduli",
        "check",
        "--no-witnesses",
        "--fan",
        &data("p2.json"),
        "--psi",
        &data("p2_tangent_psi.json"),
        "--cand",
        &data("p2_lines.json"),
    ]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["cones"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c.get("basis").is_none()));
}

#[test]
fn type_mismatch_is_an_input_error() {
    let o = run(&[
        "moduli",
        "check",
        "--fan",
        &data("p2.json"),
        "--psi",
        &data("p2_tangent_psi.json"),
        "--cand",
        &data("p2_borel_violation.json"),
    ]);
    assert_eq!(code(&o), 3);
    let e = stderr(&o);
    assert!(
        e.contains("TypeMismatch") && e.contains("$.flags[1]"),
        "{e}"
    );
}

#[test]
fn p1_line_is_accepted() {
    let o = run(&[
        "moduli",
        "check",
        "--fan",
        &data("p1.json"),
        "--psi",
        &data("p1_psi.json"),
        "--cand",
        &data("p1_line.json"),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn non_fan_is_invalid() {
    let o = run(&["fan", "validate", &data("half.json")]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["valid"], false);
    assert!(v["error"].as_str().unwrap().contains("NotAFan"), "{v}");
    let o = run(&["fan", "validate", &data("p2.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["complete"], true);
}

#[test]
fn non_primitive_ray_names_the_ray() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(
        &f,
        r#"{"lattice_rank": 2, "rays": [[1,0],[0,2]], "maximal_cones": [[0,1]]}"#,
    )
    .unwrap();
    let o = run(&["fan", "validate", f.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let e = stderr(&o);
    assert!(
        e.contains("bad.json") && e.contains("$.rays[1]") && e.contains("NonPrimitiveRay"),
        "{e}"
    );
}

#[test]
fn malformed_json_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("phi.json");
    std::fs::write(&f, r#"{"rank": 2, "charts": [{"cone": [0], "frame": [[1, 0.5], [0, 1]], "weights_matrix": [[2],[1]]}]}"#).unwrap();
    let o = run(&[
        "plmap",
        "validate",
        "--fan",
        &data("p1.json"),
        f.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    assert!(
        stderr(&o).contains("$.charts[0].frame[0][1]"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn completeness() {
    assert_eq!(code(&run(&["fan", "complete", &data("cube.json")])), 0);
    assert_eq!(code(&run(&["fan", "complete", &data("wedge.json")])), 1);
}

#[test]
fn nonsplit_psi_reports_the_ray() {
    let o = run(&[
        "psi",
        "rays",
        "--fan",
        &data("ray.json"),
        &data("psi_nonsplit.json"),
    ]);
    assert_eq!(code(&o), 3);
    let e = stderr(&o);
    assert!(e.contains("NonIntegralOrbit") && e.contains("ray 0"), "{e}");
}

#[test]
fn psi_rays_of_p1() {
    let o = run(&[
        "psi",
        "rays",
        "--fan",
        &data("p1.json"),
        &data("p1_psi.json"),
    ]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["rays"][0]["weights"], serde_json::json!([2, 1]));
    assert_eq!(v["rays"][1]["parabolic"], serde_json::json!([2]));
}

#[test]
fn plmap_validate_reports_integrality() {
    let o = run(&[
        "plmap",
        "validate",
        "--fan",
        &data("wedge.json"),
        &data("nonintegral_phi.json"),
    ]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert!(
        v["violations"][0]
            .as_str()
            .unwrap()
            .starts_with("IntegralityViolation"),
        "{v}"
    );
    let o = run(&[
        "plmap",
        "validate",
        "--fan",
        &data("p2.json"),
        &data("p2_tangent_phi.json"),
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn chern_of_p1() {
    let o = run(&[
        "chern",
        "--fan",
        &data("p1.json"),
        "--phi",
        &data("p1_phi.json"),
        "--generator",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["pieces"][0]["poly"], serde_json::json!([[2, [2]]]));
    assert_eq!(v["pieces"][1]["poly"], serde_json::json!([]));
    assert_round_trip::<PiecewiseFile>(&o);
    let o = run(&[
        "chern",
        "--fan",
        &data("p1.json"),
        "--phi",
        &data("p1_phi.json"),
        "--generator",
        "3",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn census_counts() {
    let p1 = run(&[
        "moduli",
        "census",
        "--fan",
        &data("p1.json"),
        "--psi",
        &data("p1_psi.json"),
    ]);
    assert_eq!(code(&p1), 0);
    assert_eq!(stdout_json(&p1)["count"], 2);
    assert_round_trip::<CensusFile>(&p1);
    let limited = run(&[
        "moduli",
        "census",
        "--census-limit",
        "1",
        "--fan",
        &data("p1.json"),
        "--psi",
        &data("p1_psi.json"),
    ]);
    assert_eq!(stdout_json(&limited)["count"], 1);
    let loose = run(&[
        "moduli",
        "census",
        "--ray-values-only",
        "--fan",
        &data("p2.json"),
        "--psi",
        &data("p2_tangent_psi.json"),
    ]);
    assert_eq!(stdout_json(&loose)["count"], 8);
}

#[test]
fn output_is_independent_of_thread_count() {
    let cases: Vec<Vec<String>> = vec![
        vec![
            "moduli",
            "census",
            "--ray-values-only",
            "--fan",
            &data("p2.json"),
            "--psi",
            &data("p2_tangent_psi.json"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "moduli",
            "check",
            "--fan",
            &data("p2.json"),
            "--psi",
            &data("p2_tangent_psi.json"),
            "--cand",
            &data("p2_lines.json"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "plmap",
            "validate",
            "--fan",
            &data("p2.json"),
            &data("p2_tangent_phi.json"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "psi",
            "from-map",
            "--fan",
            &data("p2.json"),
            &data("p2_tangent_phi.json"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
    ];
    for args in cases {
        let mut outs = ["1", "4"].iter().map(|k| {
            let mut a: Vec<&str> = vec!["--parallel", k];
            a.extend(args.iter().map(String::as_str));
            run(&a)
        });
        let (a, b) = (outs.next().unwrap(), outs.next().unwrap());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(code(&a), code(&b));
    }
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("psi.json");
    let o = run(&[
        "psi",
        "from-map",
        "--fan",
        &data("p2.json"),
        &data("p2_tangent_phi.json"),
        "-o",
        f.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&f).unwrap();
    assert_eq!(
        written,
        std::fs::read_to_string(data("p2_tangent_psi.json")).unwrap()
    );
    assert!(written.ends_with('\n'));
}

#[test]
fn klyachko_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.json");
    std::fs::write(
        &k,
        r#"{"rank": 2, "start": 1, "levels": [[[1, 0]], [[1, 0]]]}"#,
    )
    .unwrap();
    let o = run(&["klyachko", "import", k.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_round_trip::<WeightedFlagFile>(&o);
    let v = stdout_json(&o);
    assert_eq!(v["weights"], serde_json::json!([2, 0]));
    let wf = dir.path().join("wf.json");
    std::fs::write(&wf, &o.stdout).unwrap();
    let back = run(&["klyachko", "export", wf.to_str().unwrap()]);
    assert_eq!(code(&back), 0);
    assert_eq!(
        stdout_json(&back),
        serde_json::json!({"rank": 2, "start": 1, "levels": [[[1, 0]], [[1, 0]]]})
    );
}

#[test]
fn onepar_commands() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    std::fs::write(&a, r#"{"frame": [[1, 0], [0, 1]], "weights": [1, 0]}"#).unwrap();
    std::fs::write(&b, r#"{"frame": [[1, 1], [0, 1]], "weights": [1, 0]}"#).unwrap();
    std::fs::write(&c, r#"{"frame": [[0, 1], [1, 0]], "weights": [1, 0]}"#).unwrap();
    let (a, b, c) = (
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        c.to_str().unwrap(),
    );
    assert_eq!(code(&run(&["onepar", "equiv", a, b])), 0);
    assert_eq!(code(&run(&["onepar", "equiv", a, c])), 1);
    let o = run(&["onepar", "flag", b]);
    assert_eq!(stdout_json(&o)["steps"][0], serde_json::json!([[1, 0]]));
}

#[test]
fn schemas_and_usage_errors() {
    let all = stdout_json(&run(&["--schema"]));
    for name in io::SCHEMA_NAMES {
        assert!(all[name].is_object(), "{name}");
    }
    let fan = run(&["--schema", "fan"]);
    assert_eq!(code(&fan), 0);
    assert_eq!(stdout_json(&fan)["title"], "fan");
    assert_eq!(code(&run(&["--schema", "nope"])), 3);
    assert_eq!(code(&run(&["moduli", "check"])), 3);
    assert_eq!(
        code(&run(&[
            "--parallel",
            "0",
            "fan",
            "validate",
            &data("p2.json")
        ])),
        3
    );
    assert_eq!(code(&run(&[])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["fan", "validate", "/nonexistent.json"])), 3);
}
