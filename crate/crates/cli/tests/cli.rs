use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stresslab"));
    c.env_remove("STRESSLAB_THREADS");
    c
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("stresslab-cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn gen(file: &str, args: &[&str]) -> String {
    let p = tmp(file);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", p.to_str().unwrap()]);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p.to_str().unwrap().to_string()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn gate(r: &Value, name: &str) -> bool {
    r["gates"].as_array().unwrap().iter().find(|g| g["name"] == name).unwrap_or_else(|| panic!("no gate {name}"))["verdict"]
        .as_bool()
        .unwrap()
}

#[test]
fn gen_prints_face_numbers() {
    let p = tmp("c47.json");
    let out = run(&["gen", "cyclic", "4", "7", "--out", p.to_str().unwrap()]);
    assert!(out.status.success());
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["f"], serde_json::json!([7, 21, 28, 14]));
    assert_eq!(summary["h"], serde_json::json!([1, 3, 6, 3, 1]));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(file["facets"].as_array().unwrap().len(), 14);

    let out = run(&["gen", "crosspoly", "3"]);
    let file: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(file["facets"].as_array().unwrap().len(), 8);
}

#[test]
fn gen_rejects_bad_parameters() {
    assert_eq!(run(&["gen", "simplex", "0"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "cyclic", "4"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "cyclic", "4", "3"]).status.code(), Some(2));
}

#[test]
fn gen_from_files() {
    let tri = gen("tri.json", &["simplex", "2"]);
    let cone = gen("cone_tri.json", &["cone", &tri]);
    let out = run(&["verify", &cone]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!gate(&report(&out), "homology_sphere"));
    let susp = gen("susp_tri.json", &["suspension", &tri]);
    assert_eq!(run(&["gen", "join", &tri, &tri]).status.code(), Some(2));
    let other = tmp("abc.json");
    std::fs::write(&other, r#"{"name":"abc","facets":[["a","b"],["b","c"],["a","c"]]}"#).unwrap();
    let join = gen("join.json", &["join", &tri, other.to_str().unwrap()]);
    let bary = gen("bary.json", &["barycentric", &tri]);
    for f in [&susp, &join, &bary] {
        let out = run(&["verify", f]);
        assert_eq!(out.status.code(), Some(0), "{f}");
    }
}

#[test]
fn verify_octahedron_and_projective_plane() {
    let oct = gen("oct_v.json", &["crosspoly", "3"]);
    let out = run(&["verify", &oct]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert!(r["gates"].as_array().unwrap().iter().all(|g| g["verdict"] == true));

    let rp2 = tmp("rp2.json");
    let facets = [
        ["1", "2", "3"],
        ["1", "3", "4"],
        ["1", "4", "5"],
        ["1", "5", "6"],
        ["1", "2", "6"],
        ["2", "3", "5"],
        ["3", "4", "6"],
        ["2", "4", "5"],
        ["3", "5", "6"],
        ["2", "4", "6"],
    ];
    std::fs::write(&rp2, serde_json::json!({ "name": "rp2", "facets": facets }).to_string()).unwrap();
    let out = run(&["verify", rp2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(!gate(&r, "homology_sphere"));
    assert!(gate(&r, "pseudomanifold"));
    let out = run(&["verify", rp2.to_str().unwrap(), "--field", "gf2"]);
    let r = report(&out);
    assert!(gate(&r, "homology_manifold"));
    assert!(!gate(&r, "homology_sphere"));
}

#[test]
fn malformed_input_is_an_operational_error() {
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    let nested = tmp("nested.json");
    std::fs::write(&nested, r#"{"name":"x","facets":[["a","b"],["a"]]}"#).unwrap();
    assert_eq!(run(&["verify", nested.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["verify", tmp("missing.json").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn stress_reports_are_reproducible() {
    let oct = gen("oct_s.json", &["crosspoly", "3"]);
    let a = run(&["stress", &oct, "--seed", "9"]);
    let b = run(&["stress", &oct, "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert!(gate(&r, "hilbert_matches_h"));
    assert_eq!(r["data"]["hilbert"], serde_json::json!([1, 3, 3, 1]));
    assert_eq!(r["data"]["psi1_dim"], 3);
    assert_eq!(r["data"]["n_minus_d_minus_1"], 3);
    // coordinates are exact strings
    let coords = r["data"]["realization"]["coords"].as_object().unwrap();
    assert!(coords.values().all(|v| v.as_array().unwrap().iter().all(|x| x.as_str().unwrap().contains('/'))));
    let c = run(&["stress", &oct, "--seed", "10"]);
    assert_ne!(report(&c)["inputs_digest"], r["inputs_digest"]);
}

#[test]
fn degenerate_realization_fails_with_witness() {
    let oct = gen("oct_d.json", &["crosspoly", "3"]);
    let real = tmp("oct_flat.json");
    let coords = serde_json::json!({
        "dim": 2,
        "coords": {
            "1": ["0/1", "0/1", "1/1"],
            "-1": ["1/1", "0/1", "1/1"],
            "2": ["2/1", "0/1", "1/1"],
            "-2": ["0/1", "3/1", "1/1"],
            "3": ["5/1", "-2/1", "1/1"],
            "-3": ["1/1", "4/1", "1/1"],
        }
    });
    std::fs::write(&real, coords.to_string()).unwrap();
    let out = run(&["stress", &oct, "--realization", real.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(!gate(&r, "general_position"));
    let g = r["gates"].as_array().unwrap().iter().find(|g| g["name"] == "general_position").unwrap();
    let w: Vec<&str> = g["witness"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(w.contains(&"1") && w.contains(&"-1") && w.contains(&"2"), "{w:?}");
}

#[test]
fn round_tripped_realization_gives_the_same_report() {
    let oct = gen("oct_rt.json", &["crosspoly", "3"]);
    let r = report(&run(&["stress", &oct, "--seed", "4"]));
    let real = tmp("oct_rt_real.json");
    std::fs::write(&real, r["data"]["realization"].to_string()).unwrap();
    let s = report(&run(&["stress", &oct, "--realization", real.to_str().unwrap()]));
    assert_eq!(s["data"]["hilbert"], r["data"]["hilbert"]);
    assert_eq!(s["data"]["q_genericity"], r["data"]["q_genericity"]);
    assert_eq!(s["data"]["realization_source"], "file");
}

#[test]
fn wlp_reports_degrees_for_c47() {
    let c47 = gen("c47_w.json", &["cyclic", "4", "7"]);
    let r = report(&run(&["wlp", &c47]));
    assert_eq!(r["data"]["middle"], 2);
    assert_eq!(r["data"]["hilbert"], serde_json::json!([1, 3, 6, 3, 1]));
    assert!(gate(&r, "macaulay"));
    assert!(gate(&r, "quotient_matches_g"));
}

#[test]
fn maxwell_octahedron_gates() {
    let oct = gen("oct_m.json", &["crosspoly", "3"]);
    let out = run(&["maxwell", &oct, "--trials", "20"]);
    let r = report(&out);
    assert!(gate(&r, "round_trip"));
    assert!(gate(&r, "product_formula"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn float_fallback_marks_gates_approximate() {
    let oct = gen("oct_f.json", &["crosspoly", "3"]);
    assert_eq!(run(&["maxwell", &oct, "--prime-bound", "2", "--trials", "3"]).status.code(), Some(2));
    let out = run(&["maxwell", &oct, "--prime-bound", "2", "--trials", "3", "--float-fallback"]);
    let r = report(&out);
    let rt = r["gates"].as_array().unwrap().iter().find(|g| g["name"] == "round_trip").unwrap();
    assert_eq!(rt["approximate"], true);
    assert_eq!(rt["verdict"], true);
}

#[test]
fn maxwell_projective_plane_is_not_orientable() {
    let rp2 = tmp("rp2_m.json");
    let facets = [
        ["1", "2", "3"],
        ["1", "3", "4"],
        ["1", "4", "5"],
        ["1", "5", "6"],
        ["1", "2", "6"],
        ["2", "3", "5"],
        ["3", "4", "6"],
        ["2", "4", "5"],
        ["3", "5", "6"],
        ["2", "4", "6"],
    ];
    std::fs::write(&rp2, serde_json::json!({ "name": "rp2", "facets": facets }).to_string()).unwrap();
    let out = run(&["maxwell", rp2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!gate(&report(&out), "pl_orientation"));
}

#[test]
fn pivot_with_autonomous_set() {
    let oct = gen("oct_p.json", &["crosspoly", "3"]);
    let r = report(&run(&["pivot", &oct, "--k", "2", "--autonomous", "1,-1"]));
    assert!(gate(&r, "autonomous"));
    assert!(gate(&r, "pivot_compatible"));
    assert_eq!(r["data"]["nullity"], 1);
    let r = report(&run(&["pivot", &oct, "--k", "1", "--autonomous", "1"]));
    assert!(!gate(&r, "autonomous"));
    assert_eq!(run(&["pivot", &oct, "--autonomous", "nope"]).status.code(), Some(2));
}

#[test]
fn pentagon_skeletal_and_gorenstein() {
    let pent = gen("pent.json", &["cyclic", "2", "5"]);
    let out = run(&["skeletal", &pent]);
    let r = report(&out);
    for g in ["squares_vanish", "stress_homology", "pi_chain_map", "pi_surjective", "pi_top_iso", "crux", "diagram_commutes"] {
        assert!(gate(&r, g), "{g}");
    }
    let r = report(&run(&["gorenstein", &pent]));
    assert!(gate(&r, "socle_one_dimensional"));
}

#[test]
fn thread_cap_keeps_output_identical() {
    let c47 = gen("c47_t.json", &["cyclic", "4", "7"]);
    let one = bin().args(["stress", &c47]).env("STRESSLAB_THREADS", "1").output().unwrap();
    let many = bin().args(["stress", &c47]).env("STRESSLAB_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, many.stdout);
    let bad = bin().args(["stress", &c47]).env("STRESSLAB_THREADS", "lots").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn gconj_on_a_non_sphere_fails_the_sphere_gate() {
    let tri = gen("tri_g.json", &["simplex", "2"]);
    let cone = gen("cone_g.json", &["cone", &tri]);
    let out = run(&["gconj", &cone]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!gate(&report(&out), "homology_sphere"));
}
