use std::process::Command;

use mackey_cli::{catalog, compute, parse_gset, parse_level, verify, CliError, ComputeRequest, Construction, GroupSpec, VerifyRequest};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mackey"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn request(group: &str, mackey: &str, construction: Construction, phi: bool, level: Option<&str>) -> ComputeRequest {
    ComputeRequest {
        group: GroupSpec::Catalog(group.into()),
        mackey: mackey.into(),
        construction,
        phi,
        level: level.map(String::from),
        verify: None,
    }
}

fn level<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["levels"].as_array().unwrap().iter().find(|l| l["level"] == name).unwrap()
}

#[test]
fn phi_of_sym2_burnside_has_rank_two() {
    let v = compute(&request("C2", "burnside", Construction::Sym(2), true, None)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["construction"], "sym:2");
    assert_eq!(level(&v, "G/G")["free_rank"], 2);
}

#[test]
fn sym2_burnside_at_point() {
    let v = compute(&request("C2", "burnside", Construction::Sym(2), false, Some("G/G"))).unwrap();
    let lv = level(&v, "G/G");
    assert_eq!(lv["free_rank"], 3);
    assert_eq!(lv["invariant_factors"], serde_json::json!([]));
    assert_eq!(v["levels"].as_array().unwrap().len(), 1);
}

#[test]
fn norm_of_representable_two_points() {
    let v = compute(&request("C2", "representable:2*G/G", Construction::Norm("e".into()), false, Some("pt"))).unwrap();
    assert_eq!(level(&v, "G/G")["free_rank"], 5);
}

#[test]
fn power_of_free_orbit_matches_norm() {
    let p = compute(&request("C2", "burnside", Construction::Power("G/e".into()), false, None)).unwrap();
    let n = compute(&request("C2", "burnside", Construction::Norm("e".into()), false, None)).unwrap();
    for l in ["G/e", "G/G"] {
        assert_eq!(level(&p, l)["free_rank"], level(&n, l)["free_rank"]);
    }
}

#[test]
fn torsion_is_reported() {
    let v = compute(&request("C2", "fixedpoint", Construction::Sym(3), false, Some("G/G"))).unwrap();
    let lv = level(&v, "G/G");
    assert_eq!(lv["invariant_factors"], serde_json::json!([2]));
    assert_eq!(lv["free_rank"], 1);
}

#[test]
fn oracle_cross_check_passes() {
    let mut req = request("C3", "representable:G/e", Construction::Sym(2), false, None);
    req.verify = Some("oracle".into());
    let v = compute(&req).unwrap();
    assert_eq!(v["verified"], "oracle");
}

#[test]
fn catalog_lists_groups() {
    let v = catalog();
    assert_eq!(v["schema"], 1);
    let groups = v["groups"].as_array().unwrap();
    assert!(groups.iter().any(|g| g["name"] == "C2"));
    let s3 = groups.iter().find(|g| g["name"] == "S3").unwrap();
    assert_eq!(s3["subgroup_classes"], 4);
    assert_eq!(s3["order"], 6);
}

#[test]
fn exponential_suite_passes() {
    let (v, passed) = verify(&VerifyRequest {
        suite: "exponential-lemmas".into(),
        group: GroupSpec::Catalog("S3".into()),
        mackey: None,
        bound: Some(6),
    })
    .unwrap();
    assert!(passed);
    assert_eq!(v["passed"], true);
}

#[test]
fn errors_are_classified() {
    let unknown = compute(&request("Z9", "burnside", Construction::Value, false, None)).unwrap_err();
    assert!(matches!(unknown, CliError::UnknownGroup(_)));
    let bad = compute(&request("C2", "nonsense", Construction::Value, false, None)).unwrap_err();
    assert!(matches!(bad, CliError::Parse(_)));
    let g = GroupSpec::Catalog("S3".into()).load().unwrap();
    assert!(parse_level(&g, "G/H7").is_err());
    assert!(parse_gset(&g, "G/e+x").is_err());
    assert_eq!(parse_gset(&g, "2*G/e+G/G").unwrap().size(), 13);
    let zero = verify(&VerifyRequest { suite: "exponential-lemmas".into(), group: GroupSpec::Catalog("C2".into()), mackey: None, bound: Some(0) });
    assert!(matches!(zero, Err(CliError::BoundTooSmall(_))));
}

#[test]
fn binary_output_is_deterministic() {
    let args = ["compute", "--group", "C2", "--mackey", "burnside", "--sym", "2"];
    let (code, a, _) = run(&args);
    let (_, b, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["degree"], 2);
}

#[test]
fn binary_exit_codes() {
    let (code, _, err) = run(&["compute", "--group", "Z9"]);
    assert_eq!(code, 2);
    let e: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(e["error"]["kind"], "UnknownGroup");
    let (code, out, _) = run(&["verify", "--suite", "mackey-axioms", "--group", "C2", "--bound", "2"]);
    assert_eq!(code, 0, "{}", out);
    let (code, _, _) = run(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["compute", "--sym", "2", "--norm", "e"]);
    assert_eq!(code, 2);
}

#[test]
fn group_json_round_trip() {
    let g = GroupSpec::Catalog("S3".into()).load().unwrap();
    let dir = std::env::temp_dir().join(format!("mackey-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s3.json");
    std::fs::write(&path, g.to_json().to_string()).unwrap();
    let out = dir.join("out.json");
    let (code, _, _) = run(&["catalog", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let req = ComputeRequest {
        group: GroupSpec::Json(path.to_str().unwrap().into()),
        mackey: "burnside".into(),
        construction: Construction::Value,
        phi: false,
        level: Some("pt".into()),
        verify: None,
    };
    let v = compute(&req).unwrap();
    assert_eq!(v["group"], "custom");
    assert_eq!(level(&v, "G/G")["free_rank"], 4);
    std::fs::remove_dir_all(&dir).unwrap();
}
