//! The binary's exit-status and output contracts.

use std::process::Command;

fn shapeinv(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_shapeinv")).args(args).output().unwrap();
    (
        o.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

#[test]
fn check_statuses() {
    assert_eq!(shapeinv(&["check", "[Lp,Lm]-2*L3"]).0, 0);
    assert_eq!(shapeinv(&["check", "[L3,Rp]", "--format", "json"]).0, 0);
    assert_eq!(shapeinv(&["check", "Lp-Rp"]).0, 1);
    let (c, _, err) = shapeinv(&["check", "Foo(1)"]);
    assert_eq!(c, 2);
    assert!(err.contains("unknown generator Foo") && err.contains("Lp"));
    assert_eq!(shapeinv(&["check", "Lm(2)*Rm(3) - Rm(2)*Lm(3)"]).0, 0);
    assert_eq!(shapeinv(&["check", "Lm(3)*Rm(2) - Rm(3)*Lm(2)"]).0, 1);
}

#[test]
fn eigen2d_emits_chi_and_passes() {
    let (c, out, _) = shapeinv(&["eigen2d", "--twol", "2", "--q", "0", "--m", "0"]);
    assert_eq!(c, 0);
    assert!(out.contains("chi = ") && out.contains("PASS L2q chi"));
    let (c, _, err) = shapeinv(&["eigen2d", "--twol", "2", "--q", "0", "--m", "1"]);
    assert_eq!(c, 2);
    assert!(err.contains("out of range"));
}

#[test]
fn shape2d_json_numbers_round_trip() {
    let (c, out, _) = shapeinv(&["shape2d", "--twol", "3"]);
    assert_eq!(c, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let mut nums = Vec::new();
    collect(&v, &mut nums);
    assert!(nums.len() > 50);
    for x in nums {
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<f64>(&text).unwrap().to_bits(), x.to_bits());
    }
}

fn collect(v: &serde_json::Value, out: &mut Vec<f64>) {
    match v {
        serde_json::Value::Number(n) => out.push(n.as_f64().unwrap()),
        serde_json::Value::Array(a) => a.iter().for_each(|x| collect(x, out)),
        serde_json::Value::Object(m) => m.values().for_each(|x| collect(x, out)),
        _ => {}
    }
}

#[test]
fn osc3d_state_and_invalid_numbers() {
    let (c, out, _) = shapeinv(&["osc3d", "--n", "2", "--m", "0", "--n3", "1", "--omega", "2"]);
    assert_eq!(c, 0, "{out}");
    assert!(out.contains("E = 10"));
    let (c, _, err) = shapeinv(&["osc3d", "--n", "2", "--m", "1"]);
    assert_eq!(c, 2);
    assert!(err.contains("n = m mod 2"));
}

#[test]
fn dump_hq_has_both_forms() {
    let (c, out, _) = shapeinv(&["dump", "Hq", "--format", "json"]);
    assert_eq!(c, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["printed"].is_array() && v["derived"].is_array() && v["note"].is_string());
    let (c, out, _) = shapeinv(&["dump", "R3"]);
    assert_eq!(c, 0);
    assert!(out.contains("d_phi") || out.contains("d_psi"));
}

#[test]
fn suite_summary_line() {
    let (c, out, _) = shapeinv(&["suite", "--seed", "7", "--points", "10", "--twol-max", "2", "--n-max", "1"]);
    assert_eq!(c, 0, "{out}");
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("checks: ") && last.ends_with(" 0 failed"), "{last}");
}
