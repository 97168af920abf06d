use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn syz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syz")).args(args).output().expect("run syz")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("syz-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn scenario(name: &str) -> String {
    format!("{}/../../scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn build_then_monodromy() {
    let d = tmp("mono");
    assert!(syz(&["build", "res-e1", "--out", d.to_str().unwrap()]).status.success());
    let o = syz(&["monodromy", d.join("res-e1.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["pass"], Value::Bool(true));
    for c in v["charts"].as_array().unwrap() {
        assert_eq!(c["boundary_trivial"], Value::Bool(true));
    }
}

#[test]
fn double_then_census() {
    let d = tmp("census");
    let dir = d.to_str().unwrap();
    assert!(syz(&["double", "res-e1", "--out", dir]).status.success());
    let v = json(&syz(&["census", d.join("double.json").to_str().unwrap(), "--structure", "complex"]));
    let c = &v["censuses"][0];
    assert_eq!(c["singularities"], 24);
    assert!(c["matched_mirror_pairs"].as_u64().unwrap() >= 9);
}

#[test]
fn toric_superpotential_display() {
    let v = json(&syz(&["superpotential", "toric-cp2"]));
    assert_eq!(v["display"], "x + y + q^3 x^-1 y^-1");
    let v = json(&syz(&["superpotential", "cp1"]));
    assert_eq!(v["display"], "z + q z^-1");
}

#[test]
fn exchange_round_trips_through_files() {
    let d = tmp("exchange");
    let dir = d.to_str().unwrap();
    assert!(syz(&["exchange", "elliptic", "--out", dir]).status.success());
    let once = json(&syz(&["build", "elliptic"]));
    let twice = json(&syz(&["exchange", d.join("exchange.json").to_str().unwrap()]));
    assert_eq!(once, twice);
}

#[test]
fn gluing_walls_and_criticals() {
    let v = json(&syz(&["verify-gluing", "blowup-wall"]));
    assert_eq!(v["pass"], Value::Bool(true));
    let v = json(&syz(&["walls", "blowup-wall", "--truncation", "3/1"]));
    assert_eq!(v["truncation"], "3/1");
    assert_eq!(v["relations"][0], "u v = 1 + q z^-1");
    let v = json(&syz(&["superpotential", "blowup-wall"]));
    assert_eq!(v["continued"]["display"], "v^-1 + q v^-1 z^-1");
    let v = json(&syz(&["critical", "cp1"]));
    assert_eq!(v["report"]["points"].as_array().unwrap().len(), 2);
}

#[test]
fn numeric_subcommands() {
    let o = syz(&["trace", &scenario("ellipse-leaves.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["leaves"][0]["closed"], Value::Bool(true));
    let v = json(&syz(&["periods", &scenario("sphere-circles.json")]));
    let c = v["base"]["complex_length"].as_f64().unwrap();
    assert!((c - 1.0).abs() < 1e-8);
    assert_eq!(v["double_cover"]["complex_length"].as_f64().unwrap(), 2.0 * c);
    let o = syz(&["localmodel", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["samples"], 100);
    let o = syz(&["localmodel", "--q", "0,1", "--b", "0", "--samples", "3"]);
    assert_eq!(json(&o)["singular_samples"], 1);
    let o = syz(&["trace", &scenario("ellipse-leaves.json"), "--format", "svg"]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("<svg"));
}

#[test]
fn impossible_tolerance_is_a_verification_failure() {
    let o = syz(&["localmodel", "--tolerance", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two_with_json() {
    for args in [&["monodromy", "/nonexistent.json"][..], &["build", "nope"], &["census", "cp2-cubic"], &["walls", "blowup-wall", "--truncation", "x"]] {
        let o = syz(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e: Value = serde_json::from_slice(&o.stderr).unwrap();
        assert!(e["error"]["kind"].is_string() && e["error"]["message"].is_string());
    }
    let d = tmp("bad");
    std::fs::create_dir_all(&d).unwrap();
    let f = d.join("bad.json");
    std::fs::write(&f, "{\"pair\": 3}").unwrap();
    assert_eq!(syz(&["monodromy", f.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn figures() {
    let s = String::from_utf8(syz(&["render", "blowup-wall"]).stdout).unwrap();
    assert_eq!(s.matches("class=\"marker\"").count(), 1);
    assert_eq!(s.matches("stroke-dasharray").count(), 1);
    assert_eq!(s.matches("<text").count(), 2);
    assert!(s.contains("<g id=\"walls\">\n<line"));

    let s = String::from_utf8(syz(&["render", "res-e1"]).stdout).unwrap();
    assert_eq!(s.matches("class=\"marker\"").count(), 12);
    assert_eq!(s.matches("class=\"ray\"").count(), 24);

    let s = String::from_utf8(syz(&["render", "k3-double"]).stdout).unwrap();
    assert_eq!(s.matches("class=\"marker\"").count(), 24);
    assert_eq!(s.matches("<polygon").count(), 2);
    // y = 0 seam: every marker (x, y) has a partner (x, -y), i.e. mirrored pixel rows about the seam row
    let seam_y: f64 = {
        let i = s.find("<g id=\"seam\">\n<line").expect("seam drawn");
        let rest = &s[i..];
        let y1 = rest.split("y1=\"").nth(1).unwrap().split('"').next().unwrap();
        y1.parse().unwrap()
    };
    let mut centers: Vec<(i64, i64)> = s
        .lines()
        .filter(|l| l.contains("class=\"marker\""))
        .map(|l| {
            let nums: Vec<f64> = l.split("d=\"M").nth(1).unwrap().split(['L', 'M', ','].as_ref()).take(2).map(|x| x.parse().unwrap()).collect();
            ((nums[0] * 1000.0).round() as i64, ((nums[1] + 4.0) * 1000.0).round() as i64)
        })
        .collect();
    let mirrored: Vec<(i64, i64)> = centers.iter().map(|(x, y)| (*x, ((2.0 * seam_y * 1000.0).round() as i64) - y)).collect();
    let mut m = mirrored.clone();
    centers.sort();
    m.sort();
    assert_eq!(centers, m);

    let o = syz(&["render", "elliptic"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty scene"));
}
