mod common;

use std::process::{Command, Output};

use crnf::hypersurface::Hypersurface;
use crnf::linalg::from_real_diag;
use crnf::parse::{parse_input, Input};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const MODEL: &str = "z1*zb1 + zb2*z2^2 + z2*zb2^2";

fn crnf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crnf")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = crnf(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn invariants_of_sphere() {
    let v = json(&["invariants", "z1*zb1 + z2*zb2"]);
    assert_eq!(v["k_nondeg"], 1);
}

#[test]
fn partial_nf_of_model() {
    let v = json(&["partial-nf", MODEL]);
    assert_eq!(v["case"], "semidef_iii");
    let lam = v["lambda"].as_array().unwrap();
    assert_eq!(lam.len(), 1);
    assert!(lam[0].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn normal_form_of_model() {
    let v = json(&["normal-form", "--degree", "6", MODEL]);
    assert_eq!(v["N"]["terms"].as_array().unwrap().len(), 0);
    let id = serde_json::to_value(crnf::map::FormalMap::identity(2, 8).to_json()).unwrap();
    assert_eq!(v["T"], id);
    assert_eq!(v["diagnostics"]["per_degree"].as_array().unwrap().len(), 3);
}

#[test]
fn equiv_and_aut_bound() {
    let v = json(&["equiv", "--degree", "5", MODEL, MODEL]);
    assert_eq!(v["invariants_match"], true);
    assert_eq!(v["normal_forms_match"], true);
    let v = json(&["aut-bound", "--lambda", "1,0.5"]);
    assert_eq!(v["bound"], 60);
    let v = json(&["takagi", "[[[2,0],[0,0]],[[0,0],[1,0]]]"]);
    assert_eq!(v["lambda"], serde_json::json!([2.0, 1.0]));
}

#[test]
fn exit_codes() {
    let out = crnf(&["partial-nf", "z1*"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 4"), "{}", String::from_utf8_lossy(&out.stderr));
    // degree above the truncation
    assert_eq!(crnf(&["normal-form", "--trunc", "5", "--degree", "6", MODEL]).status.code(), Some(2));
    // non-real input
    assert_eq!(crnf(&["partial-nf", "z1*zb1 + i*z2*zb2^2"]).status.code(), Some(2));
    assert!(crnf(&["aut-bound", "--lambda", "0.5"]).status.success());
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["--json", "--seed", "7", "equiv", "--search", "3", "--degree", "5", MODEL, MODEL],
        vec!["--json", "normal-form", "--degree", "6", "z1*zb1 + zb2*z2^2 + z2*zb2^2 + 0.1*z1^2*zb1^2"],
        vec!["partial-nf", MODEL],
    ] {
        let a = crnf(&args);
        let b = crnf(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn parse_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trunc in [4, 6, 8] {
        let extra = common::random_real_terms(3, trunc, 4, trunc as u32, 10, &mut rng);
        let m = Hypersurface::model(2, &from_real_diag(&[1.0, 0.5]), trunc).plus(&extra).unwrap();
        let text = serde_json::to_string(&m.to_json()).unwrap();
        match parse_input(&text, None, trunc).unwrap() {
            Input::Hyper(h) => assert_eq!(h.phi(), m.phi()),
            Input::Generic(_) => panic!("parsed as a generic submanifold"),
        }
    }
}
