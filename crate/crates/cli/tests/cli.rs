use std::process::{Command, Output};

use jmotive::jinvariant::enumerate_admissible;
use jmotive::kac_table::dump_table;
use jmotive::motive::{decompose, rost_poincare};
use jmotive::{
    GradedEndo, GroupForm, IntMatrix, IntegralDecomposition, JInvariant, ModMatrix, MotiveDecomposition,
    ParabolicSubset, Poly, TableEntry,
};
use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jmotive"))
        .args(args)
        .env_remove("JMOTIVE_OUTPUT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Runs with `--json`, checks success, and parses stdout as a single document.
fn json<T: DeserializeOwned>(args: &[&str]) -> T {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&out)))
}

fn form(s: &str) -> GroupForm {
    s.parse().unwrap()
}

#[test]
fn enumerate_e7sc_lists_four_values() {
    let out = run(&["jinv", "enumerate", "--form", "E7sc", "--p", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 4);
    let got: Vec<JInvariant> = json(&["jinv", "enumerate", "--form", "E7sc", "--p", "2"]);
    assert_eq!(got, enumerate_admissible(&form("E7sc"), 2).unwrap());
}

#[test]
fn decompose_f4_round_trips() {
    let got: MotiveDecomposition = json(&["motive", "decompose", "--form", "F4", "--p", "2", "--j", "1"]);
    let f4 = form("F4");
    let expected =
        decompose(&f4, 2, &JInvariant { p: 2, j: vec![1] }, &ParabolicSubset::borel(&f4.base())).unwrap();
    assert_eq!(got, expected);
    assert_eq!(got.summand, Poly::new(vec![1, 0, 0, 1]));
    assert_eq!(got.copies(), 576);
}

#[test]
fn table_dump_e8_mod_5() {
    let v: Value = json(&["table", "dump", "--form", "E8", "--p", "5"]);
    assert_eq!(v["r"], 1);
    assert_eq!(v["d"], serde_json::json!([6]));
    assert_eq!(v["k"], serde_json::json!([1]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["form", "p", "r", "d", "k", "rules"] {
        assert!(keys.contains(&k), "missing {k}");
    }
}

#[test]
fn full_table_round_trips_and_alias_works() {
    let got: Vec<TableEntry> = json(&["table", "dump"]);
    assert_eq!(got, dump_table(8));
    let alias: Vec<TableEntry> = json(&["kac-table", "dump", "--max-rank", "4"]);
    assert_eq!(alias, dump_table(4));
}

#[test]
fn jinv_check_reports_violations() {
    let v: Value = json(&["jinv", "check", "--form", "E7sc", "--p", "2", "--j", "0,1,1"]);
    assert_eq!(v["admissible"], false);
    assert_eq!(v["violated"].as_array().unwrap().len(), 1);
    let j: JInvariant = serde_json::from_value(v["j"].clone()).unwrap();
    assert_eq!(j, JInvariant { p: 2, j: vec![0, 1, 1] });
}

#[test]
fn ring_j_from_generators() {
    let v: Value = json(&["ring", "j-from-gens", "--p", "2", "--d", "1,3", "--k", "2,1", "--gen", "x1^2"]);
    let j: JInvariant = serde_json::from_value(v["j"].clone()).unwrap();
    assert_eq!(j.j, vec![1, 1]);
    let none: Value = json(&["ring", "j-from-gens", "--form", "E7sc", "--p", "2"]);
    assert_eq!(none["j"]["j"], serde_json::json!([1, 1, 1]));
    assert_eq!(none["subring_dimension"], 1);
}

#[test]
fn rost_candim_and_torsion_bound() {
    let rost: Poly = json(&["motive", "rost-poincare", "--form", "E8", "--p", "5", "--j", "1"]);
    assert_eq!(rost, Poly::new(vec![1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1]));
    let data = form("E8").torsion_data(2).unwrap();
    let j = JInvariant::new(&data, vec![3, 2, 1, 1]).unwrap();
    let list = |v: Vec<String>| v.join(",");
    let d = list(data.d.iter().map(u64::to_string).collect());
    let k = list(data.k.iter().map(u32::to_string).collect());
    let explicit: Poly = json(&["motive", "rost-poincare", "--p", "2", "--d", &d, "--k", &k, "--j", "3,2,1,1"]);
    assert_eq!(explicit, rost_poincare(&data, &j));
    let cd: u64 = json(&["motive", "candim", "--form", "E8", "--p", "2", "--j", "3,2,1,1"]);
    assert_eq!(cd as usize, explicit.degree().unwrap());
    let bound: u128 = json(&["motive", "torsion-bound", "--form", "E8", "--p", "2", "--j", "3,2,1,1"]);
    assert_eq!(bound, 128);
    let counts: Value = json(&["motive", "rational-counts", "--form", "F4", "--p", "3", "--j", "1"]);
    assert_eq!(counts["rk_r"], 1152 / 3);
}

#[test]
fn integral_f4() {
    let all: Vec<IntegralDecomposition> = json(&["motive", "integral", "--form", "F4", "--m", "6", "--all"]);
    assert_eq!(all.len(), 2);
    assert_eq!(all[1].summand, Poly::q_integer(12));
    let p1: IntegralDecomposition = json(&["motive", "integral", "--form", "F4", "--m", "6", "--outside", "1"]);
    assert_eq!(p1.summand, Poly::q_integer(12));
    assert_eq!(p1.multiplicities, Poly::new(vec![1, 0, 0, 0, 1]));
    let explicit: IntegralDecomposition = json(&[
        "motive", "integral", "--m", "6", "--total", "1,1,1,1,1,1,1,1,1,1,1,1", "--summand", "2:1,0,0,1",
        "--summand", "3:1,0,0,0,1,0,0,0,1",
    ]);
    assert_eq!(explicit.multiplicities, Poly::one());
}

#[test]
fn flag_poincare_and_split() {
    let f4 = form("F4").base();
    let got: Poly = json(&["flag", "poincare", "--type", "F4", "--theta", "2,3,4"]);
    assert_eq!(got, f4.poincare_homogeneous(&ParabolicSubset::new(&f4, [2, 3, 4]).unwrap()).unwrap());
    let by_form: Poly = json(&["flag", "poincare", "--type", "E7sc"]);
    assert_eq!(by_form.eval_at_one(), 2_903_040);
    let s: String = json(&["flag", "split", "--form", "F4", "--outside", "1", "--tits-index", "1", "--splitting-degree", "6"]);
    assert_eq!(s, "yes");
}

#[test]
fn lifting_commands_satisfy_their_identities() {
    let v: Value = json(&["lift", "idempotent", "--modulus", "8", "--rows", "3,2;1,0"]);
    let e: ModMatrix = serde_json::from_value(v["lifted"].clone()).unwrap();
    assert!(e.is_idempotent());
    assert_eq!(e.reduce(2).unwrap(), ModMatrix::from_rows(2, vec![vec![1, 0], vec![1, 0]]).unwrap());

    let v: Value = json(&["lift", "family", "--seed", "4", "--p", "3", "--n", "2", "--size", "4", "--parts", "3"]);
    let lifted: Vec<ModMatrix> = serde_json::from_value(v["lifted"].clone()).unwrap();
    let sum = lifted.iter().skip(1).fold(lifted[0].clone(), |acc, e| acc.add(e).unwrap());
    assert_eq!(sum, ModMatrix::identity(9, 4).unwrap());

    let v: Value = json(&["lift", "izvrat", "--seed", "9", "--p", "2", "--n", "4", "--size", "2"]);
    let get = |path: &[&str]| -> GradedEndo {
        let mut x = &v;
        for k in path {
            x = &x[*k];
        }
        serde_json::from_value(x.clone()).unwrap()
    };
    let (t12, t21) = (get(&["theta12"]), get(&["theta21"]));
    assert_eq!(t21.compose(&t12).unwrap().matrix(), get(&["instance", "phi1"]).matrix());
    assert_eq!(t12.compose(&t21).unwrap().matrix(), get(&["instance", "phi2"]).matrix());

    let v: Value = json(&["lift", "sl", "--modulus", "6", "--rows", "5,4;1,1"]);
    let lift: IntMatrix = serde_json::from_value(v["lift"].clone()).unwrap();
    assert_eq!(lift.det(), BigInt::from(1));
    assert_eq!(lift.reduce(6).unwrap(), ModMatrix::from_rows(6, vec![vec![5, 4], vec![1, 1]]).unwrap());
}

#[test]
fn seeds_are_reproducible() {
    let args = ["lift", "sl", "--random-modulus", "30", "--size", "3", "--seed", "11", "--json"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
    let other = ["lift", "sl", "--random-modulus", "30", "--size", "3", "--seed", "12", "--json"];
    assert_ne!(stdout(&run(&args)), stdout(&run(&other)));
}

#[test]
fn every_verb_has_help() {
    let verbs: &[&[&str]] = &[
        &[],
        &["table"],
        &["table", "dump"],
        &["jinv"],
        &["jinv", "enumerate"],
        &["jinv", "check"],
        &["ring"],
        &["ring", "j-from-gens"],
        &["motive"],
        &["motive", "decompose"],
        &["motive", "rost-poincare"],
        &["motive", "candim"],
        &["motive", "torsion-bound"],
        &["motive", "rational-counts"],
        &["motive", "integral"],
        &["lift"],
        &["lift", "idempotent"],
        &["lift", "family"],
        &["lift", "izvrat"],
        &["lift", "sl"],
        &["flag"],
        &["flag", "poincare"],
        &["flag", "split"],
    ];
    for v in verbs {
        let mut args = v.to_vec();
        args.push("--help");
        let out = run(&args);
        assert!(out.status.success(), "{args:?}");
        assert!(stdout(&out).contains("Usage:"), "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    // Usage errors.
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["jinv", "enumerate", "--form", "E9", "--p", "2"]), 2);
    assert_eq!(code(&["jinv", "enumerate", "--form", "F4"]), 2);
    assert_eq!(code(&["ring", "j-from-gens", "--form", "F4", "--p", "2", "--gen", "x1^9"]), 2);
    assert_eq!(code(&["lift", "sl"]), 2);
    // Domain errors.
    assert_eq!(code(&["lift", "idempotent", "--modulus", "8", "--rows", "1,1;1,0"]), 1);
    assert_eq!(code(&["lift", "sl", "--modulus", "6", "--rows", "1,0;0,5"]), 1);
    assert_eq!(code(&["jinv", "check", "--form", "F4", "--p", "2", "--j", "2"]), 1);
    assert_eq!(code(&["motive", "rost-poincare", "--form", "F4", "--p", "7", "--j", "1"]), 1);
    let not_split = [
        "motive", "decompose", "--form", "F4", "--p", "2", "--j", "1", "--outside", "4", "--tits-index", "1",
        "--splitting-degree", "2",
    ];
    let out = run(&not_split);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not generically split"));
}

#[test]
fn output_mode_from_environment() {
    let bin = env!("CARGO_BIN_EXE_jmotive");
    let args = ["motive", "candim", "--form", "F4", "--p", "3", "--j", "1"];
    let env_json = Command::new(bin).args(args).env("JMOTIVE_OUTPUT", "json").output().unwrap();
    assert_eq!(stdout(&env_json).trim(), "8");
    let forced_text = Command::new(bin).args(args).arg("--text").env("JMOTIVE_OUTPUT", "json").output().unwrap();
    assert_eq!(stdout(&forced_text).trim(), "8");
    let decomp = ["motive", "decompose", "--form", "F4", "--p", "3", "--j", "1"];
    let env_json = Command::new(bin).args(decomp).env("JMOTIVE_OUTPUT", "json").output().unwrap();
    assert!(serde_json::from_str::<MotiveDecomposition>(&stdout(&env_json)).is_ok());
    let text = Command::new(bin).args(decomp).arg("--text").env("JMOTIVE_OUTPUT", "json").output().unwrap();
    assert!(stdout(&text).starts_with("summand"));
}
