use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn amalgam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("amalgam-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn coordinate_support_of_an_assembled_element() {
    let cert = scratch("cert.json");
    let out = amalgam(&[
        "eval",
        "assemble",
        "--ambient",
        "3",
        "--pieces",
        "e1;e2;e3",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(json(&out)["pieces"], 3);
    let out = amalgam(&[
        "eval",
        "mu",
        "--cert",
        cert.to_str().unwrap(),
        "--element",
        "e1+e3",
    ]);
    assert_eq!(json(&out)["S"], serde_json::json!([0, 2]));
}

#[test]
fn independence_queries() {
    let out = amalgam(&[
        "eval",
        "indep",
        "--ambient",
        "2",
        "--a",
        "e1",
        "--m",
        "0",
        "--b",
        "e2",
    ]);
    assert_eq!(json(&out)["independent"], true);
    let out = amalgam(&[
        "eval",
        "indep",
        "--ambient",
        "2",
        "--a",
        "e1",
        "--m",
        "0",
        "--b",
        "e1",
    ]);
    assert_eq!(json(&out)["independent"], false);
}

#[test]
fn word_problems() {
    let pres = scratch("pres.toml");
    std::fs::write(&pres, "relators = [\"abABABBAAAABaBBBABa\"]\n").unwrap();
    let pres = pres.to_str().unwrap();
    assert_eq!(
        json(&amalgam(&[
            "eval",
            "dehn",
            "--pres",
            pres,
            "--word",
            "abABABBAAAABaBBBABa"
        ]))["trivial"],
        true
    );
    assert_eq!(
        json(&amalgam(&["eval", "dehn", "--pres", pres, "--word", "ab"]))["trivial"],
        false
    );
    let out = json(&amalgam(&[
        "eval", "fold", "--gens", "ab,aab", "--word", "a",
    ]));
    assert_eq!(out["member"], true);
    assert_eq!(
        json(&amalgam(&["eval", "fold", "--gens", "aa", "--word", "a"]))["member"],
        false
    );
}

#[test]
fn invalid_configs_exit_two() {
    let cfg = scratch("bad.toml");
    std::fs::write(
        &cfg,
        "instance = \"vec-gf2\"\nseed = 1\nsuites = [\"independence\"]\n",
    )
    .unwrap();
    let out = amalgam(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bounds.dim"));
}

#[test]
fn listing_names_every_instance() {
    let out = json(&amalgam(&["list"]));
    let names: Vec<&str> = out["instances"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|i| i["instance"].as_str())
        .collect();
    assert_eq!(
        names,
        [
            "vec-gf2",
            "vec-gf3",
            "free-factor",
            "squarefree",
            "smallcanc"
        ]
    );
}
