mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::data;

fn lfts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfts")).args(args).env_remove("LFTS_COLOR").output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("lfts-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn check_accepts_reference_network() {
    let o = lfts(&["check", path(&data("network.json"))]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn check_rejects_single_block_route() {
    let f = tmp("short.json");
    std::fs::write(&f, r#"{"blocks": ["A", "B"], "routes": {"R": ["A"]}, "trains": ["t"]}"#).unwrap();
    let o = lfts(&["check", path(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains('R'), "{}", stdout(&o));
}

#[test]
fn check_reports_parse_position() {
    let f = tmp("truncated.json");
    let text = common::read("network.json");
    std::fs::write(&f, &text[..text.len() / 2]).unwrap();
    let o = lfts(&["check", path(&f)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    let pos = regex::Regex::new(r"truncated\.json:\d+:\d+: ").unwrap();
    assert!(pos.is_match(&err), "{err}");
}

#[test]
fn check_missing_file() {
    assert_eq!(lfts(&["check", "/nonexistent/net.json"]).status.code(), Some(2));
}

#[test]
fn explore_holds_on_disjoint() {
    let o = lfts(&["explore", path(&data("disjoint.json")), "--depth", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Holds"));
}

#[test]
fn explore_violation_writes_replayable_witness() {
    let w = tmp("witness.trace");
    let scen = data("shared.json");
    let inject = data("fake_status.json");
    let o = lfts(&[
        "explore",
        path(&scen),
        "--inject",
        path(&inject),
        "--layered",
        "off",
        "--json",
        "--out",
        path(&w),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "Violated");
    assert!(!v["witness"].as_array().unwrap().is_empty());
    let r = lfts(&["replay", path(&scen), path(&w), "--inject", path(&inject), "--layered", "off"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn explore_cap_exceeded() {
    let o = lfts(&["explore", path(&data("shared.json")), "--inject", path(&data("lost_free.json")), "--cap", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn explore_rejects_zero_cap() {
    assert_eq!(lfts(&["explore", path(&data("shared.json")), "--cap", "0"]).status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_replays() {
    let scen = data("single.json");
    let a = lfts(&["simulate", path(&scen), "--seed", "42", "--steps", "20"]);
    let b = lfts(&["simulate", path(&scen), "--seed", "42", "--steps", "20"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let f = tmp("sim.trace");
    std::fs::write(&f, &a.stdout).unwrap();
    assert_eq!(lfts(&["replay", path(&scen), path(&f)]).status.code(), Some(0));
}

#[test]
fn simulate_zero_steps_is_empty() {
    let o = lfts(&["simulate", path(&data("single.json")), "--seed", "1", "--steps", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with('#')), "{text}");
}

#[test]
fn replay_detects_tampering() {
    let scen = data("single.json");
    let a = lfts(&["simulate", path(&scen), "--seed", "3", "--steps", "10"]);
    let text = stdout(&a);
    assert!(text.contains("\tapplied\t"));
    let tampered = text.replacen("\tapplied\t", "\tblocked\t", 1);
    let f = tmp("tampered.trace");
    std::fs::write(&f, tampered).unwrap();
    let o = lfts(&["replay", path(&scen), path(&f)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn demo_gcd() {
    let o = lfts(&["demo", "gcd", "12", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains('4'));
    assert!(text.contains("Holds"));
    assert_eq!(lfts(&["demo", "gcd", "0", "8"]).status.code(), Some(2));
}

#[test]
fn demo_min() {
    let o = lfts(&["demo", "min", "3", "1", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with('1'));
    let e = lfts(&["demo", "min"]);
    assert_eq!(e.status.code(), Some(1));
    let all = format!("{}{}", stdout(&e), String::from_utf8_lossy(&e.stderr));
    assert!(all.contains("precondition violated: P(S): S ≠ ∅"), "{all}");
}

#[test]
fn unknown_subcommand() {
    assert_eq!(lfts(&["frobnicate"]).status.code(), Some(2));
}
