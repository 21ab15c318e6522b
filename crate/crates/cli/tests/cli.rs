use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ftl_core::instance::worked_example;
use ftl_core::io::write_instance;

fn ftl(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftl")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn example(dir: &Path) {
    fs::write(dir.join("we.inst"), write_instance(&worked_example())).unwrap();
}

#[test]
fn generate_solve_check() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = ftl(&["generate", "--seed", "3", "--out", "g.inst"], d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    fs::write(d.join("small.toml"), "node_count = 5\nshift_count = 2\ncommodity_count = [6, 10]\nunits = [15, 30]\n").unwrap();
    let o = ftl(&["generate", "--config", "small.toml", "--seed", "2", "--out", "s.inst"], d);
    assert_eq!(code(&o), 0);
    let o = ftl(&["solve", "s.inst", "--out", "s.txt", "--stats", "s.json", "--max-iterations", "5"], d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    assert!(stats["iterations"].as_array().is_some_and(|a| !a.is_empty()));
    let o = ftl(&["check", "s.inst", "--schedule", "s.txt"], d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "ok");
}

#[test]
fn enumerate_then_solve_from_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    example(d);
    let o = ftl(&["enumerate", "we.inst", "--out", "we.routes"], d);
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(d.join("we.routes")).unwrap().contains("0,1,2,3,4,0 79"));
    let args = ["solve", "we.inst", "--routes", "we.routes", "--generator", "enumerated", "--pricing", "enum", "--init", "simple"];
    let o = ftl(&[&args[..], &["--out", "we.txt"]].concat(), d);
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(d.join("we.txt")).unwrap().contains("summary objective=183"));
    assert_eq!(code(&ftl(&["check", "we.inst", "--schedule", "we.txt"], d)), 0);
}

#[test]
fn cut_round_limit_is_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    example(d);
    fs::write(d.join("four.routes"), "0,1,2,3,4,0 79\n0,3,4,1,2,0 129\n0,1,2,0 64\n0,3,4,0 75\n").unwrap();
    let args = ["solve", "we.inst", "--routes", "four.routes", "--generator", "enumerated", "--pricing", "enum", "--init", "simple"];
    let o = ftl(&[&args[..], &["--cut-rounds", "0"]].concat(), d);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let o = ftl(&args, d);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("summary objective=208 cuts=3"));
}

#[test]
fn too_much_freight_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let mut inst = worked_example();
    inst.commodities[1].quantity = 40;
    fs::write(dir.path().join("big.inst"), write_instance(&inst)).unwrap();
    let o = ftl(&["solve", "big.inst"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible: k2"));
}

#[test]
fn bad_input_is_a_plain_failure() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.inst"), "[meta]\nnodes=two\n").unwrap();
    assert_eq!(code(&ftl(&["check", "x.inst"], dir.path())), 1);
    assert_eq!(code(&ftl(&["solve", "--no-such-flag"], dir.path())), 1);
}
