use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clap::CommandFactory;
use lmstab_cli::Cli;

fn lmstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmstab")).args(args).output().unwrap()
}

fn golden(name: &str) -> Vec<u8> {
    fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

#[test]
fn generate_matches_golden() {
    let out = lmstab(&["generate", "--n", "20", "--d", "2", "--p", "0.1", "--weights", "exp:mean=20", "--seed", "7"]);
    assert!(out.status.success());
    assert_eq!(out.stdout, golden("generate.txt"));
    let x = lmstab::WeightedComplex::from_text(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!((x.n(), x.d()), (20, 2));
}

#[test]
fn clt_run_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let out = lmstab(&[
        "clt", "--stat", "nn", "--n", "200", "--d", "1", "--replicas", "10000", "--seed", "1", "--out",
        run.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(run.join("summary.json")).unwrap(), golden("clt_summary.json"));
    assert_eq!(fs::read(run.join("replicas.csv")).unwrap(), golden("clt_replicas.csv"));
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(run.join("metadata.json")).unwrap()).unwrap();
    assert!(meta["wall_time_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn bound_matches_golden() {
    let out = lmstab(&[
        "bound", "--formula", "corollary", "--n", "10000", "--d", "2", "--lambda", "0.4", "--k", "3", "--J", "1",
        "--sigma-sq", "auto:n^d", "--delta", "0",
    ]);
    assert!(out.status.success());
    assert_eq!(out.stdout, golden("bound_corollary.json"));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.73993784386148958812).abs() < 1e-9);
    assert_eq!(v["note"], "up to universal constant C");
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"n":30,"d":2,"lambda":1.5,"stat":"isolated","replicas":40,"seed":3}"#).unwrap();
    let out = lmstab(&["clt", "--config", cfg.to_str().unwrap(), "--replicas", "20", "--p", "0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["replicas"], 20);
    assert_eq!(doc["config"]["p"], 0.1);
    assert_eq!(doc["result"]["replicas"], 20);
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.txt");
    let f = file.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["generate", "--n", "8", "--d", "2", "--p", "0.3", "--seed", "1", "--out", f],
        vec!["stat", "--stat", "betti:4", "--input", f],
        vec!["stat", "--stat", "nn", "--n", "9", "--d", "1"],
        vec!["variance", "--stat", "nn", "--n", "30", "--d", "1", "--replicas", "50", "--seed", "2"],
        vec!["stabilization", "--stat", "nn-alpha:0.5", "--n", "10", "--d", "1", "--replicas", "20", "--seed", "2", "--k", "2"],
        vec!["gamma", "--n", "6", "--d", "1", "--p", "0.5", "--replicas", "200", "--seed", "2", "--k", "2"],
        vec!["bound", "--formula", "rho", "--n", "1000", "--d", "1", "--lambda", "0.5", "--k", "1"],
        vec!["cov-nn", "--n", "50", "--replicas", "100", "--seed", "4", "--copies", "4"],
    ];
    for args in runs {
        let out = lmstab(&args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stderr.is_empty());
    }
    let g = lmstab(&["gamma", "--n", "6", "--d", "1", "--p", "0.5", "--replicas", "200", "--seed", "2", "--k", "2"]);
    let doc: serde_json::Value = serde_json::from_slice(&g.stdout).unwrap();
    assert!(doc["result"]["exact"].as_f64().is_some());
}

#[test]
fn failures_give_one_json_line_and_exit_codes() {
    let cases: [(&[&str], i32, &str); 5] = [
        (&["clt", "--n", "10"], 1, "usage"),
        (&["clt", "--stat", "nn", "--n", "10", "--d", "1", "--replicas", "5", "--seed", "1", "--frobnicate"], 1, "usage"),
        (&["clt", "--stat", "bogus", "--n", "10", "--d", "1", "--replicas", "5", "--seed", "1"], 1, "usage"),
        (&["stat", "--stat", "nn", "--input", "/nonexistent/complex.txt"], 2, "runtime"),
        (&["stabilization", "--stat", "isolated", "--n", "5", "--d", "2", "--replicas", "5", "--seed", "1"], 2, "runtime"),
    ];
    for (args, code, kind) in cases {
        let out = lmstab(args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        let v: serde_json::Value = serde_json::from_str(&err).unwrap();
        assert_eq!(v["error"], kind, "{args:?}");
    }
}

#[test]
fn readme_documents_every_flag() {
    let readme = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../README.md")).unwrap();
    let cli_section = &readme[readme.find("## CLI").expect("README has a CLI section")..];
    let documented: BTreeSet<String> = cli_section
        .split(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
        .filter(|w| w.starts_with("--") && w[2..].starts_with(|c: char| c.is_ascii_alphabetic()))
        .map(String::from)
        .collect();
    let mut cmd = Cli::command();
    let mut flags = BTreeSet::new();
    for sub in cmd.get_subcommands_mut() {
        let help = sub.render_long_help().to_string();
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                if long == "help" || long == "version" {
                    continue;
                }
                let flag = format!("--{long}");
                assert!(help.contains(&flag), "help of {} lacks {flag}", sub.get_name());
                flags.insert(flag);
            }
        }
        let name = sub.get_name().to_string();
        let headed = cli_section
            .lines()
            .filter_map(|l| l.strip_prefix("### "))
            .any(|h| h.split(", ").any(|n| n == name));
        assert!(headed, "README lacks a section for {name}");
    }
    assert_eq!(documented, flags);
}
