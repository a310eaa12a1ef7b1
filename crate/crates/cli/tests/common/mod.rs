#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_convspec"));
    c.env_remove("CONVSPEC_MAX_N").env_remove("CONVSPEC_MAX_N_Q");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Pinned invocations and the file holding the expected bytes of each.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("spectrum_krawtchouk.csv", &["spectrum", "--family", "krawtchouk", "--p", "0.5", "--N", "5"]),
    (
        "spectrum_dual_q_hahn.csv",
        &["spectrum", "--family", "dual_q_hahn", "--q", "0.5", "--gamma", "0.5", "--delta", "0.5", "--N", "8"],
    ),
    (
        "spectrum_dual_q_krawtchouk.json",
        &["spectrum", "--family", "dual_q_krawtchouk", "--q", "0.3", "--c", "-1", "--N", "6", "--format", "json"],
    ),
    ("weights_chebyshev.csv", &["weights", "--family", "chebyshev", "--N", "4"]),
    ("weights_chebyshev_normalized.csv", &["weights", "--family", "chebyshev", "--N", "4", "--normalized"]),
    (
        "weights_hahn.csv",
        &["weights", "--family", "hahn", "--alpha", "0.5", "--beta", "1.5", "--N", "6", "--normalized"],
    ),
    (
        "weights_q_krawtchouk.json",
        &["weights", "--family", "q_krawtchouk", "--q", "0.5", "--p", "1", "--N", "5", "--format", "json"],
    ),
    (
        "evolve_dual_hahn.csv",
        &[
            "evolve", "--family", "dual_hahn", "--gamma", "1", "--delta", "0.5", "--N", "4", "--t-max", "2", "--dt",
            "0.25", "--omega0", "1.1", "--omega1", "0.4",
        ],
    ),
    (
        "evolve_lifted_krawtchouk.csv",
        &[
            "evolve", "--family", "krawtchouk", "--p", "0.3", "--k0", "2", "--k1", "3", "--r0", "1", "--r1", "2",
            "--N", "5", "--t-max", "3", "--dt", "0.5",
        ],
    ),
];

/// Runs every pinned invocation and returns the names whose output differs
/// from the stored bytes. With `CONVSPEC_UPDATE_GOLDEN` set the files are
/// rewritten instead.
pub fn golden_mismatches() -> Vec<String> {
    let update = std::env::var_os("CONVSPEC_UPDATE_GOLDEN").is_some();
    let mut bad = Vec::new();
    for (name, args) in GOLDEN_CASES {
        let out = run(args);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let path = golden_dir().join(name);
        if update {
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        match std::fs::read(&path) {
            Ok(want) if want == out.stdout => {}
            _ => bad.push(name.to_string()),
        }
    }
    bad
}
