#![allow(dead_code)]

pub mod check;

use std::path::{Path, PathBuf};
use std::process::Command;

pub const BIN: &str = env!("CARGO_BIN_EXE_robust-ftap");

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// `(name, arguments, expected exit code)`; paths are relative to `tests/data`.
pub const GOLDEN: &[(&str, &[&str], i32)] = &[
    ("check_na_binomial", &["check-na", "--market", "binomial.json"], 0),
    ("check_na_rising", &["check-na", "--market", "rising.json"], 2),
    ("check_na_three_state", &["check-na", "--market", "three_state.json"], 0),
    ("check_na_calibrated", &["check-na", "--market", "calibrated.json"], 0),
    ("check_na_kernel", &["check-na", "--market", "kernel_two_period.json"], 0),
    ("check_sna_binomial", &["check-sna", "--market", "binomial.json"], 0),
    ("check_sna_three_state", &["check-sna", "--market", "three_state.json"], 2),
    ("check_sna_kernel", &["check-sna", "--market", "kernel_two_period.json"], 0),
    ("superhedge_binomial_call", &["superhedge", "--market", "binomial.json", "--claim", "binomial_call.json", "--dual"], 0),
    ("superhedge_binomial_call_float", &["superhedge", "--market", "binomial.json", "--claim", "binomial_call.json", "--tol", "1e-9"], 0),
    (
        "superhedge_three_state_sensitivity",
        &["superhedge", "--market", "three_state.json", "--claim", "three_state_c.json", "--sensitivity"],
        0,
    ),
    (
        "superhedge_three_state_per_prior",
        &["superhedge", "--market", "three_state.json", "--claim", "three_state_c.json", "--prior", "P2", "--continuation", "per-prior"],
        0,
    ),
    (
        "superhedge_three_state_cap",
        &["superhedge", "--market", "three_state.json", "--claim", "three_state_c.json", "--prior", "P2", "--cap", "1"],
        0,
    ),
    ("superhedge_calibrated_mid", &["superhedge", "--market", "calibrated.json", "--claim", "trinomial_mid.json", "--dual"], 0),
    (
        "superhedge_kernel",
        &["superhedge", "--market", "kernel_two_period.json", "--claim", "kernel_claim.json", "--sensitivity", "--dual"],
        0,
    ),
    ("measures_binomial", &["measures", "--market", "binomial.json", "--leaf", "u", "--n-max", "5"], 0),
    ("measures_trinomial_exact", &["measures", "--market", "trinomial.json", "--leaf", "m", "--n-max", "3", "--variant", "exact"], 0),
    ("calibrate_quotes", &["calibrate", "--quotes", "quotes.json"], 0),
    ("calibrate_worked", &["calibrate", "--quotes", "quotes_worked.json"], 0),
    ("calibrate_bad", &["calibrate", "--quotes", "quotes_bad.json"], 2),
    (
        "calibrate_assemble",
        &["calibrate", "--quotes", "quotes.json", "--tree", "calibration_tree.json", "--priors", "calibration_priors.json"],
        0,
    ),
    ("convex_order_ordered", &["convex-order", "--mu", "mu.json", "--nu", "nu.json"], 0),
    ("convex_order_reversed", &["convex-order", "--mu", "nu.json", "--nu", "mu.json"], 2),
    ("generate_seed1", &["generate", "--seed", "1", "--horizon", "1", "--branching", "2"], 0),
    ("oracle_three_state", &["oracle", "--market", "three_state.json"], 2),
];

pub struct Run {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Runs the binary from `tests/data` with the given worker count.
pub fn run_bin(args: &[&str], threads: Option<usize>) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).current_dir(data_dir()).env_remove("ROBUST_FTAP_THREADS");
    if let Some(n) = threads {
        cmd.env("ROBUST_FTAP_THREADS", n.to_string());
    }
    let out = cmd.output().expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
        code: out.status.code().unwrap_or(-1),
    }
}

/// Compares every golden case against its file, running each with the
/// given thread counts. Rewrites the files when `ROBUST_FTAP_BLESS` is set.
pub fn golden_mismatches(threads: &[usize]) -> Vec<String> {
    let bless = std::env::var_os("ROBUST_FTAP_BLESS").is_some();
    let mut bad = Vec::new();
    for (name, args, code) in GOLDEN {
        let path = golden_dir().join(format!("{name}.json"));
        let first = run_bin(args, Some(threads[0]));
        if bless {
            std::fs::write(&path, &first.stdout).expect("write golden file");
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_default();
        for &t in threads {
            for _ in 0..2 {
                let r = run_bin(args, Some(t));
                if r.code != *code {
                    bad.push(format!("{name}: exit {} (expected {code}) with {t} threads: {}", r.code, r.stderr.trim()));
                } else if r.stdout != expected {
                    bad.push(format!("{name}: output differs from golden file with {t} threads"));
                }
            }
        }
    }
    bad
}
