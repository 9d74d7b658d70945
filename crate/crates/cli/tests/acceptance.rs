//! One pass/fail line per acceptance criterion. Criteria 1 to 12 come from
//! the in-process verify report; criterion 13 also runs the binary with
//! one and eight threads and compares its output byte for byte.

use std::process::Command;

use lowent::table::format_real;
use lowent::verify::{run_verify, Suite};

const SEED: u64 = 1;

fn run_binary(threads: &str, dir: &std::path::Path, csv: &str) -> (Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_lowent"))
        .args(["--threads", threads, "--seed", &SEED.to_string(), "verify", "--suite", "all", "--csv", csv])
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (out.stdout, std::fs::read(dir.join(csv)).expect("report written"))
}

#[test]
fn acceptance() {
    let report = run_verify(Suite::All, SEED);
    let mut failed = Vec::new();
    for r in report.rows.iter().filter(|r| r.id != 13) {
        println!(
            "criterion {:>2} {}: {} ({} {} {}) {}",
            r.id,
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            format_real(r.measured),
            r.relation,
            format_real(r.threshold),
            r.detail
        );
        if !r.pass {
            failed.push(r.id);
        }
    }

    let internal = report.rows.iter().find(|r| r.id == 13).expect("determinism row");
    let dir = tempfile::tempdir().unwrap();
    let (out1, csv1) = run_binary("1", dir.path(), "one.csv");
    let (out8, csv8) = run_binary("8", dir.path(), "eight.csv");
    let expected_text = report.render_text().into_bytes();
    let expected_csv = report.to_table().to_csv().unwrap().into_bytes();
    let same_threads = out1 == out8 && csv1 == csv8;
    let same_runs = out1 == expected_text && csv1 == expected_csv;
    let pass = internal.pass && same_threads && same_runs;
    println!(
        "criterion 13 determinism: {} (rerun rows differing {}, --threads 1 vs 8 identical {}, repeated run identical {})",
        if pass { "PASS" } else { "FAIL" },
        format_real(internal.measured),
        same_threads,
        same_runs
    );
    if !pass {
        failed.push(13);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
