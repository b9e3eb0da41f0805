//! Acceptance suite. Runs the `verify` binary once at full scale, then
//! reports one PASS/FAIL line per acceptance criterion.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use pdp_entropy::digamma;
use serde_json::Value;

struct Criterion {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn check<'a>(report: &'a Value, name: &str) -> Result<&'a Value, String> {
    report["checks"]
        .as_array()
        .and_then(|cs| cs.iter().find(|c| c["name"] == name))
        .ok_or_else(|| format!("check `{name}` missing from the report"))
}

/// All named checks passed; returns a short summary of each.
fn all_passed(report: &Value, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        match check(report, name) {
            Ok(c) => {
                let passed = c["passed"].as_bool() == Some(true);
                ok &= passed;
                let mut s = format!("{name} n={}", c["evaluated"]);
                if let Some(e) = c["max_error"].as_f64() {
                    s += &format!(" max_err={e:.1e}");
                }
                if let Some(n) = c["note"].as_str() {
                    s += &format!(" [{n}]");
                }
                if !passed {
                    s += &format!(" FAILED: {}", c["first_failure"].as_str().unwrap_or("?"));
                }
                parts.push(s);
            }
            Err(e) => {
                ok = false;
                parts.push(e);
            }
        }
    }
    (ok, parts.join("; "))
}

fn seconds(report: &Value, name: &str) -> f64 {
    check(report, name)
        .ok()
        .and_then(|c| c["seconds"].as_f64())
        .unwrap_or(f64::INFINITY)
}

fn digamma_oracle() -> (bool, String) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/digamma_oracle.csv");
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return (false, format!("{}: {e}", path.display())),
    };
    let mut worst = (0.0f64, 0.0f64);
    let mut points = 0;
    let mut in_range = true;
    for line in text.lines().skip(1) {
        let (x, want) = line.split_once(',').expect("x,psi");
        let (x, want): (f64, f64) = (x.parse().expect("x"), want.parse().expect("psi"));
        in_range &= (1e-3..=1e6).contains(&x);
        let err = (digamma(x).expect("x > 0") - want).abs();
        if err > worst.0 {
            worst = (err, x);
        }
        points += 1;
    }
    (
        points == 1000 && in_range && worst.0 <= 1e-12,
        format!(
            "{points} oracle points, max |error| = {:.2e} at x = {:.4e}",
            worst.0, worst.1
        ),
    )
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let json = dir.path().join("verify.json");
    let started = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_pdp-entropy"))
        .arg("verify")
        .arg("--out")
        .arg(&json)
        .output()
        .expect("run verify");
    let elapsed = started.elapsed().as_secs_f64();
    print!("{}", String::from_utf8_lossy(&output.stdout));
    eprint!("{}", String::from_utf8_lossy(&output.stderr));
    let status = output.status.code();
    println!("verify exited with {status:?} after {elapsed:.1}s");

    let report: Value = match std::fs::read_to_string(&json).map(|t| serde_json::from_str(&t)) {
        Ok(Ok(v)) => v,
        other => {
            println!("FAIL no verify report: {other:?}");
            return ExitCode::FAILURE;
        }
    };
    let cfg = &report["config"];
    let cells = cfg["grid"].as_array().map_or(0, Vec::len) as u64;
    let trajectories = cells * cfg["replicas"].as_u64().unwrap_or(0);
    let length = cfg["length"].as_u64().unwrap_or(0);
    let mut criteria = Vec::new();

    let (ok, detail) = all_passed(
        &report,
        &["delta_nonnegative", "delta_two_ways", "delta_discovery_structure"],
    );
    let secs = seconds(&report, "delta_two_ways");
    criteria.push(Criterion {
        id: 1,
        title: "discovery functional increments",
        passed: ok && cells == 16 && trajectories >= 10_000 && length == 1_000 && secs <= 120.0,
        detail: format!("{trajectories} trajectories x {length} steps in {secs:.1}s; {detail}"),
    });

    let (ok, detail) = all_passed(
        &report,
        &["eta_identity", "eta_positive", "eta_bounds", "max_step_identity"],
    );
    criteria.push(Criterion {
        id: 2,
        title: "weighted entropy step",
        passed: ok,
        detail,
    });

    let (ok, detail) = all_passed(&report, &["decomposition"]);
    criteria.push(Criterion {
        id: 3,
        title: "telescoping decomposition at ell = 1000",
        passed: ok && length == 1_000,
        detail,
    });

    let (ok, detail) = all_passed(&report, &["extremal_brute_force", "global_extremes"]);
    let secs = seconds(&report, "extremal_brute_force");
    criteria.push(Criterion {
        id: 4,
        title: "fixed-k extremes by enumeration, ell <= 12",
        passed: ok && secs <= 30.0,
        detail: format!("{secs:.2}s; {detail}"),
    });

    let (ok, detail) = all_passed(
        &report,
        &[
            "frequentist_delta",
            "frequentist_weighted_step",
            "frequentist_single_class",
            "kappa_bounds",
        ],
    );
    let kappa_n = check(&report, "kappa_bounds")
        .ok()
        .and_then(|c| c["evaluated"].as_u64());
    criteria.push(Criterion {
        id: 5,
        title: "frequentist suite",
        passed: ok && kappa_n == Some(100_000),
        detail,
    });

    let (ok, detail) = all_passed(
        &report,
        &["prior_mean(alpha=0,theta=1)", "prior_mean(alpha=0.5,theta=0.5)"],
    );
    let scale_ok = cfg["prior_draws"].as_u64() == Some(10_000) && cfg["truncation"].as_u64() == Some(10_000);
    criteria.push(Criterion {
        id: 6,
        title: "prior mean entropy Monte Carlo",
        passed: ok && scale_ok,
        detail,
    });

    let (ok, detail) = all_passed(&report, &["mle_not_monotone", "pdp_not_monotone"]);
    criteria.push(Criterion {
        id: 7,
        title: "non-monotone entropy counterexamples",
        passed: ok,
        detail,
    });

    let (ok, detail) = all_passed(
        &report,
        &["general_admissibility", "general_specialization", "general_delta"],
    );
    criteria.push(Criterion {
        id: 8,
        title: "general entropy class",
        passed: ok,
        detail,
    });

    let (ok, detail) = all_passed(&report, &["consistency_trend"]);
    criteria.push(Criterion {
        id: 9,
        title: "consistency trend of the two estimators",
        passed: ok,
        detail,
    });

    let (oracle_ok, oracle_detail) = digamma_oracle();
    let (ok, detail) = all_passed(&report, &["digamma_invariants"]);
    criteria.push(Criterion {
        id: 10,
        title: "digamma accuracy",
        passed: ok && oracle_ok,
        detail: format!("{oracle_detail}; {detail}"),
    });

    println!();
    for c in &criteria {
        println!(
            "{} criterion {:>2}: {} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            c.detail
        );
    }
    let all = criteria.iter().all(|c| c.passed);
    let exit_consistent = (status == Some(0)) == (report["passed"] == true);
    println!(
        "{} verify exit status {:?} agrees with its report",
        if exit_consistent { "PASS" } else { "FAIL" },
        status
    );
    if all && exit_consistent && status == Some(0) {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
