use std::process::{Command, Output};

use serde_json::Value;

fn cohen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohen"))
        .args(args)
        .env_remove("COHEN_THREADS")
        .env_remove("COHEN_MEMORY_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--output", "json"];
    full.extend_from_slice(args);
    let out = cohen(&full);
    assert!(
        out.status.success(),
        "{:?}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn sum_prints_value() {
    let out = cohen(&["sum", "--r", "2", "--s", "2", "--n", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "3\n");
    for evaluator in ["direct", "divisor-sum", "fast", "shift", "all"] {
        let out = cohen(&[
            "sum",
            "--r",
            "12",
            "--s",
            "2",
            "--n",
            "144",
            "--evaluator",
            evaluator,
        ]);
        assert_eq!(stdout(&out), "96\n", "{evaluator}");
    }
    let out = cohen(&[
        "sum",
        "--r",
        "6",
        "--s",
        "1",
        "--n",
        "3",
        "--evaluator",
        "kvector",
    ]);
    assert_eq!(stdout(&out), "-2\n");
}

#[test]
fn scalar_commands() {
    let v = json(&["jordan", "--k", "2", "--n", "4", "--s", "2"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["jordan"], "12");
    assert_eq!(v["mobius"], 0);
    assert_eq!(v["tau_s"], 2);
    assert_eq!(v["factors"], "2^2");

    let out = cohen(&["gcd-s", "--m", "4", "--n", "8", "--s", "2"]);
    assert_eq!(stdout(&out), "4\n");

    let out = cohen(&[
        "--output", "csv", "gcd-s", "--m", "12", "--n", "18", "--s", "1",
    ]);
    assert_eq!(stdout(&out), "m,n,s,value\n12,18,1,6\n");
}

#[test]
fn expansion_report() {
    let v = json(&[
        "expansion",
        "--s",
        "1",
        "--k",
        "1",
        "--n",
        "1",
        "--Q",
        "10000",
    ]);
    assert_eq!(v["report"], "expansion");
    assert!(v["final_abs_error"].as_f64().unwrap() < 1e-3);
    assert_eq!(v["converged"], true);

    let out = cohen(&[
        "--output",
        "csv",
        "expansion",
        "--s",
        "2",
        "--k",
        "1",
        "--n",
        "3",
        "--Q",
        "500",
    ]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "Q,partial_sum,abs_error");
    assert_eq!(lines.len(), 4);
}

#[test]
fn local_check_and_kvector_series() {
    let v = json(&[
        "local-check",
        "--s",
        "2",
        "--k",
        "2",
        "--n",
        "2",
        "--primes",
        "2,3",
    ]);
    assert_eq!(v["lhs"], "81/100");
    assert_eq!(v["holds"], true);

    let out = cohen(&[
        "local-check",
        "--s",
        "1",
        "--k",
        "1",
        "--n",
        "1",
        "--primes",
        "2,4",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let v = json(&[
        "sivaramakrishnan",
        "--s",
        "1",
        "--k",
        "1",
        "--n",
        "1",
        "--R",
        "500",
    ]);
    assert!(v["final_abs_error"].as_f64().unwrap() < 1e-2);
}

#[test]
fn asymptotic_outputs_and_plot_file() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("ratio.dat");
    let v = json(&[
        "asymptotic",
        "--s",
        "2",
        "--a",
        "4",
        "--b",
        "4",
        "--h",
        "4",
        "--N",
        "30000",
        "--emit-plot-data",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(v["m"], 2);
    assert_eq!(v["k"], 1);
    assert_eq!(v["ratios"].as_array().unwrap().len(), 2);
    let text = std::fs::read_to_string(&plot).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().starts_with("30000 "));

    let out = cohen(&["--output", "csv", "asymptotic", "--N", "10000"]);
    assert!(stdout(&out).starts_with("N,lhs,N_rhs,ratio\n10000,"));
}

#[test]
fn main_term_matches_product() {
    let v = json(&["main-term", "--s", "2", "--a", "4", "--b", "3", "--h", "4"]);
    assert!(v["abs_difference"].as_f64().unwrap() < 1e-6);
}

#[test]
fn json_is_deterministic_across_runs_and_threads() {
    let args = [
        "--output",
        "json",
        "asymptotic",
        "--N",
        "200000",
        "--h",
        "4",
    ];
    let base = cohen(&[&["--threads", "1"], &args[..]].concat());
    assert!(base.status.success());
    for threads in ["1", "3", "8"] {
        let again = cohen(&[&["--threads", threads], &args[..]].concat());
        assert_eq!(base.stdout, again.stdout, "threads = {threads}");
    }
}

#[test]
fn environment_overrides() {
    let out = Command::new(env!("CARGO_BIN_EXE_cohen"))
        .args(["asymptotic", "--N", "100000"])
        .env("COHEN_MEMORY_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("memory budget"));

    let out = Command::new(env!("CARGO_BIN_EXE_cohen"))
        .args(["sum", "--r", "5", "--s", "1", "--n", "5"])
        .env("COHEN_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), "4\n");
}

#[test]
fn sieve_cache_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j2.bin");
    let p = path.to_str().unwrap();
    let out = cohen(&[
        "sieve-cache",
        "--kind",
        "jordan",
        "--k",
        "2",
        "--limit",
        "1000",
        "--out",
        p,
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 21 + 8 * 1000);
    let out = cohen(&[
        "sieve-cache",
        "--kind",
        "jordan",
        "--k",
        "2",
        "--limit",
        "1000",
        "--verify",
        p,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // Same file checked against a different table.
    let out = cohen(&[
        "sieve-cache",
        "--kind",
        "jordan",
        "--k",
        "3",
        "--limit",
        "1000",
        "--verify",
        p,
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validation_errors_exit_one_with_single_line() {
    for args in [
        &["sum", "--r", "0", "--s", "1", "--n", "1"][..],
        &["expansion", "--s", "1"],
        &["asymptotic", "--s", "2", "--a", "2"],
        &["asymptotic", "--s", "1"],
        &["jordan", "--k", "9", "--n", "10000000000"],
        &[
            "sum",
            "--r",
            "1000",
            "--s",
            "3",
            "--n",
            "1",
            "--evaluator",
            "direct",
        ],
        &["no-such-command"],
    ] {
        let out = cohen(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn help_lists_every_command() {
    let out = cohen(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for cmd in [
        "sum",
        "jordan",
        "gcd-s",
        "expansion",
        "local-check",
        "sivaramakrishnan",
        "asymptotic",
        "main-term",
        "sieve-cache",
        "repro-all",
    ] {
        assert!(text.contains(cmd), "{cmd}");
    }
}

#[test]
fn repro_all_summary() {
    let v = json(&["repro-all", "--N", "20000"]);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert_eq!(checks[0]["passed"], true);
    assert!(checks[0]["detail"]
        .as_str()
        .unwrap()
        .starts_with("17280 cases"));
    assert!(v["all_passed"].is_boolean());
}
