use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use girthforge::cli::{EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VERIFY};
use girthforge::hypergraph::{complete_host, to_json};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_girthforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_timing(mut v: Value) -> Value {
    v["manifest"]
        .as_object_mut()
        .unwrap()
        .remove("wall_time_ms");
    v
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&bin(&[])), EXIT_USAGE);
    assert_eq!(code(&bin(&["gen"])), EXIT_USAGE);
    assert_eq!(
        code(&bin(&["gen", "--n", "6", "--g", "3", "--complete"])),
        EXIT_USAGE
    );
    assert_eq!(
        code(&bin(&["verify", "--system", "/nonexistent/file.json"])),
        EXIT_USAGE
    );
    assert_eq!(code(&bin(&["--help"])), EXIT_OK);
}

#[test]
fn complete_generation_round_trips_through_verify() {
    let out = scratch("k9.json");
    let report = scratch("k9-report.json");
    let args = [
        "gen",
        "--n",
        "9",
        "--g",
        "3",
        "--seed",
        "4",
        "--complete",
        "--out",
    ];
    let run = bin(&[
        &args[..],
        &[out.to_str().unwrap(), "--report", report.to_str().unwrap()],
    ]
    .concat());
    assert_eq!(
        code(&run),
        EXIT_OK,
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );

    let first = read(&out);
    assert_eq!(first["blocks"].as_array().unwrap().len(), 12);
    assert!(first.get("edges").is_none());
    let manifest = &first["manifest"];
    assert_eq!(manifest["command"], "gen");
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["parameters"]["g"], 3);
    assert_eq!(manifest["verification_digest"].as_str().unwrap().len(), 64);
    assert_eq!(read(&report)["complete"], true);

    let verify = bin(&["verify", "--system", out.to_str().unwrap(), "--g", "3"]);
    assert_eq!(code(&verify), EXIT_OK);
    let v = stdout_json(&verify);
    assert_eq!(v["decomposition"], true);
    assert!(v["problems"].as_array().unwrap().is_empty());
    assert!(v["girth"] == "inf" || v["girth"].as_u64().unwrap() > 3);

    let girth = bin(&["girth", "--system", out.to_str().unwrap(), "--gmax", "6"]);
    assert_eq!(code(&girth), EXIT_OK);
    assert_eq!(
        stdout_json(&girth)["gmax"].as_u64().unwrap(),
        v["gmax"].as_u64().unwrap()
    );

    let again = bin(&[&args[..], &[scratch("k9-again.json").to_str().unwrap()]].concat());
    assert_eq!(code(&again), EXIT_OK);
    assert_eq!(
        without_timing(first),
        without_timing(read(&scratch("k9-again.json")))
    );
}

#[test]
fn tampered_artifacts_fail_verification() {
    let out = scratch("k7.json");
    assert_eq!(
        code(&bin(&[
            "gen",
            "--n",
            "7",
            "--g",
            "3",
            "--complete",
            "--out",
            out.to_str().unwrap()
        ])),
        EXIT_OK
    );
    let mut art = read(&out);

    art["blocks"].as_array_mut().unwrap().pop();
    let dropped = scratch("k7-dropped.json");
    std::fs::write(&dropped, art.to_string()).unwrap();
    let v = bin(&["verify", "--system", dropped.to_str().unwrap()]);
    assert_eq!(code(&v), EXIT_VERIFY);
    assert_eq!(stdout_json(&v)["problems"].as_array().unwrap().len(), 1);

    art["blocks"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!([0, 1, 2]));
    art["blocks"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!([0, 1, 3]));
    let clash = scratch("k7-clash.json");
    std::fs::write(&clash, art.to_string()).unwrap();
    assert_eq!(
        code(&bin(&["verify", "--system", clash.to_str().unwrap()])),
        EXIT_VERIFY
    );
}

#[test]
fn exhausted_budget_downgrades_with_exit_three() {
    let out = scratch("k13.json");
    let run = bin(&[
        "gen",
        "--n",
        "13",
        "--g",
        "3",
        "--complete",
        "--budget-ms",
        "200",
        "--attempts",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), EXIT_BUDGET);
    let art = read(&out);
    assert!(art["blocks"].as_array().unwrap().len() < 26);
    let v = bin(&["verify", "--system", out.to_str().unwrap(), "--g", "3"]);
    assert_eq!(code(&v), EXIT_OK);
    assert_eq!(stdout_json(&v)["decomposition"], false);
}

#[test]
fn booster_and_pair_commands_emit_verified_artifacts() {
    let b = bin(&["booster", "--g", "3", "--seed", "2"]);
    assert_eq!(code(&b), EXIT_OK);
    let art = stdout_json(&b);
    assert_eq!(art["root"].as_array().unwrap().len(), 3);
    assert_eq!(art["manifest"]["command"], "booster");

    let pair = scratch("pair.json");
    let p = bin(&[
        "pair",
        "--n",
        "15",
        "--g",
        "3",
        "--seed",
        "1",
        "--out",
        pair.to_str().unwrap(),
    ]);
    assert_eq!(code(&p), EXIT_OK, "{}", String::from_utf8_lossy(&p.stderr));
    let c = bin(&["cogirth", "--system", pair.to_str().unwrap(), "--gmax", "3"]);
    assert_eq!(code(&c), EXIT_OK);
    assert_eq!(stdout_json(&c)["girth"], "inf");
}

#[test]
fn absorb_and_audit_commands() {
    let a = bin(&["absorb", "--n", "9", "--x", "0,1;0,2;1,2"]);
    assert_eq!(code(&a), EXIT_OK, "{}", String::from_utf8_lossy(&a.stderr));
    assert!(stdout_json(&a)["manifest"]["verification_digest"].is_string());

    let audit = bin(&[
        "audit", "--n", "7", "--g", "4", "--x", "0,1;2,3", "--D", "5",
    ]);
    assert!([EXIT_OK, EXIT_VERIFY].contains(&code(&audit)));
    let rep = stdout_json(&audit);
    assert_eq!(rep["log"], "natural");
    let all_pass = rep["checks"]
        .as_object()
        .unwrap()
        .values()
        .all(|c| c["pass"] == true);
    assert_eq!(all_pass, code(&audit) == EXIT_OK);
}

#[test]
fn concentration_command_reads_a_hypergraph() {
    let path = scratch("k10.json");
    std::fs::write(&path, to_json(&complete_host(10, 2).unwrap()).unwrap()).unwrap();
    let args = [
        "concentration",
        "--hypergraph",
        path.to_str().unwrap(),
        "--p",
        "0.5",
        "--K",
        "45",
        "--trials",
        "200",
    ];
    let c = bin(&args);
    assert_eq!(code(&c), EXIT_OK);
    let out = stdout_json(&c);
    assert_eq!(out["record"]["trials"], 200);
    assert_eq!(out["record"]["edges"], 45);
    assert_eq!(
        without_timing(out),
        without_timing(stdout_json(&bin(&args)))
    );
}

#[test]
fn hosts_and_edge_lists_load_from_files() {
    let host = scratch("k7-host.json");
    std::fs::write(&host, to_json(&complete_host(7, 2).unwrap()).unwrap()).unwrap();
    let x = scratch("triangle.json");
    std::fs::write(&x, "[[0,1],[0,2],[1,2]]").unwrap();

    let audit = bin(&[
        "audit",
        "--host",
        host.to_str().unwrap(),
        "--g",
        "4",
        "--x",
        x.to_str().unwrap(),
    ]);
    assert!([EXIT_OK, EXIT_VERIFY].contains(&code(&audit)));
    assert_eq!(stdout_json(&audit)["D"], 7.0);

    let report = scratch("absorb-report.json");
    let absorb = bin(&[
        "absorb",
        "--n",
        "9",
        "--x",
        x.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&absorb), EXIT_OK);
    assert_eq!(stdout_json(&absorb)["X"].as_array().unwrap().len(), 3);
    let degrees = read(&report);
    assert_eq!(degrees["max_degree_x"], 2);
    assert!(degrees["delta"].as_f64().unwrap() >= 2.0);

    let both = [
        "absorb",
        "--n",
        "9",
        "--host",
        host.to_str().unwrap(),
        "--x",
        "0,1",
    ];
    assert_eq!(code(&bin(&both)), EXIT_USAGE);
}
