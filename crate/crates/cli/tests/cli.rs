use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bonsai-real"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn realizable_instance_exits_10() {
    let o = run(&["--aut", &data("a_real.hoa"), "--check", "real", "-k", "1"]);
    assert_eq!(stdout(&o), "REALIZABLE");
    assert_eq!(o.status.code(), Some(10));
}

#[test]
fn real_mode_alone_cannot_refute() {
    let o = run(&["--aut", &data("a_loop.hoa"), "--check", "real", "--kmax", "4"]);
    assert_eq!(stdout(&o), "UNKNOWN");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn race_reports_unrealizable_exits_20() {
    let o = run(&[
        "--aut",
        &data("pairs/u01_infinitely_often_r.aut.hoa"),
        "--neg-aut",
        &data("pairs/u01_infinitely_often_r.neg.hoa"),
        "--check",
        "both",
    ]);
    assert_eq!(stdout(&o), "UNREALIZABLE");
    assert_eq!(o.status.code(), Some(20));
}

#[test]
fn unreal_mode_uses_the_complement() {
    let o = run(&[
        "--aut",
        &data("pairs/u03_always_r.aut.hoa"),
        "--neg-aut",
        &data("pairs/u03_always_r.neg.hoa"),
        "--check",
        "unreal",
    ]);
    assert_eq!(stdout(&o), "UNREALIZABLE");
    let o = run(&[
        "--aut",
        &data("pairs/r01_always_g.aut.hoa"),
        "--neg-aut",
        &data("pairs/r01_always_g.neg.hoa"),
        "--check",
        "unreal",
        "--kmax",
        "8",
    ]);
    assert_eq!(stdout(&o), "UNKNOWN");
}

#[test]
fn pre_shifted_automaton_is_solved_directly() {
    // A single state without edges is trivially won by whoever plays it.
    let o = run(&[
        "--aut",
        &data("a_loop.hoa"),
        "--pre-shifted",
        &data("pairs/u05_false.neg.hoa"),
        "--check",
        "unreal",
    ]);
    assert_eq!(stdout(&o), "UNREALIZABLE");
}

#[test]
fn errors_exit_2() {
    for args in [
        vec!["--aut", "/nonexistent.hoa"],
        vec!["--aut", &data("a_real.hoa"), "--downset", "nope"],
        vec!["--aut", &data("a_real.hoa"), "--check", "both"],
        vec!["--aut", &data("a_real.hoa"), "--kgrowth", "1"],
        vec!["--aut", &data("a_real.hoa"), "--timeout", "0"],
        vec!["--ltl", "G F a"],
        vec!["--aut", &data("a_real.hoa"), "--outs", "zzz"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stdout(&o).is_empty());
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["--ltl", "G F a"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("HOA"));
}

#[test]
fn outs_override_the_partition() {
    let f = data("pairs/r06_eventually_g.aut.hoa");
    let o = run(&["--aut", &f, "--kmax", "4"]);
    assert_eq!(stdout(&o), "REALIZABLE");
    // Handing g to the environment makes the same automaton unwinnable.
    let o = run(&["--aut", &f, "--kmax", "4", "--outs", "r"]);
    assert_eq!(stdout(&o), "UNKNOWN");
}

#[test]
fn trace_lines_are_machine_readable() {
    let o = run(&["--aut", &data("a_loop.hoa"), "-k", "2", "--kmax", "2", "--trace"]);
    let err = String::from_utf8_lossy(&o.stderr);
    let lines: Vec<&str> = err.lines().filter(|l| l.starts_with("iter=")).collect();
    assert_eq!(
        lines,
        vec![
            "iter=1 input=t antichain=1 changed=1",
            "iter=2 input=t antichain=1 changed=1",
            "iter=3 input=t antichain=1 changed=1",
            "iter=4 input=t antichain=1 changed=0",
        ]
    );
}

#[test]
fn every_backend_flag_combination_runs() {
    for downset in ["antichain", "full", "kdtree", "bins"] {
        for vector in ["plain", "lanes"] {
            for picker in ["rr", "critical", "critical-pq", "critical-randp", "critical-randf"] {
                let o = run(&[
                    "--aut",
                    &data("a_real.hoa"),
                    "--downset",
                    downset,
                    "--vector",
                    vector,
                    "--picker",
                    picker,
                    "--bool-states",
                    "off",
                    "--inputs",
                    "pure",
                    "--precompute",
                    "off",
                    "--seed",
                    "7",
                ]);
                assert_eq!(o.status.code(), Some(10));
            }
        }
    }
}

#[test]
fn step_budget_exhaustion_is_unknown() {
    let o = run(&["--aut", &data("a_real.hoa"), "--step-budget", "0"]);
    assert_eq!(stdout(&o), "UNKNOWN");
    assert_eq!(o.status.code(), Some(0));
}
