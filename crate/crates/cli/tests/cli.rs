use std::process::Command;

fn mdsa(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mdsa")).args(args).output().unwrap()
}

#[test]
fn run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = mdsa(&["run", "--n", "30", "--seed", "4", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("run_mdsa_n30_s4.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn config_file_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.conf");
    std::fs::write(&cfg, "n = 25\nseed = 9\n").unwrap();
    let out = dir.path().to_str().unwrap();
    let o = mdsa(&["run", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("run_mdsa_n25_s9.csv").exists());
}

#[test]
fn bad_parameters_exit_one() {
    assert_eq!(mdsa(&["run", "--n", "0", "--seed", "1"]).status.code(), Some(1));
    assert_eq!(mdsa(&["run", "--policy", "maybe"]).status.code(), Some(1));
    assert_eq!(mdsa(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn missing_config_exits_two() {
    assert_eq!(mdsa(&["run", "--config", "/nonexistent/sim.conf"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(mdsa(&["--help"]).status.code(), Some(0));
}
