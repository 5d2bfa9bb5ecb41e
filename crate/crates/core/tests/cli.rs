use std::process::Command;

use profinite_lab::cli;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["profinite-lab".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn describe_halt1() {
    let reg = fixture("halt1.tm");
    let (code, out, _) = run(&["--registry", &reg, "set", "describe", "1"]);
    assert_eq!(code, 0);
    for needle in ["2 + 720720Z", "62 + 360360Z", "302 + 360360Z", "y=360362", "r_prime=1/15"] {
        assert!(out.contains(needle), "missing {needle} in\n{out}");
    }
}

#[test]
fn member_and_witness() {
    let reg = fixture("loop.tm");
    let (code, out, _) = run(&["--registry", &reg, "set", "member", "62"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("true"));
    let (code, out, _) = run(&["--registry", &reg, "set", "witness", "2"]);
    assert_eq!(code, 2, "{out}");
    assert!(out.starts_with("unknown"));
    let (code, out, _) = run(&["--registry", &reg, "set", "witness", "62"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("360360"));
    let (code, _, err) = run(&["--registry", &reg, "set", "witness", "3"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
}

#[test]
fn machine_commands() {
    let reg = fixture("halt14.tm");
    let (code, out, _) = run(&["--registry", &reg, "machine", "run", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("14"), "{out}");
    let (code, _, _) = run(&["--registry", &fixture("loop_declared.tm"), "machine", "validate", "--audit"]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["--registry", "/nonexistent.tm", "set", "member", "2"]);
    assert_eq!(code, 1);
}

#[test]
fn group_and_depth() {
    let reg = fixture("loop_declared.tm");
    let (code, out, _) = run(&["--registry", &reg, "group", "trivial", "aeAeaeAe"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("true"));
    let (code, out, _) = run(&["--registry", &reg, "depth", "quotient", "2", "60"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("non-identity"), "{out}");
    let (code, out, _) = run(&["--registry", &reg, "--format", "tsv", "depth", "table", "--xs", "2,3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3, "{out}");
    assert!(lines[1].contains("60"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_profinite-lab");
    let out = Command::new(bin).args(["metric", "theta", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2520");
    let out = Command::new(bin)
        .args(["--registry", &fixture("loop.tm"), "set", "witness", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin).args(["metric", "theta", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
