use std::process::{Command, Output};

fn gcross(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcross")).args(args).output().expect("binary runs")
}

fn gcross_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcross"))
        .args(args)
        .env("UCC_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_reports_no_crossing_and_dominance() {
    let o = gcross(&["check", "--alpha", "1", "--theta", "1,6,10", "--eta", "4,5,10"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["classification"], "NO_CROSSING");
    assert_eq!(v["orders"]["st_theta_le_eta"], true);
    assert_eq!(v["engine_version"].as_str().map(|s| s.starts_with("gcross-core")), Some(true));
}

#[test]
fn check_two_point_and_identical() {
    let o = gcross(&["check", "--alpha", "1", "--theta", "1,4", "--eta", "2,3"]);
    assert!(stdout(&o).contains("SINGLE_CROSSING_BELOW"));
    let o = gcross(&["check", "--alpha", "1", "--theta", "2,2", "--eta", "2,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("NO_CROSSING"));
}

#[test]
fn hex_inputs_are_accepted() {
    let a = stdout(&gcross(&["check", "--alpha", "0x1p+0", "--theta", "0x1p+0,0x1p+2", "--eta", "2,3"]));
    let b = stdout(&gcross(&["check", "--alpha", "1", "--theta", "1,4", "--eta", "2,3"]));
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["check", "--alpha", "1", "--theta", "1,2", "--eta", "1"],
        vec!["check", "--alpha", "-1", "--theta", "1,2", "--eta", "1,2"],
        vec!["check", "--alpha", "1", "--theta", "1,x", "--eta", "1,2"],
        vec!["check", "--alpha", "1", "--theta", "1,2", "--eta", "1,2", "--bogus"],
        vec!["sweep", "--alpha", "1", "--n", "3", "--trials", "0", "--seed", "1"],
        vec!["sweep", "--alpha", "1", "--n", "3", "--trials", "5"],
        vec!["counterexample", "--alpha", "1.5"],
    ] {
        let o = gcross(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    let o = gcross(&["counterexample", "--alpha", "0.5", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("MULTI(3)"));
    let o = gcross(&["verify", "--cert", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("overall: PASS"));

    // A tampered vector must not verify.
    let bad = text.replacen("\"decimal\": 0.5", "\"decimal\": 0.4", 1).replacen("\"hex\": \"0x1p-1\"", "\"hex\": \"0x1.999999999999ap-2\"", 1);
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, bad).unwrap();
    let o = gcross(&["verify", "--cert", bad_path.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn exhausted_search_exits_three() {
    let o = gcross(&["counterexample", "--alpha", "0.5", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_is_deterministic_and_single_crossing() {
    let args = ["sweep", "--alpha", "1,1.5,2", "--n", "3,4", "--trials", "50", "--seed", "7"];
    let a = gcross_env(&args, "1");
    let b = gcross_env(&args, "3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,alpha,n,theta,eta,classification,k,crossings,margins,seed"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 300);
    assert!(rows.iter().all(|r| !r.contains("MULTI")));
    for (i, r) in rows.iter().enumerate() {
        assert!(r.starts_with(&format!("{i},")));
    }
}

#[test]
fn sweep_near_counterexample_finds_multiple_crossings() {
    let o = gcross(&["sweep", "--alpha", "0.5", "--n", "3", "--trials", "20", "--seed", "7", "--near-counterexample"]);
    assert!(matches!(o.status.code(), Some(0) | Some(2)));
    assert!(stdout(&o).lines().any(|l| l.contains("MULTI(")));
}

#[test]
fn check_output_is_byte_identical() {
    let args = ["check", "--alpha", "0.75", "--theta", "0.5,1,3", "--eta", "1,1.5,2"];
    assert_eq!(gcross(&args).stdout, gcross_env(&args, "2").stdout);
}

#[test]
fn mixture_reports_two_modes() {
    let o = gcross(&["mixture", "--alpha", "0.5", "--x0", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["maxima"], 2);
    assert_eq!(v["minima"], 1);
}

#[test]
fn selftest_fault_injection_exits_four() {
    let o = gcross(&["selftest", "--fast", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("criterion"));
}
