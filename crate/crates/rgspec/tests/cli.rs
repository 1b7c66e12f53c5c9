use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rgspec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rgspec"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn probe_phi() {
    let dir = tempfile::tempdir().unwrap();
    let o = rgspec(&["probe", "--phi", "0"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.5\n");
    let o = rgspec(&["probe", "--log-binom", "--n", "10", "--k", "5"], dir.path());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 252f64.ln()).abs() < 1e-12);
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.txt", "b.txt"] {
        let o = rgspec(&["gen", "--n", "4", "--p", "0.5", "--seed", "42", "--out", name], dir.path());
        assert!(o.status.success());
    }
    let a = fs::read(dir.path().join("a.txt")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.txt")).unwrap());
}

#[test]
fn spectrum_of_stored_cycle() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c5.txt"), "5 5\n1 2\n1 5\n2 3\n3 4\n4 5\n").unwrap();
    let o = rgspec(&["spectrum", "--in", "c5.txt", "--k", "3"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "3,1,2,2,2\n");
    let o = rgspec(&["spectrum", "--in", "c5.txt"], dir.path());
    assert_eq!(stdout(&o).lines().count(), 5);
    assert!(stdout(&o).ends_with("5,5,5,1,1\n"));
}

#[test]
fn construct_writes_one_based_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = rgspec(
        &["construct", "--n", "150", "--seed", "2", "--strict", "--out", "r.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["schema"], "rgspec-construct/1");
    assert_eq!(v["success"], true);
    assert_eq!(v["achieved"], v["target"]);
    let subset = v["subset"].as_array().unwrap();
    assert_eq!(subset.len() as u64, v["subset_size"].as_u64().unwrap());
    assert!(subset.iter().all(|x| (1..=150).contains(&x.as_u64().unwrap())));
    assert!(v["stages"].as_array().unwrap().len() >= 2);
    assert_eq!(v["config"]["seed"], 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(rgspec(&["gen", "--n", "4", "--out", "x.txt"], d).status.code(), Some(2));
    assert_eq!(rgspec(&["xn", "--n", "100"], d).status.code(), Some(2));
    assert_eq!(rgspec(&["gen", "--n", "4", "--p", "1.5", "--seed", "1", "--out", "x"], d).status.code(), Some(2));
    assert_eq!(rgspec(&["probe", "--phi", "0", "--bogus"], d).status.code(), Some(2));
    assert_eq!(rgspec(&["spectrum", "--in", "missing.txt"], d).status.code(), Some(1));
    fs::write(d.join("bad.txt"), "3 1\r\n1 2\r\n").unwrap();
    let o = rgspec(&["spectrum", "--in", "bad.txt"], d);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    // A graph too small for the pipeline.
    assert_eq!(rgspec(&["construct", "--n", "20", "--seed", "1"], d).status.code(), Some(2));
    let o = rgspec(&["--help"], d);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["gen", "spectrum", "construct", "xn", "mu", "probe"] {
        assert!(stdout(&o).contains(sub));
    }
}

#[test]
fn help_lists_campaign_flags() {
    let dir = tempfile::tempdir().unwrap();
    let xn = stdout(&rgspec(&["xn", "--help"], dir.path()));
    for flag in ["--n", "--p", "--seed", "--trials", "--out", "--config", "--threads", "--strict", "--fallback-iters"] {
        assert!(xn.contains(flag), "{flag}");
    }
    let mu = stdout(&rgspec(&["mu", "--help"], dir.path()));
    for flag in ["--k", "--slack", "--eps", "--in"] {
        assert!(mu.contains(flag), "{flag}");
    }
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("cfg.json"),
        r#"{"schema":"rgspec-config/1","base_seed":4,"n_values":[64,80],"trials_per_n":3}"#,
    )
    .unwrap();
    let o = rgspec(&["xn", "--config", "cfg.json", "--trials", "2", "--out", "x.csv"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.join("x.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("x.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["trials_per_n"], 2);
    assert_eq!(summary["config"]["base_seed"], 4);
    // The echoed config is itself a valid config with the same content.
    let echoed = summary["config"].to_string();
    fs::write(d.join("echo.json"), &echoed).unwrap();
    let o = rgspec(&["xn", "--config", "echo.json", "--out", "y.csv"], d);
    assert!(o.status.success());
    assert_eq!(csv, fs::read_to_string(d.join("y.csv")).unwrap());

    fs::write(d.join("bad.json"), r#"{"schema":"rgspec-config/1","base_seed":1,"extra":0}"#).unwrap();
    assert_eq!(rgspec(&["xn", "--config", "bad.json"], d).status.code(), Some(2));
}

#[test]
fn mu_on_a_stored_graph() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    rgspec(&["gen", "--n", "10", "--seed", "3", "--out", "g.txt"], d);
    let o = rgspec(&["mu", "--in", "g.txt", "--seed", "1", "--k", "1,5,9"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    for (line, k) in lines.iter().zip(["1", "5", "9"]) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 5);
        assert_eq!(f[0], k);
        assert_eq!(f[4], "exact");
    }
    assert_eq!(lines[0].split(',').nth(1), Some("1"));
}
