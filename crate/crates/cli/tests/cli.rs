use std::fs;
use std::process::{Command, Output};

fn wzchain(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wzchain"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("WZCHAIN_THREADS", t),
        None => cmd.env_remove("WZCHAIN_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CONFIG: &str = r#"
n = 16
d = 256
r = 64
trials = 100
seed = 5
delta_t = 1.0
delta_ti = 1.0
delta_i = 10.0
"#;

#[test]
fn simulate_is_deterministic_across_threads_and_writes_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = stdout(&wzchain(&["simulate", "--config", cfg], Some("1")));
    let b = stdout(&wzchain(&["simulate", "--config", cfg], Some("8")));
    assert_eq!(a, b);
    assert!(a.starts_with("estimator,n,d,r,k,trials,mse_empirical,mse_stderr,bound,"));

    let out = dir.path().join("o.csv");
    let o = wzchain(
        &["simulate", "--config", cfg, "--out", out.to_str().unwrap(), "--seed", "5", "--trials", "100"],
        None,
    );
    assert_eq!(stdout(&o), "");
    assert_eq!(fs::read_to_string(&out).unwrap(), a);

    let other = stdout(&wzchain(&["simulate", "--config", cfg, "--seed", "6"], None));
    assert_ne!(other, a);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = stdout(&wzchain(
        &["simulate", "--config", cfg, "--strategy", "alg1", "--trials", "20", "--combiner", "plain"],
        None,
    ));
    let rows: Vec<&str> = o.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("pro-alg1,16,256,64,8,20,"));

    let o = stdout(&wzchain(&["chains", "--config", cfg, "--region-mode", "strict-eq17", "--validate"], None));
    // strict region is far more conservative: no chaining at delta_i = 10
    assert!(o.contains("region_mode=strict-eq17"));
    assert_eq!(o.lines().filter(|l| l.contains("->")).count(), 16);
    assert!(o.lines().filter(|l| !l.starts_with('#')).all(|l| l.matches("->").count() == 1));
}

#[test]
fn bounds_json_feeds_back_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let json = stdout(&wzchain(&["bounds", "--config", cfg.to_str().unwrap(), "--format", "json"], None));
    let again = dir.path().join("b.json");
    fs::write(&again, &json).unwrap();
    let json2 = stdout(&wzchain(&["bounds", "--config", again.to_str().unwrap(), "--format", "json"], None));
    assert_eq!(json, json2);
}

#[test]
fn invalid_config_fails_naming_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, format!("{CONFIG}trails = 3\n")).unwrap();
    let o = wzchain(&["simulate", "--config", cfg.to_str().unwrap()], None);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("trails"));

    fs::write(&cfg, CONFIG.replace("r = 64", "r = 1024")).unwrap();
    let o = wzchain(&["bounds", "--config", cfg.to_str().unwrap()], None);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("`r`"));

    fs::write(&cfg, CONFIG).unwrap();
    let o = wzchain(&["simulate", "--config", cfg.to_str().unwrap()], Some("zero"));
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("WZCHAIN_THREADS"));

    let o = wzchain(&["simulate", "--config", cfg.to_str().unwrap(), "--strategy", "greedy"], None);
    assert!(!o.status.success());
}

#[test]
fn region_sweep() {
    let o = stdout(&wzchain(&["region", "--from", "4", "--to", "5", "--step", "0.1"], None));
    let lines: Vec<&str> = o.lines().collect();
    assert_eq!(lines[0], "delta_i,d_value,eq17_lhs,in_region_eq15,in_region_strict_eq17");
    assert_eq!(lines.len(), 12);
    assert!(lines.contains(&"4.4,19.8232642687,2546.09438569,false,false"));
    assert!(lines[6].starts_with("4.5,") && lines[6].ends_with(",true,false"));
}
