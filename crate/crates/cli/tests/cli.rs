use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn scramble(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scramble"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("spawn scramble")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bad_parallel_size_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = scramble(dir.path(), &["entropy-sweep", "--n", "50", "--realizations", "2"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("40"));
    assert!(!dir.path().join("scrambling_times.csv").exists());
}

#[test]
fn oversized_oracle_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = scramble(dir.path(), &["oracle-check", "--max-n", "13"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"realisations": 3}"#).unwrap();
    let o = scramble(dir.path(), &["plateau", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn injected_sign_bug_fails_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let ok = scramble(dir.path(), &["oracle-check", "--max-n", "4", "--cases", "10"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = scramble(dir.path(), &["oracle-check", "--max-n", "4", "--cases", "10", "--inject-sign-bug"]);
    assert_eq!(code(&bad), 4);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
    let report = json(&dir.path().join("oracle_check.json"));
    assert!(report["outcomes"].as_array().unwrap().iter().any(|o| o["failures"].as_u64() > Some(0)));
}

#[test]
fn plateau_prints_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let o = scramble(dir.path(), &["plateau", "--v-gates", "C3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "plateau 0.500000000000");
    let p = json(&dir.path().join("plateau.json"));
    assert_eq!(p["region"], 3);
    let manifest = json(&dir.path().join("manifest-plateau.json"));
    assert_eq!(manifest["subcommand"], "plateau");
    assert_eq!(manifest["outputs"][0], "plateau.json");

    let wide = scramble(dir.path(), &["plateau", "--v-gates", "C3(0,1,6)"]);
    assert_eq!(code(&wide), 2);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"version": 1, "n": [40], "realizations": 3, "horizon": 12, "seed": 5}"#).unwrap();
    let o = scramble(dir.path(), &["entropy-sweep", "--config", cfg.to_str().unwrap(), "--seed", "6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = json(&dir.path().join("manifest-entropy-sweep.json"));
    assert_eq!(manifest["master_seed"], 6);
    assert_eq!(manifest["config"]["realizations"], 3);
    assert_eq!(manifest["config"]["epsilon"], 10.0);
    let csv = fs::read_to_string(dir.path().join("entropy_N40.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,mean,stderr,n"));
    assert_eq!(csv.lines().count(), 1 + 13);
}

#[test]
fn manifest_replay_is_byte_identical() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let o = scramble(first.path(), &["otoc", "--n", "40", "--realizations", "6", "--horizon", "15", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let manifest = first.path().join("manifest-otoc.json");
    let again = scramble(second.path(), &["otoc", "--config", manifest.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(code(&again), 0);
    let a = fs::read(first.path().join("otoc_N40.csv")).unwrap();
    let b = fs::read(second.path().join("otoc_N40.csv")).unwrap();
    assert_eq!(a, b);

    // a manifest from another subcommand is refused
    let wrong = scramble(second.path(), &["entropy-sweep", "--config", manifest.to_str().unwrap()]);
    assert_eq!(code(&wrong), 2);
}

fn write_synthetic_sweep(dir: &Path, lambda: f64, sizes: &[(usize, f64)]) {
    let mut times = String::from("N,t_star,epsilon,m,convention,status,std_err,reached,unsaturated,cadence,horizon\n");
    for &(n, t_star) in sizes {
        times += &format!("{n},{t_star},10,1/4,averaged,reached,,,,1,300\n");
        times += &format!("{n},{t_star},10,1/4,per_realization,reached,0.1,5,0,1,300\n");
        let sat = (n / 4) as f64;
        let mut curve = String::from("t,mean,stderr,n\n");
        for t in 0..=300 {
            let s = sat - sat * (-lambda * t as f64).exp();
            curve += &format!("{t},{s:.12},0,5\n");
        }
        fs::write(dir.join(format!("entropy_N{n}.csv")), curve).unwrap();
    }
    fs::write(dir.join("scrambling_times.csv"), times).unwrap();
}

#[test]
fn fit_recovers_synthetic_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let sizes: Vec<(usize, f64)> = [120, 240, 480].iter().map(|&n| (n, 3.0 * (n as f64).ln() + 2.0)).collect();
    write_synthetic_sweep(dir.path(), 0.04, &sizes);
    let o = scramble(dir.path(), &["fit"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fit = json(&dir.path().join("fit.json"));
    let lambda = fit["saturation"][0]["fit"]["params"]["lambda"].as_f64().unwrap();
    assert!((lambda - 0.04).abs() < 1e-6, "{lambda}");
    let log = &fit["log_scaling"]["averaged"];
    assert!((log["params"]["a"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((log["params"]["b"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((log["r_squared"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn two_point_log_fit_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_sweep(dir.path(), 0.05, &[(120, 40.0), (240, 55.0)]);
    let out = tempfile::tempdir().unwrap();
    let o = scramble(out.path(), &["fit", "--input-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let fit = json(&out.path().join("fit.json"));
    assert_eq!(fit["log_scaling"]["per_realization"]["r_squared"].as_f64(), Some(1.0));
}

#[test]
fn missing_sweep_output_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&scramble(dir.path(), &["fit"])), 2);
}

#[test]
fn single_size_skips_log_scaling() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_sweep(dir.path(), 0.05, &[(1000, 80.0)]);
    let o = scramble(dir.path(), &["fit"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fit = json(&dir.path().join("fit.json"));
    assert!(fit["log_scaling"]["averaged"]["skipped"].is_string());
    assert!(fit["saturation"][0]["fit"]["params"]["lambda"].is_f64());
}
