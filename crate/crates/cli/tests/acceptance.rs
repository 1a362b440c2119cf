//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs in-process checks against the core library and drives the `scramble`
//! binary for the ensemble reproductions. Takes several minutes on one core.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use scramble_core::ensembles::sample_parallel_step;
use scramble_core::entropy::prefix_entropy;
use scramble_core::oracle::check::{
    conjugation_matches_dense, entropy_matches_dense, otoc_matches_trace, standard_applier, tableau_stabilizes_dense,
};
use scramble_core::otoc::plateau_value;
use scramble_core::{BasisOperatorLabel, GateOp, Tableau};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const SEED: u64 = 1;
const TOL: f64 = 1e-10;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn scramble(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_scramble"))
        .args(args)
        .output()
        .expect("run scramble");
    assert!(
        out.status.success(),
        "scramble {args:?} exited with {}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read_csv(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers.iter().zip(rec.iter()).map(|(h, v)| (h.into(), v.into())).collect()
        })
        .collect()
}

fn column(rows: &[BTreeMap<String, String>], key: &str) -> Vec<f64> {
    rows.iter().map(|r| r[key].parse().unwrap()).collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn oracle_equivalence() -> Verdict {
    let mut outcomes = Vec::new();
    for n in 2..=10 {
        outcomes.push(tableau_stabilizes_dense(n, 200, 60, SEED, TOL, standard_applier));
    }
    for n in 2..=6 {
        outcomes.push(conjugation_matches_dense(n, 200, 40, SEED, TOL));
    }
    let cases: usize = outcomes.iter().map(|o| o.cases).sum();
    match outcomes.iter().find(|o| !o.passed()) {
        None => Ok(format!("{cases} cases over {} checks", outcomes.len())),
        Some(o) => Err(o.to_string()),
    }
}

fn entropy_correctness() -> Verdict {
    let o = entropy_matches_dense(10, 500, 60, SEED, TOL, standard_applier);
    if o.passed() {
        Ok(format!("{} cases, N <= 10, sign flips and basis changes included", o.cases))
    } else {
        Err(o.to_string())
    }
}

fn otoc_correctness() -> Verdict {
    let o = otoc_matches_trace(6, 200, 40, SEED, TOL);
    if o.passed() {
        Ok(format!("{} cases, N <= 6, V in {{1, C3, T3C3, random}}", o.cases))
    } else {
        Err(o.to_string())
    }
}

fn plateau_values() -> Verdict {
    let c3 = plateau_value(&[GateOp::c3(0, 1, 2)], 3).map_err(|e| e.to_string())?;
    let t3c3 = plateau_value(&[GateOp::T(2), GateOp::c3(0, 1, 2)], 3).map_err(|e| e.to_string())?;
    let cli: f64 = scramble(&["plateau", "--v-gates", "T3C3", "--out-dir", tempfile::tempdir().unwrap().path().to_str().unwrap()])
        .trim()
        .trim_start_matches("plateau ")
        .parse()
        .unwrap();
    let target = FRAC_1_SQRT_2 / 2.0;
    let detail = format!("C3 {c3:.12}, T3C3 {t3c3:.12} (cli {cli:.12})");
    if (c3 - 0.5).abs() <= TOL && (t3c3 - target).abs() <= TOL && (cli - target).abs() <= TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lambda_of(dir: &Path) -> f64 {
    let fit = read_json(&dir.join("fit.json"));
    let sat = fit["saturation"].as_array().unwrap();
    sat.last().unwrap()["fit"]["params"]["lambda"].as_f64().expect("saturation fit succeeded")
}

fn fast_scrambling() -> Verdict {
    let sizes = "120,200,280,360,440,520,680,840,1000";
    let seed = SEED.to_string();
    let common = ["--realizations", "100", "--epsilon", "10", "--cadence", "1", "--seed", seed.as_str()];
    let main = tempfile::tempdir().unwrap();
    let mut args = vec!["entropy-sweep", "--n", sizes, "--m", "1/4", "--out-dir", main.path().to_str().unwrap()];
    args.extend(common);
    scramble(&args);
    scramble(&["fit", "--out-dir", main.path().to_str().unwrap()]);
    let fit = read_json(&main.path().join("fit.json"));
    let r2 = fit["log_scaling"]["averaged"]["r_squared"].as_f64().ok_or("log fit failed")?;
    let r2_per = fit["log_scaling"]["per_realization"]["r_squared"].as_f64().unwrap_or(f64::NAN);
    let a = fit["log_scaling"]["averaged"]["params"]["a"].as_f64().unwrap();
    let lambda_quarter = lambda_of(main.path());

    let mut lambdas = vec![("1/4", lambda_quarter)];
    for m in ["1/3", "1/5"] {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec!["entropy-sweep", "--n", "1000", "--m", m, "--out-dir", dir.path().to_str().unwrap()];
        args.extend(common);
        scramble(&args);
        scramble(&["fit", "--out-dir", dir.path().to_str().unwrap()]);
        lambdas.push((m, lambda_of(dir.path())));
    }
    let spread_ok = lambdas
        .iter()
        .all(|(_, x)| lambdas.iter().all(|(_, y)| (x - y).abs() <= 0.15 * x.min(*y)));
    let detail = format!(
        "R2 {r2:.4} (per-realization {r2_per:.4}, a = {a:.2}); lambda at N=1000: {}",
        lambdas.iter().map(|(m, l)| format!("m={m} {l:.4}")).collect::<Vec<_>>().join(", ")
    );
    if r2 >= 0.99 && (0.05..=0.075).contains(&lambda_quarter) && spread_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn otoc_scrambling() -> Verdict {
    let seed = SEED.to_string();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let base = ["otoc", "--v-gates", "C3", "--w0", "zeros", "--realizations", "500", "--seed", seed.as_str(), "--out-dir", d];
    let mut args = base.to_vec();
    args.extend(["--n", "120", "--horizon", "120"]);
    scramble(&args);
    let rows = read_csv(&dir.path().join("otoc_N120.csv"));
    let mean = column(&rows, "mean_f");
    let off = column(&rows, "fraction_off_plateau");
    let worst_late = mean[100..].iter().map(|f| (f - 0.5).abs()).fold(0.0, f64::max);
    let off_120 = off[120];

    let wide = tempfile::tempdir().unwrap();
    let mut args = base.to_vec();
    let w = wide.path().to_str().unwrap();
    *args.last_mut().unwrap() = w;
    args.extend(["--n", "240,360,480", "--horizon", "60"]);
    scramble(&args);
    let mut curves = vec![mean[..=60].to_vec()];
    for n in [240, 360, 480] {
        curves.push(column(&read_csv(&wide.path().join(format!("otoc_N{n}.csv"))), "mean_f"));
    }
    let mut spread: f64 = 0.0;
    for t in 20..=60 {
        for a in &curves {
            for b in &curves {
                spread = spread.max((a[t] - b[t]).abs());
            }
        }
    }
    let detail = format!(
        "max |F - 1/2| for t >= 100: {worst_late:.4}; off-plateau at t=120: {off_120:.4}; \
         N in {{120..480}} spread for 20 <= t <= 60: {spread:.4}"
    );
    if worst_late <= 0.05 && off_120 <= 0.01 && spread <= 0.1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn performance() -> Verdict {
    let n = 3000;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut t = Tableau::new_computational(&BasisOperatorLabel::all_x(n));
    // scramble first so the rank computation sees a dense matrix
    for _ in 0..150 {
        for g in sample_parallel_step(n, &mut rng).unwrap() {
            t.apply_gate(&g).unwrap();
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let start = Instant::now();
        for g in sample_parallel_step(n, &mut rng).unwrap() {
            t.apply_gate(&g).unwrap();
        }
        let s = prefix_entropy(&t, n / 4).unwrap();
        worst = worst.max(start.elapsed().as_secs_f64());
        assert!(s as usize <= n / 4);
    }

    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    scramble(&[
        "entropy-sweep", "--n", "1000", "--realizations", "100", "--horizon", "300", "--seed", "7",
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    let sweep = start.elapsed().as_secs_f64();
    let detail = format!("N=3000 step + entropy {worst:.3} s (worst of 3); N=1000 R=100 horizon-300 sweep {sweep:.1} s");
    if worst <= 1.0 && sweep <= 1800.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn determinism() -> Verdict {
    let runs: [(&str, &[&str]); 2] = [
        ("entropy-sweep", &["--n", "120,200", "--realizations", "30", "--seed", "11"]),
        ("otoc", &["--n", "120", "--realizations", "30", "--horizon", "40", "--v-gates", "T3C3", "--seed", "11"]),
    ];
    let mut compared = 0;
    for (sub, flags) in runs {
        let first = tempfile::tempdir().unwrap();
        let second = tempfile::tempdir().unwrap();
        let mut args = vec![sub, "--out-dir", first.path().to_str().unwrap()];
        args.extend(flags);
        scramble(&args);
        let manifest = first.path().join(format!("manifest-{sub}.json"));
        scramble(&[
            sub, "--config", manifest.to_str().unwrap(), "--threads", "1", "--out-dir", second.path().to_str().unwrap(),
        ]);
        let a = csv_files(first.path());
        let b = csv_files(second.path());
        if a.is_empty() || a != b {
            return Err(format!("{sub}: replay from manifest produced different CSV output"));
        }
        compared += a.len();
    }
    Ok(format!("{compared} CSV files byte-identical after replay from manifest"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("entropy correctness", entropy_correctness),
        ("OTOC correctness", otoc_correctness),
        ("plateau values", plateau_values),
        ("fast-scrambling reproduction", fast_scrambling),
        ("OTOC scrambling reproduction", otoc_scrambling),
        ("performance gate", performance),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {id} ({name}): PASS [{secs:.1} s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} ({name}): FAIL [{secs:.1} s] {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
