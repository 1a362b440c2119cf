use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use scramble_core::ensembles::{EnsembleSpec, Fraction};
use scramble_core::experiments::{
    extract_scrambling_time, fit_exponential_saturation, fit_log_scaling, per_realization_scrambling_times,
    run_otoc_ensemble, sample_entropy_ensemble, EntropyCurve, Execution, FitWindow, ScramblingTime,
};
use scramble_core::oracle::check::{run_checks, standard_applier, CheckConfig, GateApplier};
use scramble_core::otoc::plateau_value;
use scramble_core::tableau::{GateOp, Tableau};

use crate::config::Settings;
use crate::output::{csv_bytes, fmt_float, Run};
use crate::CliError;

pub struct Context {
    pub subcommand: &'static str,
    pub out_dir: PathBuf,
    pub settings: Settings,
}

impl Context {
    fn run(&self) -> Run<'_> {
        Run::new(self.subcommand, self.out_dir.clone(), &self.settings)
    }
}

pub const SCRAMBLING_TIMES: &str = "scrambling_times.csv";

pub fn entropy_file(n: usize) -> String {
    format!("entropy_N{n}.csv")
}

const TIMES_HEADER: [&str; 11] = [
    "N", "t_star", "epsilon", "m", "convention", "status", "std_err", "reached", "unsaturated", "cadence", "horizon",
];

pub fn entropy_sweep(ctx: &Context) -> Result<(), CliError> {
    let s = &ctx.settings;
    // validate every size before spending time on any of them
    let specs: Vec<EnsembleSpec> = s.sizes()?.iter().map(|&n| s.ensemble(n)).collect::<Result<_, _>>()?;
    let mut run = ctx.run();
    let mut time_rows = Vec::new();
    for spec in &specs {
        let samples = sample_entropy_ensemble(spec, Execution::default())?;
        let curve = samples.curve();
        let rows: Vec<Vec<String>> = curve
            .times
            .iter()
            .zip(curve.mean_entropy.iter().zip(&curve.std_err))
            .map(|(t, (mean, se))| vec![t.to_string(), fmt_float(*mean), fmt_float(*se), curve.n_realizations.to_string()])
            .collect();
        run.write(&entropy_file(spec.n_qubits), &csv_bytes(&["t", "mean", "stderr", "n"], &rows)?)?;

        let eps = spec.epsilon;
        let common = |t_star: String, convention: &str, status: &str, se: String, reached: String, unsat: String| {
            vec![
                spec.n_qubits.to_string(),
                t_star,
                eps.to_string(),
                spec.entropy_fraction.to_string(),
                convention.to_string(),
                status.to_string(),
                se,
                reached,
                unsat,
                spec.entropy_cadence.to_string(),
                spec.max_t.to_string(),
            ]
        };
        let averaged = extract_scrambling_time(&curve, eps)?;
        let (t_star, status) = match averaged {
            ScramblingTime::Reached { t_star } => (t_star.to_string(), "reached"),
            ScramblingTime::Unsaturated { .. } => (String::new(), "unsaturated"),
        };
        time_rows.push(common(t_star, "averaged", status, String::new(), String::new(), String::new()));

        let per = per_realization_scrambling_times(&samples, eps)?;
        let status = match (per.reached, per.unsaturated) {
            (_, 0) => "reached",
            (0, _) => "unsaturated",
            _ => "partial",
        };
        time_rows.push(common(
            per.mean.map(fmt_float).unwrap_or_default(),
            "per_realization",
            status,
            fmt_float(per.std_err),
            per.reached.to_string(),
            per.unsaturated.to_string(),
        ));
        eprintln!(
            "N={}: averaged t* = {}, per-realization t* = {} ({} unsaturated)",
            spec.n_qubits,
            averaged.t_star().map_or("unsaturated".into(), |t| t.to_string()),
            per.mean.map_or("n/a".into(), |t| format!("{t:.2}")),
            per.unsaturated
        );
    }
    run.write(SCRAMBLING_TIMES, &csv_bytes(&TIMES_HEADER, &time_rows)?)?;
    run.finish(json!({ "ensembles": specs }))?;
    Ok(())
}

fn read_csv(path: &Path) -> Result<Vec<BTreeMap<String, String>>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    reader
        .records()
        .map(|r| {
            let r = r?;
            Ok(headers.iter().zip(r.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        })
        .collect()
}

fn parse_cell<T: std::str::FromStr>(row: &BTreeMap<String, String>, key: &str, file: &str) -> Result<T, CliError> {
    row.get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError::Config(format!("{file}: missing or malformed column {key:?}")))
}

fn fit_json(result: scramble_core::Result<scramble_core::experiments::FitResult>, errors: &mut Vec<String>, what: String) -> Value {
    match result {
        Ok(fit) => serde_json::to_value(fit).expect("fit serializes"),
        Err(e) => {
            errors.push(format!("{what}: {e}"));
            json!({ "error": e.to_string() })
        }
    }
}

pub fn fit(ctx: &Context, input_dir: Option<PathBuf>) -> Result<(), CliError> {
    let s = &ctx.settings;
    let input = input_dir.unwrap_or_else(|| ctx.out_dir.clone());
    let window = FitWindow {
        start: s.fit_start.unwrap_or(50),
        end: s.fit_end,
        ..FitWindow::default()
    };
    let rows = read_csv(&input.join(SCRAMBLING_TIMES))?;
    let mut errors = Vec::new();
    let mut saturation = Vec::new();
    let mut points: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut seen = Vec::new();
    for row in &rows {
        let n: usize = parse_cell(row, "N", SCRAMBLING_TIMES)?;
        let convention = row.get("convention").cloned().unwrap_or_default();
        if let Ok(t) = row["t_star"].parse::<f64>() {
            points.entry(convention).or_default().push((n as f64, t));
        }
        if seen.contains(&n) {
            continue;
        }
        seen.push(n);
        let m: Fraction = parse_cell(row, "m", SCRAMBLING_TIMES)?;
        let file = entropy_file(n);
        let entropy = read_csv(&input.join(&file))?;
        let times = entropy.iter().map(|r| parse_cell(r, "t", &file)).collect::<Result<Vec<usize>, _>>()?;
        let means = entropy.iter().map(|r| parse_cell(r, "mean", &file)).collect::<Result<Vec<f64>, _>>()?;
        let curve = EntropyCurve::from_means(n, m.floor_times(n) as f64, times, means);
        let result = fit_exponential_saturation(&curve, &window);
        if let Ok(f) = &result {
            println!(
                "N={n} m={m}: lambda={:.5} alpha={:.5} R2={:.5} window=[{}, {}]",
                f.param("lambda"),
                f.param("alpha"),
                f.r_squared,
                f.window.0,
                f.window.1
            );
        }
        saturation.push(json!({ "n": n, "m": m, "fit": fit_json(result, &mut errors, format!("N={n}")) }));
    }
    let mut log_scaling = serde_json::Map::new();
    for convention in ["averaged", "per_realization"] {
        let pts = points.get(convention).cloned().unwrap_or_default();
        if seen.len() < 2 {
            // a single-size sweep is a valid input for the saturation fits alone
            log_scaling.insert(convention.into(), json!({ "skipped": "needs at least two system sizes" }));
            continue;
        }
        let result = fit_log_scaling(&pts);
        if let Ok(f) = &result {
            println!("t* = a ln N + b ({convention}): a={:.4} b={:.4} R2={:.5}", f.param("a"), f.param("b"), f.r_squared);
        }
        log_scaling.insert(convention.into(), fit_json(result, &mut errors, convention.into()));
    }
    let mut run = ctx.run();
    run.write_json(
        "fit.json",
        &json!({ "window": window, "saturation": saturation, "log_scaling": log_scaling }),
    )?;
    run.finish(json!({ "input_dir": input }))?;
    if errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(errors.join("; ")))
    }
}

fn v_support(v: &[GateOp]) -> usize {
    v.iter().flat_map(GateOp::qubits).max().map_or(1, |q| q + 1)
}

pub fn otoc(ctx: &Context) -> Result<(), CliError> {
    let s = &ctx.settings;
    let v = s.v_gates()?;
    let specs: Vec<EnsembleSpec> = s.sizes()?.iter().map(|&n| s.ensemble(n)).collect::<Result<_, _>>()?;
    let cadence = s.cadence.unwrap_or(1).max(1);
    let mut run = ctx.run();
    let mut plateau = None;
    for spec in &specs {
        let w0 = s.w0(spec.n_qubits)?;
        let times: Vec<usize> = (0..=spec.max_t).step_by(cadence).collect();
        let trace = run_otoc_ensemble(spec, &v, &w0, &times, Execution::default())?;
        let rows = (0..times.len())
            .map(|i| {
                Ok(vec![
                    times[i].to_string(),
                    fmt_float(trace.mean_f[i]),
                    fmt_float(trace.fraction_off_plateau[i]),
                    serde_json::to_string(&trace.k_histogram[i]).map_err(|e| CliError::Runtime(e.to_string()))?,
                ])
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        run.write(
            &format!("otoc_N{}.csv", spec.n_qubits),
            &csv_bytes(&["t", "mean_f", "fraction_off_plateau", "k_histogram"], &rows)?,
        )?;
        eprintln!(
            "N={}: final mean F = {:.4}, off plateau = {:.4}",
            spec.n_qubits,
            trace.mean_f.last().copied().unwrap_or(f64::NAN),
            trace.fraction_off_plateau.last().copied().unwrap_or(f64::NAN)
        );
        plateau = Some(trace.plateau);
    }
    if let Some(p) = plateau {
        println!("plateau {}", fmt_float(p));
    }
    let v_text: Vec<String> = v.iter().map(ToString::to_string).collect();
    run.finish(json!({ "v_gates": v_text, "plateau": plateau, "cadence": cadence, "ensembles": specs }))?;
    Ok(())
}

pub fn plateau(ctx: &Context) -> Result<(), CliError> {
    let s = &ctx.settings;
    let v = s.v_gates()?;
    let region = s.region.unwrap_or_else(|| v_support(&v));
    let value = plateau_value(&v, region)?;
    println!("plateau {value:.12}");
    let v_text: Vec<String> = v.iter().map(ToString::to_string).collect();
    let mut run = ctx.run();
    run.write_json("plateau.json", &json!({ "v_gates": v_text, "region": region, "plateau": value }))?;
    run.finish(Value::Null)?;
    Ok(())
}

/// Test fixture: the T update with the sign of generator 0 flipped.
fn broken_t_sign(t: &mut Tableau, g: &GateOp) -> scramble_core::Result<()> {
    t.apply_gate(g)?;
    if let GateOp::T(_) = g {
        t.set_sign(0, !t.sign(0));
    }
    Ok(())
}

pub fn oracle_check(ctx: &Context, inject_sign_bug: bool) -> Result<(), CliError> {
    let s = &ctx.settings;
    let config = CheckConfig {
        max_n: s.max_n.unwrap_or(8),
        cases: s.cases.unwrap_or(50),
        circuit_len: s.circuit_len.unwrap_or(40),
        seed: s.seed.unwrap_or(0),
        tolerance: 1e-10,
    };
    let applier: GateApplier = if inject_sign_bug { broken_t_sign } else { standard_applier };
    let report = run_checks(&config, applier)?;
    for outcome in &report.outcomes {
        println!("{outcome}");
    }
    let mut run = ctx.run();
    run.write_json("oracle_check.json", &report)?;
    run.finish(json!({ "inject_sign_bug": inject_sign_bug }))?;
    if report.passed() {
        Ok(())
    } else {
        let failed = report.outcomes.iter().filter(|o| !o.passed()).count();
        Err(CliError::CheckFailed(format!("{failed} of {} checks failed", report.outcomes.len())))
    }
}
