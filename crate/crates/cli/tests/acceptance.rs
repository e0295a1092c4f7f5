//! End-to-end acceptance checks. Run with `cargo test -p sqzent-cli --test acceptance`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::Matrix4;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use sqzent_core::analytic::{closed_form_noon_elements, vacuum_noon_concurrence, AnalyticParams};
use sqzent_core::concurrence::{concurrence_general, concurrence_xstate, extract_qubit_block, OFF_X_PATTERN};
use sqzent_core::esd::{concurrence_trajectory, detect_esd, sweep, SweepAxis, TerminalState};
use sqzent_core::evolution::{integrate_rk, propagate};
use sqzent_core::liouvillian::liouvillian_for;
use sqzent_core::model::{make_initial_density, InitialState, ReservoirParams, SimulationConfig, C64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const ALPHAS: [f64; 4] = [0.3, 0.5, FRAC_1_SQRT_2, 0.9];
const RS: [f64; 4] = [0.1, 0.2, 0.4, 0.8];

fn grid(step: f64, t_max: f64) -> Vec<f64> {
    let n = (t_max / step).round() as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

fn families(alpha: f64) -> [InitialState; 2] {
    [InitialState::Noon { alpha }, InitialState::Epr { alpha }]
}

fn config(initial: InitialState, r: f64) -> SimulationConfig {
    SimulationConfig::new(ReservoirParams::identical(1.0, r, 0.0), initial)
}

/// Fig. 2 and Fig. 3 parameter sets, without duplicates.
fn figure_configs() -> Vec<(InitialState, f64)> {
    let mut out = Vec::new();
    for alpha in ALPHAS {
        for s in families(alpha) {
            out.push((s, 0.2));
        }
    }
    for r in RS {
        if r != 0.2 {
            for s in families(FRAC_1_SQRT_2) {
                out.push((s, r));
            }
        }
    }
    out
}

fn physicality() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let cases: Vec<_> = (0..200)
        .map(|k| {
            let alpha: f64 = rng.random();
            let state = if k % 2 == 0 { InitialState::Noon { alpha } } else { InitialState::Epr { alpha } };
            let params = ReservoirParams::identical(1.0, rng.random(), TAU * rng.random::<f64>());
            (state, params, 1 + k % 3)
        })
        .collect();
    let times = grid(0.25, 10.0);
    let worst = cases
        .par_iter()
        .map(|(state, params, n_max)| -> Result<[f64; 3], String> {
            let l = liouvillian_for(params, *n_max).map_err(|e| e.to_string())?;
            let rho0 = make_initial_density(state, *n_max).map_err(|e| e.to_string())?;
            let traj = propagate(&l, &rho0, &times).map_err(|e| e.to_string())?;
            let mut w = [0.0f64, 0.0, 0.0];
            for rho in traj.states() {
                w[0] = w[0].max((rho.trace().re - 1.0).abs());
                w[1] = w[1].max(rho.hermiticity_error());
                w[2] = w[2].max(-rho.min_eigenvalue());
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold([0.0f64; 3], |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]);
    let detail = format!(
        "200 configs x {} snapshots: max |tr-1| {:.2e}, max herm {:.2e}, min eig {:.2e}",
        times.len(),
        worst[0],
        worst[1],
        -worst[2]
    );
    if worst[0] <= 1e-9 && worst[1] <= 1e-10 && worst[2] <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn propagator_cross_validation() -> Outcome {
    let times = grid(0.1, 10.0);
    let worst = figure_configs()
        .par_iter()
        .map(|(state, r)| -> Result<f64, String> {
            let l = liouvillian_for(&ReservoirParams::identical(1.0, *r, 0.0), 1).map_err(|e| e.to_string())?;
            let rho0 = make_initial_density(state, 1).map_err(|e| e.to_string())?;
            let exact = propagate(&l, &rho0, &times).map_err(|e| e.to_string())?;
            let rk = integrate_rk(&l, &rho0, &times, 1e-3).map_err(|e| e.to_string())?;
            Ok(rk.max_deviation(&exact))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);

    // At dt = 1e-3 the RK error sits at roundoff, so the order is measured on a coarser pair.
    let l = liouvillian_for(&ReservoirParams::identical(1.0, 0.2, 0.0), 1).map_err(|e| e.to_string())?;
    let rho0 = make_initial_density(&InitialState::Noon { alpha: FRAC_1_SQRT_2 }, 1).map_err(|e| e.to_string())?;
    let coarse_grid = grid(0.5, 10.0);
    let exact = propagate(&l, &rho0, &coarse_grid).map_err(|e| e.to_string())?;
    let err = |dt: f64| -> Result<f64, String> {
        Ok(integrate_rk(&l, &rho0, &coarse_grid, dt).map_err(|e| e.to_string())?.max_deviation(&exact))
    };
    let (e1, e2) = (err(0.02)?, err(0.01)?);
    let ratio = e1 / e2;
    let detail = format!("max |RK4 - expm| {worst:.2e} over 16 configs; halving ratio {ratio:.2} (dt 0.02 -> 0.01)");
    if worst <= 1e-8 && (8.0..=32.0).contains(&ratio) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_x_state(rng: &mut StdRng) -> Matrix4<C64> {
    let w: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().ln());
    let total: f64 = w.iter().sum();
    let p = w.map(|x| x / total);
    let phase = |rng: &mut StdRng| C64::from_polar(1.0, TAU * rng.random::<f64>());
    let c14 = phase(rng) * (p[0] * p[3]).sqrt() * rng.random::<f64>();
    let c23 = phase(rng) * (p[1] * p[2]).sqrt() * rng.random::<f64>();
    let mut m = Matrix4::<C64>::zeros();
    for k in 0..4 {
        m[(k, k)] = C64::new(p[k], 0.0);
    }
    m[(0, 3)] = c14;
    m[(3, 0)] = c14.conj();
    m[(1, 2)] = c23;
    m[(2, 1)] = c23.conj();
    m
}

fn concurrence_oracles() -> Outcome {
    let mut rng = StdRng::seed_from_u64(77);
    let mut x_err = 0.0f64;
    for _ in 0..1000 {
        let m = random_x_state(&mut rng);
        let g = concurrence_general(&m).map_err(|e| e.to_string())?.value;
        let x = concurrence_xstate(&m).map_err(|e| e.to_string())?.value;
        x_err = x_err.max((g - x).abs());
    }
    let mut pure_err = 0.0f64;
    for _ in 0..1000 {
        let raw: [C64; 4] = std::array::from_fn(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let a = raw.map(|z| z / norm);
        let mut m = Matrix4::<C64>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = a[i] * a[j].conj();
            }
        }
        let expected = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
        let g = concurrence_general(&m).map_err(|e| e.to_string())?.value;
        pure_err = pure_err.max((g - expected).abs());
    }
    let detail = format!("X states: max |general - closed form| {x_err:.2e}; pure states: max error {pure_err:.2e}");
    if x_err <= 1e-10 && pure_err <= 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn vacuum_limit() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [0.2, 0.5, FRAC_1_SQRT_2, 0.95] {
        let cfg = config(InitialState::Noon { alpha }, 0.0);
        let traj = concurrence_trajectory(&cfg).map_err(|e| e.to_string())?;
        for s in &traj.samples {
            let exact = vacuum_noon_concurrence(alpha, 1.0, s.t).map_err(|e| e.to_string())?;
            worst = worst.max((s.c - exact).abs());
        }
        let report = detect_esd(&traj, cfg.esd_epsilon).map_err(|e| e.to_string())?;
        if !report.death_times.is_empty() || report.terminal_state != TerminalState::AliveAtHorizon {
            return Err(format!("alpha {alpha}: unexpected death at {:?}", report.death_times));
        }
    }
    let detail = format!("max |C - 2a sqrt(1-a^2) e^(-kt)| {worst:.2e} over 4 alphas, 10001 samples each; no deaths");
    if worst <= 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn esd_existence() -> Outcome {
    let mut lines = Vec::new();
    for (name, base) in [("noon", InitialState::Noon { alpha: 0.5 }), ("epr", InitialState::Epr { alpha: 0.5 })] {
        let rows = sweep(&config(base, 0.2), SweepAxis::Alpha, &ALPHAS);
        let mut times = Vec::new();
        for row in rows {
            let out = row.outcome.map_err(|e| format!("{name} alpha {}: {e}", row.value))?;
            match out.report.first_death() {
                Some(t) if t > 0.0 && t <= 10.0 => times.push(format!("{t:.3}")),
                other => return Err(format!("{name} alpha {}: first death {other:?}", row.value)),
            }
        }
        lines.push(format!("{name} [{}]", times.join(", ")));
    }
    Ok(format!("death times at r=0.2: {}", lines.join("; ")))
}

fn esd_monotonicity() -> Outcome {
    let mut lines = Vec::new();
    let mut robust = 0.0f64;
    for (name, state) in families(FRAC_1_SQRT_2).into_iter().zip(["noon", "epr"]).map(|(s, n)| (n, s)) {
        let rows = sweep(&config(state, 0.0), SweepAxis::R, &RS);
        let mut times = Vec::new();
        for row in rows {
            let out = row.outcome.map_err(|e| format!("{name} r {}: {e}", row.value))?;
            let coarse = out.report.first_death().ok_or(format!("{name} r {}: no death", row.value))?;
            let fine = detect_esd(&out.trajectory, out.trajectory.config.esd_epsilon / 10.0)
                .map_err(|e| e.to_string())?
                .first_death()
                .ok_or(format!("{name} r {}: no death at eps/10", row.value))?;
            robust = robust.max((coarse - fine).abs());
            times.push(coarse);
        }
        if !times.windows(2).all(|w| w[1] < w[0]) {
            return Err(format!("{name}: death times not decreasing {times:?}"));
        }
        let shown: Vec<_> = times.iter().map(|t| format!("{t:.3}")).collect();
        lines.push(format!("{name} [{}]", shown.join(", ")));
    }
    let detail = format!("{}; max shift under eps/10 {robust:.2e}", lines.join("; "));
    if robust < 1e-2 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn x_form_preservation() -> Outcome {
    let times = grid(0.01, 10.0);
    let mut worst = 0.0f64;
    let mut runs = 0;
    for (state, r) in figure_configs().into_iter().chain([(InitialState::Noon { alpha: 0.3 }, 1.0)]) {
        for theta in [0.0, 1.3] {
            let l = liouvillian_for(&ReservoirParams::identical(1.0, r, theta), 1).map_err(|e| e.to_string())?;
            let traj = propagate(&l, &make_initial_density(&state, 1).map_err(|e| e.to_string())?, &times)
                .map_err(|e| e.to_string())?;
            runs += 1;
            for rho in traj.states() {
                let m = extract_qubit_block(rho).matrix;
                for &ij in &OFF_X_PATTERN {
                    worst = worst.max(m[ij].norm());
                }
            }
        }
    }
    let detail = format!("max off-pattern magnitude {worst:.2e} over {runs} runs x {} samples", times.len());
    if worst < 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sqzent")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("sqzent {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out)
}

fn closed_form_audit() -> Outcome {
    let mut ic = 0.0f64;
    let mut residual = 0.0f64;
    let h = 1e-4;
    for alpha in ALPHAS {
        for r in [0.0, 0.1, 0.2, 0.4, 0.8] {
            for theta in [0.0, 0.9] {
                let params = ReservoirParams::identical(1.0, r, theta);
                let p = AnalyticParams::new(&params).map_err(|e| e.to_string())?;
                let at = |t: f64| closed_form_noon_elements(alpha, &params, t, false).map_err(|e| e.to_string());
                let e0 = at(0.0)?;
                let amp = alpha * (1.0 - alpha * alpha).sqrt();
                ic = ic.max((e0.rho32 - amp).norm()).max(e0.rho14.norm());
                for k in 1..=40 {
                    let t = 0.25 * k as f64;
                    let (lo, mid, hi) = (at(t - h)?, at(t)?, at(t + h)?);
                    let du = (hi.rho32 - lo.rho32) / (2.0 * h);
                    let dv = (hi.rho14 - lo.rho14) / (2.0 * h);
                    let k_ = p.kappa;
                    let ru = du - (-p.a * k_ * mid.rho32 - k_ * p.m.conj() * mid.rho14);
                    let rv = dv - (-p.a * k_ * mid.rho14 - k_ * p.m * mid.rho32);
                    residual = residual.max(ru.norm()).max(rv.norm());
                }
            }
        }
    }
    if ic > 1e-15 || residual > 1e-6 {
        return Err(format!("initial-condition error {ic:.2e}, ODE residual {residual:.2e}"));
    }

    let mut rho22_dev = Vec::new();
    for alpha in [0.3, FRAC_1_SQRT_2] {
        let a = format!("{alpha}");
        let out = run_cli(&["validate", "--initial", "noon", "--alpha", &a, "--r", "0", "--tmax", "2"])?;
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let entry = report["initial_condition"]
            .as_array()
            .and_then(|v| v.iter().find(|e| e["element"] == "rho22"))
            .ok_or("validate report lacks rho22 check")?;
        let dev = entry["deviation"].as_f64().ok_or("missing deviation")?;
        if (dev - 2.0 * alpha * alpha).abs() > 1e-12 || entry["violated"] != true {
            return Err(format!("alpha {alpha}: rho22 deviation {dev}, expected {}", 2.0 * alpha * alpha));
        }
        rho22_dev.push(format!("{dev:.4} (2a^2 = {:.4})", 2.0 * alpha * alpha));
    }
    Ok(format!(
        "coherences: t=0 error {ic:.1e}, FD residual {residual:.2e}; validate rho22(0) deviations {}",
        rho22_dev.join(", ")
    ))
}

fn data_files(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name != "manifest.json" {
            files.insert(name, fs::read(&path).map_err(|e| e.to_string())?);
        }
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 2] = [
        &["simulate", "--initial", "epr", "--alpha", "0.6", "--r", "0.3", "--theta", "0.7", "--cutoff", "2", "--tmax", "3"],
        &["figure", "--id", "2b", "--tmax", "4"],
    ];
    let mut checked = 0;
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let dir = tmp.path().join(format!("run{k}_{rep}"));
            let mut full: Vec<&str> = args.to_vec();
            let dir_s = dir.to_string_lossy().into_owned();
            full.extend(["--out", &dir_s]);
            run_cli(&full)?;
            outputs.push(data_files(&dir)?);
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            return Err(format!("{} outputs differ between runs", args[0]));
        }
        checked += outputs[0].len();
    }
    Ok(format!("simulate and figure: {checked} data files byte-identical across repeated runs"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 physicality", physicality),
        ("2 propagator cross-validation", propagator_cross_validation),
        ("3 concurrence oracle equivalence", concurrence_oracles),
        ("4 vacuum limit", vacuum_limit),
        ("5 sudden-death existence", esd_existence),
        ("6 sudden-death monotonicity", esd_monotonicity),
        ("7 X-form preservation", x_form_preservation),
        ("8 closed-form coherence audit", closed_form_audit),
        ("9 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
