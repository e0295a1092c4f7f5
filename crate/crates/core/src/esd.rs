//! Concurrence trajectories, sudden-death detection and parameter sweeps.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::concurrence::{concurrence_general, extract_qubit_block, x_branches, x_pattern_violation, X_PATTERN_TOL};
use crate::error::{Error, Result};
use crate::evolution::{evolve_expm, propagate};
use crate::liouvillian::{liouvillian_for, Superoperator};
use crate::model::{make_initial_density, DensityMatrix, SimulationConfig, C64};

/// General and X-state concurrence must agree this closely on X-family runs.
pub const PATH_AGREEMENT_TOL: f64 = 1e-9;
/// Largest concurrence change allowed between consecutive samples.
pub const MAX_SAMPLE_JUMP: f64 = 0.05;
/// Bisection stops once the bracket is this narrow (units of `1/kappa`).
pub const CROSSING_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcurrenceSample {
    pub t: f64,
    /// Concurrence. For X-family runs this is `max(0, c1, c2)`.
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    /// Qubit-block populations `r11, r22, r33, r44`.
    pub populations: [f64; 4],
    pub rho14: C64,
    pub rho23: C64,
    /// Trace of the full density matrix.
    pub trace: f64,
    /// Smallest eigenvalue of the full density matrix.
    pub min_eig: f64,
    pub leaked_weight: f64,
}

/// Evaluates both concurrence routes on one state. With `x_family` set the
/// block must have the X pattern and the routes must agree.
pub fn sample_state(t: f64, rho: &DensityMatrix, x_family: bool) -> Result<ConcurrenceSample> {
    let block = extract_qubit_block(rho);
    let m = &block.matrix;
    let general = concurrence_general(m)?.value;
    let (c1, c2) = x_branches(m);
    let c = if x_family {
        let magnitude = x_pattern_violation(m);
        if magnitude > X_PATTERN_TOL {
            return Err(Error::NotXState { magnitude });
        }
        let xstate = c1.max(c2).max(0.0);
        if (xstate - general).abs() > PATH_AGREEMENT_TOL {
            return Err(Error::ConcurrenceMismatch { time: t, general, xstate });
        }
        xstate
    } else {
        general
    };
    Ok(ConcurrenceSample {
        t,
        c,
        c1,
        c2,
        populations: [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re],
        rho14: m[(0, 3)],
        rho23: m[(1, 2)],
        trace: rho.trace().re,
        min_eig: rho.min_eigenvalue(),
        leaked_weight: block.leaked_weight,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcurrenceTrajectory {
    pub config: SimulationConfig,
    pub samples: Vec<ConcurrenceSample>,
}

impl ConcurrenceTrajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.c)
    }
}

/// Generator and initial state of a config, for re-evaluation at arbitrary times.
struct Engine {
    generator: Superoperator,
    rho0: DensityMatrix,
    x_family: bool,
}

impl Engine {
    fn new(config: &SimulationConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            generator: liouvillian_for(&config.params, config.n_max)?,
            rho0: make_initial_density(&config.initial, config.n_max)?,
            x_family: config.initial.is_x_family(),
        })
    }

    fn concurrence_at(&self, t: f64) -> Result<f64> {
        let rho = evolve_expm(&self.generator, &self.rho0, t)?;
        Ok(sample_state(t, &rho, self.x_family)?.c)
    }
}

/// Exact propagation onto the config's sample grid with both concurrence
/// routes evaluated at every sample.
pub fn concurrence_trajectory(config: &SimulationConfig) -> Result<ConcurrenceTrajectory> {
    let engine = Engine::new(config)?;
    let traj = propagate(&engine.generator, &engine.rho0, &config.sample_times())?;
    let samples = traj
        .iter()
        .map(|(t, rho)| sample_state(t, rho, engine.x_family))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConcurrenceTrajectory { config: *config, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminalState {
    Dead,
    AliveAtHorizon,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsdReport {
    pub death_times: Vec<f64>,
    pub revival_times: Vec<f64>,
    pub terminal_state: TerminalState,
    pub epsilon: f64,
    pub t_max: f64,
}

impl EsdReport {
    pub fn first_death(&self) -> Option<f64> {
        self.death_times.first().copied()
    }
}

/// Bisects `c(t) > eps` between an alive and a dead end of `[lo, hi]`.
fn refine_crossing(engine: &Engine, eps: f64, mut lo: f64, mut hi: f64, dying: bool) -> Result<f64> {
    // Invariant: alive(lo) == dying.
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        let alive = engine.concurrence_at(mid)? > eps;
        if alive == dying {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Zero intervals of `C(t)`, counting `C <= epsilon` as zero. Crossings are
/// refined by bisection on freshly propagated states, not interpolated.
pub fn detect_esd(traj: &ConcurrenceTrajectory, epsilon: f64) -> Result<EsdReport> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon}")));
    }
    let samples = &traj.samples;
    let t_max = traj.config.t_max;
    let Some(first) = samples.first() else {
        return Err(Error::InvalidGrid("empty trajectory".into()));
    };
    let max_jump = samples.windows(2).map(|w| (w[1].c - w[0].c).abs()).fold(0.0, f64::max);
    if max_jump > MAX_SAMPLE_JUMP {
        return Err(Error::UnderResolved { max_jump, limit: MAX_SAMPLE_JUMP });
    }

    let engine = Engine::new(&traj.config)?;
    let mut death_times = Vec::new();
    let mut revival_times = Vec::new();
    let mut alive = first.c > epsilon;
    if !alive {
        death_times.push(first.t);
    }
    for w in samples.windows(2) {
        let next_alive = w[1].c > epsilon;
        if next_alive != alive {
            let t = refine_crossing(&engine, epsilon, w[0].t, w[1].t, alive)?;
            if alive {
                death_times.push(t);
            } else {
                revival_times.push(t);
            }
            alive = next_alive;
        }
    }
    Ok(EsdReport {
        death_times,
        revival_times,
        terminal_state: if alive { TerminalState::AliveAtHorizon } else { TerminalState::Dead },
        epsilon,
        t_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Alpha,
    R,
    Theta,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(SweepAxis::Alpha),
            "r" => Ok(SweepAxis::R),
            "theta" => Ok(SweepAxis::Theta),
            other => Err(Error::InvalidParameter(format!("unknown sweep axis '{other}'"))),
        }
    }
}

/// `base` with one parameter replaced. `r` and `theta` are set on both cavities.
pub fn config_with(base: &SimulationConfig, axis: SweepAxis, value: f64) -> Result<SimulationConfig> {
    let mut config = *base;
    match axis {
        SweepAxis::Alpha => config.initial = base.initial.with_alpha(value)?,
        SweepAxis::R => {
            config.params.a.r = value;
            config.params.b.r = value;
        }
        SweepAxis::Theta => {
            config.params.a.theta = value;
            config.params.b.theta = value;
        }
    }
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub report: EsdReport,
    pub trajectory: Arc<ConcurrenceTrajectory>,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<SweepOutcome>,
}

fn run_row(base: &SimulationConfig, axis: SweepAxis, value: f64) -> Result<SweepOutcome> {
    let config = config_with(base, axis, value)?;
    let trajectory = concurrence_trajectory(&config)?;
    let report = detect_esd(&trajectory, config.esd_epsilon)?;
    Ok(SweepOutcome { report, trajectory: Arc::new(trajectory) })
}

/// One independent run per value, executed in parallel; rows come back in
/// input order and carry their own errors.
pub fn sweep(base: &SimulationConfig, axis: SweepAxis, values: &[f64]) -> Vec<SweepRow> {
    values
        .par_iter()
        .map(|&value| {
            let outcome = if value.is_finite() {
                run_row(base, axis, value)
            } else {
                Err(Error::InvalidParameter(format!("{axis:?} = {value}")))
            };
            SweepRow { value, outcome }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::vacuum_noon_concurrence;
    use crate::model::{InitialState, ReservoirParams};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn config(initial: InitialState, r: f64) -> SimulationConfig {
        let mut c = SimulationConfig::new(ReservoirParams::identical(1.0, r, 0.0), initial);
        c.dt = 0.01;
        c
    }

    #[test]
    fn vacuum_noon_follows_exponential() {
        let traj = concurrence_trajectory(&config(InitialState::Noon { alpha: FRAC_1_SQRT_2 }, 0.0)).unwrap();
        for s in &traj.samples {
            let exact = vacuum_noon_concurrence(FRAC_1_SQRT_2, 1.0, s.t).unwrap();
            assert!((s.c - exact).abs() < 1e-8, "t={} c={} exact={exact}", s.t, s.c);
        }
        let report = detect_esd(&traj, 1e-6).unwrap();
        assert!(report.death_times.is_empty());
        assert_eq!(report.terminal_state, TerminalState::AliveAtHorizon);
    }

    #[test]
    fn separable_state_stays_separable() {
        for r in [0.0, 0.3, 0.8] {
            let traj = concurrence_trajectory(&config(InitialState::Noon { alpha: 1.0 }, r)).unwrap();
            assert!(traj.values().all(|c| c == 0.0));
            let report = detect_esd(&traj, 1e-6).unwrap();
            assert_eq!(report.death_times, vec![0.0]);
            assert!(report.revival_times.is_empty());
            assert_eq!(report.terminal_state, TerminalState::Dead);
        }
    }

    #[test]
    fn squeezed_noon_dies_once() {
        let traj = concurrence_trajectory(&config(InitialState::Noon { alpha: FRAC_1_SQRT_2 }, 0.2)).unwrap();
        assert!((traj.samples[0].c - 1.0).abs() < 1e-12);
        let report = detect_esd(&traj, 1e-6).unwrap();
        assert_eq!(report.death_times.len(), 1);
        assert!(report.revival_times.is_empty());
        assert_eq!(report.terminal_state, TerminalState::Dead);
        let t = report.death_times[0];
        assert!(t > 0.0 && t < 10.0);
    }

    #[test]
    fn sample_invariants() {
        let traj = concurrence_trajectory(&config(InitialState::Epr { alpha: 0.4 }, 0.3)).unwrap();
        for s in &traj.samples {
            assert_eq!(s.c, s.c1.max(s.c2).max(0.0));
            assert!((0.0..=1.0).contains(&s.c));
        }
    }

    #[test]
    fn under_resolved_trajectory_rejected() {
        let mut cfg = config(InitialState::Noon { alpha: FRAC_1_SQRT_2 }, 0.2);
        cfg.dt = 0.5;
        let traj = concurrence_trajectory(&cfg).unwrap();
        assert!(matches!(detect_esd(&traj, 1e-6), Err(Error::UnderResolved { .. })));
    }

    #[test]
    fn sweep_keeps_order_and_row_errors() {
        let base = config(InitialState::Noon { alpha: FRAC_1_SQRT_2 }, 0.2);
        let rows = sweep(&base, SweepAxis::Alpha, &[0.0, 1.5, 1.0, f64::NAN]);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].value, 0.0);
        assert!(rows[1].outcome.is_err());
        assert!(rows[3].outcome.is_err());
        for row in [&rows[0], &rows[2]] {
            let out = row.outcome.as_ref().unwrap();
            assert!(out.trajectory.values().all(|c| c == 0.0));
        }
        let general = SimulationConfig { initial: InitialState::General { amplitudes: [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)] }, ..base };
        assert!(sweep(&general, SweepAxis::Alpha, &[0.5])[0].outcome.is_err());
    }

    #[test]
    fn axis_parsing() {
        assert_eq!("theta".parse::<SweepAxis>().unwrap(), SweepAxis::Theta);
        assert!("kappa".parse::<SweepAxis>().is_err());
    }
}
