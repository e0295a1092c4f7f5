use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sqzent_core::analytic::consistency_report;
use sqzent_core::esd::{concurrence_trajectory, detect_esd, sweep, EsdReport, SweepAxis, SweepRow, TerminalState};
use sqzent_core::model::{InitialState, SimulationConfig};

use crate::config::SimFlags;
use crate::error::{runtime, usage, CliError};
use crate::output::{fmt12, trajectory_csv, OutputDir};
use crate::svg::{LinePlot, Series};

/// Alpha values drawn in figures 2a/2b.
pub const FIGURE2_ALPHAS: [f64; 4] = [0.3, 0.5, FRAC_1_SQRT_2, 0.9];
pub const FIGURE2_R: f64 = 0.2;
/// Squeeze parameters drawn in figures 3a/3b at alpha = 1/sqrt(2).
pub const FIGURE3_RS: [f64; 4] = [0.1, 0.2, 0.4, 0.8];

const DEFAULT_OUT: &str = "sqzent-out";

#[derive(Debug, Parser)]
#[command(name = "sqzent", version, about = "Two-cavity entanglement dynamics in squeezed vacuum reservoirs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrence and density-matrix elements over time, as CSV.
    Simulate(SimulateArgs),
    /// Regenerate one of the standard figures (CSV per curve plus SVG).
    Figure(FigureArgs),
    /// Sudden-death and revival times as JSON.
    EsdTime(EsdArgs),
    /// One run per parameter value, with a summary table.
    Sweep(SweepArgs),
    /// Audit the closed-form NOON solution against the numerical engine.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long, default_value = DEFAULT_OUT)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    #[value(name = "2a")]
    Fig2a,
    #[value(name = "2b")]
    Fig2b,
    #[value(name = "3a")]
    Fig3a,
    #[value(name = "3b")]
    Fig3b,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "2a",
            FigureId::Fig2b => "2b",
            FigureId::Fig3a => "3a",
            FigureId::Fig3b => "3b",
        }
    }

    fn is_noon(self) -> bool {
        matches!(self, FigureId::Fig2a | FigureId::Fig3a)
    }

    fn axis(self) -> SweepAxis {
        match self {
            FigureId::Fig2a | FigureId::Fig2b => SweepAxis::Alpha,
            FigureId::Fig3a | FigureId::Fig3b => SweepAxis::R,
        }
    }

    fn values(self) -> &'static [f64] {
        match self.axis() {
            SweepAxis::Alpha => &FIGURE2_ALPHAS,
            _ => &FIGURE3_RS,
        }
    }

    /// `base` with the figure's initial state and squeezing.
    fn base_config(self, mut base: SimulationConfig) -> SimulationConfig {
        let alpha = FRAC_1_SQRT_2;
        base.initial = if self.is_noon() { InitialState::Noon { alpha } } else { InitialState::Epr { alpha } };
        base.params.a.r = FIGURE2_R;
        base.params.b.r = FIGURE2_R;
        base
    }
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    pub id: FigureId,
    /// Only rate, phase, cutoff and timing flags apply; the figure fixes
    /// the initial state, alpha and r.
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long, default_value = DEFAULT_OUT)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EsdArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    /// Also write the report (and a manifest) into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    Alpha,
    R,
    Theta,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Alpha => SweepAxis::Alpha,
            AxisArg::R => SweepAxis::R,
            AxisArg::Theta => SweepAxis::Theta,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub values: Vec<f64>,
    #[arg(long, default_value = DEFAULT_OUT)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    /// Spacing of the audit grid.
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one command; the returned text goes to standard output.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Figure(args) => cmd_figure(&args),
        Command::EsdTime(args) => cmd_esd_time(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Validate(args) => cmd_validate(&args),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let config = args.sim.resolve()?;
    let start = Instant::now();
    let traj = concurrence_trajectory(&config).map_err(runtime)?;
    let mut dir = OutputDir::create(&args.out)?;
    let csv = dir.write("trajectory.csv", &trajectory_csv(&traj))?;
    let manifest = dir.finish("simulate", &config, start.elapsed(), Vec::new())?;
    Ok(format!("wrote {}\nwrote {}\n", csv.display(), manifest.display()))
}

#[derive(Debug, Serialize)]
pub struct EsdOutput<'a> {
    pub death_times: &'a [f64],
    pub revival_times: &'a [f64],
    pub terminal_state: TerminalState,
    pub epsilon: f64,
    pub t_max: f64,
    pub config: &'a SimulationConfig,
}

impl<'a> EsdOutput<'a> {
    fn new(report: &'a EsdReport, config: &'a SimulationConfig) -> Self {
        Self {
            death_times: &report.death_times,
            revival_times: &report.revival_times,
            terminal_state: report.terminal_state,
            epsilon: report.epsilon,
            t_max: report.t_max,
            config,
        }
    }
}

pub fn cmd_esd_time(args: &EsdArgs) -> Result<String, CliError> {
    let config = args.sim.resolve()?;
    let start = Instant::now();
    let traj = concurrence_trajectory(&config).map_err(runtime)?;
    let report = detect_esd(&traj, config.esd_epsilon).map_err(runtime)?;
    let mut text = serde_json::to_string_pretty(&EsdOutput::new(&report, &config))?;
    text.push('\n');
    if let Some(out) = &args.out {
        let mut dir = OutputDir::create(out)?;
        dir.write("esd_report.json", &text)?;
        dir.finish("esd-time", &config, start.elapsed(), Vec::new())?;
    }
    Ok(text)
}

fn value_tag(axis: SweepAxis, value: f64) -> (String, String) {
    let short = format!("{value:.4}");
    let short = short.trim_end_matches('0').trim_end_matches('.').to_string();
    match axis {
        SweepAxis::Alpha => (format!("α = {short}"), format!("alpha_{short}")),
        SweepAxis::R => (format!("r = {short}"), format!("r_{short}")),
        SweepAxis::Theta => (format!("θ = {short}"), format!("theta_{short}")),
    }
}

#[derive(Debug, Serialize)]
pub struct CurveSummary {
    pub label: String,
    pub file: String,
    pub value: f64,
    pub death_times: Vec<f64>,
    pub revival_times: Vec<f64>,
    pub terminal_state: TerminalState,
}

fn successful_rows(rows: &[SweepRow]) -> Result<(), CliError> {
    for row in rows {
        if let Err(e) = &row.outcome {
            return Err(CliError::Runtime(format!("run at {} failed: {e}", row.value)));
        }
    }
    Ok(())
}

pub fn cmd_figure(args: &FigureArgs) -> Result<String, CliError> {
    let id = args.id;
    let base = id.base_config(args.sim.resolve()?);
    base.validate().map_err(usage)?;
    let start = Instant::now();
    let axis = id.axis();
    let rows = sweep(&base, axis, id.values());
    successful_rows(&rows)?;

    let kappa = base.params.a.kappa;
    let mut dir = OutputDir::create(&args.out)?;
    let mut series = Vec::with_capacity(rows.len());
    let mut summary = Vec::with_capacity(rows.len());
    for row in &rows {
        let outcome = row.outcome.as_ref().expect("checked above");
        let (label, tag) = value_tag(axis, row.value);
        let file = format!("fig{}_{tag}.csv", id.name());
        dir.write(&file, &trajectory_csv(&outcome.trajectory))?;
        series.push(Series {
            label: label.clone(),
            points: outcome.trajectory.samples.iter().map(|s| (kappa * s.t, s.c)).collect(),
        });
        summary.push(CurveSummary {
            label,
            file,
            value: row.value,
            death_times: outcome.report.death_times.clone(),
            revival_times: outcome.report.revival_times.clone(),
            terminal_state: outcome.report.terminal_state,
        });
    }

    let state = if id.is_noon() { "NOON" } else { "EPR" };
    let title = match axis {
        SweepAxis::Alpha => format!("Fig. {}: {state} state, r = {FIGURE2_R}", id.name()),
        _ => format!("Fig. {}: {state} state, α = 1/√2", id.name()),
    };
    let plot = LinePlot { title, x_label: "κt".into(), y_label: "C(t)".into(), series };
    let svg = dir.write(&format!("fig{}.svg", id.name()), &plot.render())?;
    dir.write_json(&format!("fig{}_summary.json", id.name()), &summary)?;

    let mut notes = Vec::new();
    if axis == SweepAxis::Alpha {
        notes.push("alpha values {0.3, 0.5, 1/sqrt(2), 0.9} are a chosen convention".into());
    }
    for s in &summary {
        let death = s.death_times.first().map(|t| fmt12(*t)).unwrap_or_else(|| "none".into());
        notes.push(format!("{}: first death time {death}", s.label));
    }
    let manifest = dir.finish(&format!("figure {}", id.name()), &base, start.elapsed(), notes)?;
    Ok(format!("wrote {}\nwrote {}\n", svg.display(), manifest.display()))
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<String, CliError> {
    let base = args.sim.resolve()?;
    let axis: SweepAxis = args.axis.into();
    let start = Instant::now();
    let rows = sweep(&base, axis, &args.values);

    let mut dir = OutputDir::create(&args.out)?;
    let mut table = String::from("value,status,first_death,n_deaths,n_revivals,terminal_state,trajectory,error\n");
    for (k, row) in rows.iter().enumerate() {
        match &row.outcome {
            Ok(out) => {
                let file = format!("sweep_row{k}.csv");
                dir.write(&file, &trajectory_csv(&out.trajectory))?;
                let first = out.report.first_death().map(fmt12).unwrap_or_default();
                let terminal = match out.report.terminal_state {
                    TerminalState::Dead => "dead",
                    TerminalState::AliveAtHorizon => "alive-at-horizon",
                };
                table.push_str(&format!(
                    "{},ok,{first},{},{},{terminal},{file},\n",
                    fmt12(row.value),
                    out.report.death_times.len(),
                    out.report.revival_times.len()
                ));
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                table.push_str(&format!("{},error,,,,,,{msg}\n", fmt12(row.value)));
            }
        }
    }
    let summary = dir.write("sweep.csv", &table)?;
    let manifest = dir.finish(&format!("sweep {axis:?}"), &base, start.elapsed(), Vec::new())?;
    Ok(format!("wrote {}\nwrote {}\n", summary.display(), manifest.display()))
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<String, CliError> {
    let config = args.sim.resolve()?;
    let InitialState::Noon { alpha } = config.initial else {
        return Err(CliError::Usage("validate audits the NOON solution; use --initial noon".into()));
    };
    if !config.params.is_identical() {
        return Err(CliError::Usage("validate requires identical cavities".into()));
    }
    if !(args.step.is_finite() && args.step > 0.0) {
        return Err(CliError::Usage(format!("--step must be > 0, got {}", args.step)));
    }
    let start = Instant::now();
    let steps = (config.t_max / args.step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| k as f64 * args.step).collect();
    let report = consistency_report(alpha, &config.params, &grid).map_err(runtime)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    if let Some(out) = &args.out {
        let mut dir = OutputDir::create(out)?;
        dir.write("validate_report.json", &text)?;
        dir.finish("validate", &config, start.elapsed(), Vec::new())?;
    }
    Ok(text)
}
