//! Time propagation of `rho(t)` under a constant [`Superoperator`].
//!
//! Two independent propagators: exact exponentiation of the generator and
//! classical fixed-step RK4 on the vectorized state. Neither renormalizes
//! the trace, so trace drift stays visible.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::liouvillian::{unvectorize, vectorize, Superoperator};
use crate::model::{CMatrix, DensityMatrix, SimulationConfig, C64};

/// Largest allowed correction when re-hermitizing an RK snapshot.
pub const HERMITIZATION_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    max_hermitization_correction: f64,
    config: Option<SimulationConfig>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// Largest elementwise correction applied by re-hermitization (RK only).
    pub fn max_hermitization_correction(&self) -> f64 {
        self.max_hermitization_correction
    }

    pub fn config(&self) -> Option<&SimulationConfig> {
        self.config.as_ref()
    }

    pub fn with_config(mut self, config: SimulationConfig) -> Self {
        self.config = Some(config);
        self
    }

    /// Largest elementwise difference against another trajectory on the same grid.
    pub fn max_deviation(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(x, y)| max_abs_diff(x.matrix(), y.matrix()))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn max_abs_diff(x: &CMatrix, y: &CMatrix) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

fn check_dims(generator: &Superoperator, rho0: &DensityMatrix) -> Result<()> {
    let d = generator.hilbert_dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho0.dim() });
    }
    Ok(())
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        None => return Err(Error::InvalidGrid("empty time grid".into())),
        Some(&t0) if t0 != 0.0 => return Err(Error::InvalidGrid(format!("grid starts at {t0}, not 0"))),
        _ => {}
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("non-finite time".into()));
    }
    if let Some(w) = t_grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!("times not increasing: {} then {}", w[0], w[1])));
    }
    Ok(())
}

/// `rho(t) = unvec(exp(t L) vec(rho0))`.
pub fn evolve_expm(generator: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_dims(generator, rho0)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t}")));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let prop = expm(&(generator.matrix() * C64::new(t, 0.0)));
    let v = prop * vectorize(rho0.matrix());
    DensityMatrix::from_matrix(rho0.n_max(), unvectorize(&v, rho0.dim()))
}

/// Exact propagation onto a grid. Consecutive gaps that agree to rounding
/// reuse one step propagator, so uniform grids cost a single exponential.
pub fn propagate(generator: &Superoperator, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<Trajectory> {
    check_dims(generator, rho0)?;
    check_grid(t_grid)?;
    let d = rho0.dim();
    let mut states = Vec::with_capacity(t_grid.len());
    states.push(rho0.clone());

    let mut v = vectorize(rho0.matrix());
    let mut cached: Option<(f64, CMatrix)> = None;
    for w in t_grid.windows(2) {
        let gap = w[1] - w[0];
        let reuse = matches!(&cached, Some((g, _)) if (g - gap).abs() <= 1e-12 * gap.max(1.0));
        if !reuse {
            cached = Some((gap, expm(&(generator.matrix() * C64::new(gap, 0.0)))));
        }
        let (_, step) = cached.as_ref().unwrap();
        v = step * v;
        states.push(DensityMatrix::from_matrix(rho0.n_max(), unvectorize(&v, d))?);
    }
    Ok(Trajectory {
        times: t_grid.to_vec(),
        states,
        max_hermitization_correction: 0.0,
        config: None,
    })
}

/// Classical fourth-order Runge-Kutta with a fixed step. Each grid gap must
/// be an integer multiple of `dt` up to rounding. Snapshots are stored as
/// `(rho + rho^dagger) / 2`.
pub fn integrate_rk(
    generator: &Superoperator,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    dt: f64,
) -> Result<Trajectory> {
    check_dims(generator, rho0)?;
    check_grid(t_grid)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt}")));
    }
    let d = rho0.dim();
    let l = generator.matrix();
    let half = C64::new(0.5, 0.0);

    let mut states = Vec::with_capacity(t_grid.len());
    states.push(rho0.clone());
    let mut max_corr: f64 = 0.0;
    let mut v: DVector<C64> = vectorize(rho0.matrix());
    let mut step_index = 0usize;

    for w in t_grid.windows(2) {
        let gap = w[1] - w[0];
        let ratio = gap / dt;
        let steps = ratio.round().max(1.0);
        if (ratio - steps).abs() > 1e-6 * steps.max(1.0) {
            return Err(Error::InvalidGrid(format!("gap {gap} is not a multiple of dt = {dt}")));
        }
        let steps = steps as usize;
        let h = C64::new(gap / steps as f64, 0.0);
        for k in 0..steps {
            let k1 = l * &v;
            let k2 = l * (&v + &k1 * (h * half));
            let k3 = l * (&v + &k2 * (h * half));
            let k4 = l * (&v + &k3 * h);
            v += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * (h / 6.0);
            step_index += 1;
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::IntegrationDiverged { step: step_index, time: w[0] + (k + 1) as f64 * h.re });
            }
        }
        let raw = DensityMatrix::from_matrix(rho0.n_max(), unvectorize(&v, d))?;
        let (snapshot, corr) = raw.hermitized();
        if corr >= HERMITIZATION_LIMIT {
            return Err(Error::HermiticityDrift { correction: corr, time: w[1] });
        }
        max_corr = max_corr.max(corr);
        states.push(snapshot);
    }
    Ok(Trajectory {
        times: t_grid.to_vec(),
        states,
        max_hermitization_correction: max_corr,
        config: None,
    })
}
