//! Domain types shared across the crate.
//!
//! Two-mode states live on the truncated Fock space spanned by `|n_A n_B>`
//! with `0 <= n_A, n_B <= n_max`. Basis index is `n_A * (n_max + 1) + n_B`
//! (mode A is the outer index), so for `n_max = 1` the order is
//! `|00>, |01>, |10>, |11>`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

const NORM_TOL: f64 = 1e-12;

/// Squeezed bath surrounding one cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityBath {
    /// Field decay rate.
    pub kappa: f64,
    /// Squeeze parameter.
    pub r: f64,
    /// Squeezing reference phase in radians.
    pub theta: f64,
}

impl CavityBath {
    pub fn new(kappa: f64, r: f64, theta: f64) -> Self {
        Self { kappa, r, theta }
    }

    /// Mean occupation `N = sinh^2 r`.
    pub fn n(&self) -> f64 {
        self.r.sinh().powi(2)
    }

    /// Two-photon correlation `M = cosh r sinh r e^{-i theta}`.
    pub fn m(&self) -> C64 {
        C64::from_polar(self.r.cosh() * self.r.sinh(), -self.theta)
    }

    fn check(&self, label: &str) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::InvalidParameter(format!("kappa_{label} = {}", self.kappa)));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::InvalidParameter(format!("r_{label} = {}", self.r)));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta_{label} = {}", self.theta)));
        }
        Ok(())
    }
}

/// Baths for cavities A and B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirParams {
    pub a: CavityBath,
    pub b: CavityBath,
}

/// `(N_A, M_A, N_B, M_B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathNumbers {
    pub n_a: f64,
    pub m_a: C64,
    pub n_b: f64,
    pub m_b: C64,
}

impl ReservoirParams {
    pub fn new(a: CavityBath, b: CavityBath) -> Self {
        Self { a, b }
    }

    pub fn identical(kappa: f64, r: f64, theta: f64) -> Self {
        let bath = CavityBath::new(kappa, r, theta);
        Self { a: bath, b: bath }
    }

    pub fn is_identical(&self) -> bool {
        self.a == self.b
    }

    pub fn kappa_max(&self) -> f64 {
        self.a.kappa.max(self.b.kappa)
    }

    /// Checks finiteness and signs. A zero decay rate is accepted here
    /// (it switches a cavity off); [`SimulationConfig::validate`] demands
    /// strictly positive rates.
    pub fn check(&self) -> Result<()> {
        self.a.check("a")?;
        self.b.check("b")
    }
}

pub fn derived_bath_numbers(params: &ReservoirParams) -> BathNumbers {
    BathNumbers {
        n_a: params.a.n(),
        m_a: params.a.m(),
        n_b: params.b.n(),
        m_b: params.b.m(),
    }
}

/// Pure two-cavity initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialState {
    /// `alpha |0_A 1_B> + sqrt(1 - alpha^2) |1_A 0_B>`
    Noon { alpha: f64 },
    /// `alpha |0_A 0_B> + sqrt(1 - alpha^2) |1_A 1_B>`
    Epr { alpha: f64 },
    /// Amplitudes on `|00>, |01>, |10>, |11>`.
    General { amplitudes: [C64; 4] },
}

impl InitialState {
    /// Amplitudes on the qubit basis `|00>, |01>, |10>, |11>`.
    pub fn amplitudes(&self) -> Result<[C64; 4]> {
        let zero = C64::new(0.0, 0.0);
        match *self {
            InitialState::Noon { alpha } => {
                let beta = check_alpha(alpha)?;
                Ok([zero, C64::new(alpha, 0.0), C64::new(beta, 0.0), zero])
            }
            InitialState::Epr { alpha } => {
                let beta = check_alpha(alpha)?;
                Ok([C64::new(alpha, 0.0), zero, zero, C64::new(beta, 0.0)])
            }
            InitialState::General { amplitudes } => {
                if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite amplitude".into()));
                }
                let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
                if (norm_sqr - 1.0).abs() > NORM_TOL {
                    return Err(Error::NotNormalized { norm_sqr });
                }
                Ok(amplitudes)
            }
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            InitialState::Noon { alpha } | InitialState::Epr { alpha } => Some(alpha),
            InitialState::General { .. } => None,
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        match self {
            InitialState::Noon { .. } => Ok(InitialState::Noon { alpha }),
            InitialState::Epr { .. } => Ok(InitialState::Epr { alpha }),
            InitialState::General { .. } => Err(Error::Unsupported(
                "alpha is not a parameter of a general initial state".into(),
            )),
        }
    }

    /// Whether the evolved state keeps the X pattern in its qubit block.
    pub fn is_x_family(&self) -> bool {
        !matches!(self, InitialState::General { .. })
    }
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, 1]")));
    }
    Ok((1.0 - alpha * alpha).max(0.0).sqrt())
}

/// Basis index of `|n_a n_b>` for a given cutoff.
#[inline]
pub fn basis_index(n_max: usize, n_a: usize, n_b: usize) -> usize {
    n_a * (n_max + 1) + n_b
}

/// Dense density matrix on the two-mode truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_max: usize,
    data: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix, checking only its shape. Physical invariants are
    /// checked by [`DensityMatrix::check_physical`].
    pub fn from_matrix(n_max: usize, data: CMatrix) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be >= 1".into()));
        }
        let dim = (n_max + 1) * (n_max + 1);
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: data.nrows() });
        }
        Ok(Self { n_max, data })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    /// Element `<n_a n_b| rho |m_a m_b>`.
    pub fn element(&self, (n_a, n_b): (usize, usize), (m_a, m_b): (usize, usize)) -> C64 {
        self.data[(basis_index(self.n_max, n_a, n_b), basis_index(self.n_max, m_a, m_b))]
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    /// Largest elementwise `|rho - rho^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.data)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigen().eigenvalues.min()
    }

    /// `(rho + rho^dagger) / 2` and the largest elementwise correction applied.
    pub fn hermitized(&self) -> (Self, f64) {
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        let correction = (&h - &self.data).iter().map(|z| z.norm()).fold(0.0, f64::max);
        (Self { n_max: self.n_max, data: h }, correction)
    }

    /// Hermitian within 1e-10, unit trace within 1e-9, eigenvalues >= -1e-9.
    pub fn check_physical(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("trace = {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::NotPositive { eigenvalue: min });
        }
        Ok(())
    }
}

pub(crate) fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `|Psi><Psi|` for the given initial state, embedded at cutoff `n_max`.
pub fn make_initial_density(state: &InitialState, n_max: usize) -> Result<DensityMatrix> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let amps = state.amplitudes()?;
    let dim = (n_max + 1) * (n_max + 1);
    let mut psi = DMatrix::<C64>::zeros(dim, 1);
    for (k, amp) in amps.iter().enumerate() {
        psi[(basis_index(n_max, k / 2, k % 2), 0)] = *amp;
    }
    DensityMatrix::from_matrix(n_max, &psi * psi.adjoint())
}

/// Truncated annihilation operators for both modes on the full space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperators {
    pub(crate) n_max: usize,
    pub(crate) a_a: CMatrix,
    pub(crate) a_b: CMatrix,
}

impl ModeOperators {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.a_a.nrows()
    }

    pub fn a_a(&self) -> &CMatrix {
        &self.a_a
    }

    pub fn a_b(&self) -> &CMatrix {
        &self.a_b
    }
}

/// Everything needed to run one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub params: ReservoirParams,
    pub initial: InitialState,
    pub n_max: usize,
    /// Horizon in units of `1/kappa`.
    pub t_max: f64,
    pub dt: f64,
    /// Concurrence values at or below this count as zero.
    pub esd_epsilon: f64,
}

impl SimulationConfig {
    pub const DEFAULT_T_MAX: f64 = 10.0;
    pub const DEFAULT_DT: f64 = 1e-3;
    pub const DEFAULT_EPSILON: f64 = 1e-6;

    /// Qubit truncation, horizon `10/kappa`, step `1e-3/kappa_max`, threshold `1e-6`.
    pub fn new(params: ReservoirParams, initial: InitialState) -> Self {
        let kappa = params.kappa_max();
        let scale = if kappa > 0.0 { 1.0 / kappa } else { 1.0 };
        Self {
            params,
            initial,
            n_max: 1,
            t_max: Self::DEFAULT_T_MAX,
            dt: Self::DEFAULT_DT * scale,
            esd_epsilon: Self::DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.check()?;
        if self.params.a.kappa <= 0.0 || self.params.b.kappa <= 0.0 {
            return Err(Error::InvalidParameter("decay rates must be > 0".into()));
        }
        self.initial.amplitudes()?;
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be >= 1".into()));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidParameter(format!("t_max = {}", self.t_max)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= self.t_max) {
            return Err(Error::InvalidParameter(format!("dt = {}", self.dt)));
        }
        if !(self.esd_epsilon.is_finite() && self.esd_epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {}", self.esd_epsilon)));
        }
        Ok(())
    }

    /// Sample times `0, dt, 2 dt, ...` up to `t_max`, with `t_max` appended
    /// when it is not itself a multiple of `dt`.
    pub fn sample_times(&self) -> Vec<f64> {
        let steps = (self.t_max / self.dt + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * self.dt).collect();
        let last = *times.last().unwrap();
        if self.t_max - last > 1e-9 * self.dt {
            times.push(self.t_max);
        } else if let Some(t) = times.last_mut() {
            *t = t.min(self.t_max);
        }
        times
    }
}
