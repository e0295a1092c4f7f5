use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("amplitudes are not normalized: sum |alpha_i|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("integration diverged at step {step} (t = {time})")]
    IntegrationDiverged { step: usize, time: f64 },

    #[error("hermitization correction {correction:e} exceeds 1e-10 at t = {time}")]
    HermiticityDrift { correction: f64, time: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("numerical degeneracy: eigenvalue {eigenvalue:e} of rho * rho_tilde below -1e-10")]
    NumericalDegeneracy { eigenvalue: f64 },

    #[error("not an X state: off-pattern magnitude {magnitude:e}")]
    NotXState { magnitude: f64 },

    #[error("concurrence paths disagree at t = {time}: general {general}, x-state {xstate}")]
    ConcurrenceMismatch { time: f64, general: f64, xstate: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("trajectory under-resolved: concurrence jumps by {max_jump:e} between samples (limit {limit:e}); reduce dt")]
    UnderResolved { max_jump: f64, limit: f64 },
}
