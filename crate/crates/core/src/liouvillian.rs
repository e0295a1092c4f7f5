//! Generator of the squeezed-vacuum master equation.
//!
//! For each cavity `j` with rate `kappa`, occupation `N` and correlation `M`:
//!
//! ```text
//! d rho/dt = - kappa/2 (N+1) (a^+ a rho - 2 a rho a^+ + rho a^+ a)
//!            - kappa/2  N    (a a^+ rho - 2 a^+ rho a + rho a a^+)
//!            + kappa/2  M    (a a rho - 2 a rho a + rho a a)
//!            + kappa/2  M*   (a^+ a^+ rho - 2 a^+ rho a^+ + rho a^+ a^+)
//! ```
//!
//! summed over `j = A, B`. Ladder operators are hard-truncated at `n_max`
//! and all products (`a a^+` included) are taken between truncated
//! matrices, so the generator stays exactly linear and trace preserving.
//!
//! Vectorization is column stacking: `vec(rho)[i + j D] = rho[i, j]`, which
//! is nalgebra's native storage order. Under this convention
//! `vec(A rho B) = (B^T kron A) vec(rho)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{derived_bath_numbers, CMatrix, DensityMatrix, ModeOperators, ReservoirParams, C64};

/// Single-mode annihilation operator on `n_max + 1` levels.
fn single_mode_annihilation(n_max: usize) -> CMatrix {
    let d = n_max + 1;
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn build_mode_operators(n_max: usize) -> Result<ModeOperators> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let a = single_mode_annihilation(n_max);
    let id = DMatrix::<C64>::identity(n_max + 1, n_max + 1);
    Ok(ModeOperators {
        n_max,
        a_a: a.kronecker(&id),
        a_b: id.kronecker(&a),
    })
}

/// One cavity's coefficients, already multiplied by `kappa / 2`.
#[derive(Debug, Clone, Copy)]
struct Rates {
    emission: f64,
    absorption: f64,
    squeeze: C64,
}

impl Rates {
    fn new(kappa: f64, n: f64, m: C64) -> Self {
        let half = 0.5 * kappa;
        Self {
            emission: half * (n + 1.0),
            absorption: half * n,
            squeeze: m * half,
        }
    }
}

/// Ladder products used by one cavity's dissipator.
struct Ladder {
    a: CMatrix,
    ad: CMatrix,
    ad_a: CMatrix,
    a_ad: CMatrix,
    a_a: CMatrix,
    ad_ad: CMatrix,
}

impl Ladder {
    fn new(a: &CMatrix) -> Self {
        let ad = a.adjoint();
        Self {
            ad_a: &ad * a,
            a_ad: a * &ad,
            a_a: a * a,
            ad_ad: &ad * &ad,
            a: a.clone(),
            ad,
        }
    }
}

/// Dense Liouvillian acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    matrix: CMatrix,
    n_max: usize,
    params: ReservoirParams,
}

impl Superoperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn params(&self) -> &ReservoirParams {
        &self.params
    }

    /// Hilbert-space dimension `D`; the matrix is `D^2 x D^2`.
    pub fn hilbert_dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1)
    }

    /// `L vec(rho)`, reshaped back to a matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        let d = self.hilbert_dim();
        if rho.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho.dim() });
        }
        Ok(unvectorize(&(&self.matrix * vectorize(rho.matrix())), d))
    }
}

pub fn vectorize(m: &CMatrix) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &DVector<C64>, dim: usize) -> CMatrix {
    DMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// `X rho Y` as a superoperator.
fn sandwich(x: &CMatrix, y: &CMatrix) -> CMatrix {
    y.transpose().kronecker(x)
}

/// `c (P rho - 2 X rho Y + rho P)` as a superoperator.
fn group(c: C64, p: &CMatrix, x: &CMatrix, y: &CMatrix, id: &CMatrix) -> CMatrix {
    let left = id.kronecker(p);
    let right = p.transpose().kronecker(id);
    (left + right - sandwich(x, y) * C64::new(2.0, 0.0)) * c
}

fn cavity_superoperator(rates: Rates, l: &Ladder, id: &CMatrix) -> CMatrix {
    let minus = |x: f64| C64::new(-x, 0.0);
    group(minus(rates.emission), &l.ad_a, &l.a, &l.ad, id)
        + group(minus(rates.absorption), &l.a_ad, &l.ad, &l.a, id)
        + group(rates.squeeze, &l.a_a, &l.a, &l.a, id)
        + group(rates.squeeze.conj(), &l.ad_ad, &l.ad, &l.ad, id)
}

fn cavity_rates(params: &ReservoirParams) -> (Rates, Rates) {
    let bn = derived_bath_numbers(params);
    (
        Rates::new(params.a.kappa, bn.n_a, bn.m_a),
        Rates::new(params.b.kappa, bn.n_b, bn.m_b),
    )
}

pub fn build_liouvillian(params: &ReservoirParams, ops: &ModeOperators) -> Result<Superoperator> {
    params.check()?;
    let d = (ops.n_max + 1) * (ops.n_max + 1);
    if ops.a_a.nrows() != d || ops.a_b.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: ops.a_a.nrows() });
    }
    let id = DMatrix::<C64>::identity(d, d);
    let (ra, rb) = cavity_rates(params);
    let matrix = cavity_superoperator(ra, &Ladder::new(&ops.a_a), &id)
        + cavity_superoperator(rb, &Ladder::new(&ops.a_b), &id);
    Ok(Superoperator { matrix, n_max: ops.n_max, params: *params })
}

/// Convenience: operators and generator for a cutoff in one call.
pub fn liouvillian_for(params: &ReservoirParams, n_max: usize) -> Result<Superoperator> {
    build_liouvillian(params, &build_mode_operators(n_max)?)
}

fn matrix_group(c: C64, p: &CMatrix, x: &CMatrix, y: &CMatrix, rho: &CMatrix) -> CMatrix {
    (p * rho - x * rho * y * C64::new(2.0, 0.0) + rho * p) * c
}

fn matrix_cavity(rates: Rates, l: &Ladder, rho: &CMatrix) -> CMatrix {
    let minus = |x: f64| C64::new(-x, 0.0);
    matrix_group(minus(rates.emission), &l.ad_a, &l.a, &l.ad, rho)
        + matrix_group(minus(rates.absorption), &l.a_ad, &l.ad, &l.a, rho)
        + matrix_group(rates.squeeze, &l.a_a, &l.a, &l.a, rho)
        + matrix_group(rates.squeeze.conj(), &l.ad_ad, &l.ad, &l.ad, rho)
}

/// Right-hand side evaluated directly with matrix products, without going
/// through the vectorized generator. Used to cross-check [`Superoperator`].
pub fn apply_rhs(generator: &Superoperator, rho: &DensityMatrix) -> Result<CMatrix> {
    let d = generator.hilbert_dim();
    if rho.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho.dim() });
    }
    let ops = build_mode_operators(generator.n_max)?;
    let (ra, rb) = cavity_rates(&generator.params);
    let m = rho.matrix();
    Ok(matrix_cavity(ra, &Ladder::new(&ops.a_a), m) + matrix_cavity(rb, &Ladder::new(&ops.a_b), m))
}
