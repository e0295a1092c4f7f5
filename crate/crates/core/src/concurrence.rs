//! Wootters concurrence on the two-qubit block `n_A, n_B in {0, 1}`.
//!
//! Two routes are provided. [`concurrence_general`] works for any 4x4
//! state through the spectrum of `rho * rho_tilde`; [`concurrence_xstate`]
//! uses the closed form valid when only the diagonal and anti-diagonal are
//! populated.

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{basis_index, DensityMatrix, C64};

pub type Matrix4c = Matrix4<C64>;

/// Negative eigenvalues of `rho * rho_tilde` down to this value are
/// treated as rounding noise and clamped to zero.
pub const EIGENVALUE_CLAMP: f64 = 1e-10;
/// Input tolerance for hermiticity and positivity on the general path.
pub const INPUT_TOL: f64 = 1e-9;
/// Largest off-pattern magnitude accepted by the X-state path.
pub const X_PATTERN_TOL: f64 = 1e-8;

/// Entries that are zero in an X state: everything except the diagonal
/// and the anti-diagonal.
pub const OFF_X_PATTERN: [(usize, usize); 8] =
    [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitBlock {
    /// Unnormalized block in the order `|00>, |01>, |10>, |11>`.
    pub matrix: Matrix4c,
    /// `1 - trace(block)`: population sitting above one photon in some mode.
    pub leaked_weight: f64,
}

pub fn extract_qubit_block(rho: &DensityMatrix) -> QubitBlock {
    let n_max = rho.n_max();
    let idx = |k: usize| basis_index(n_max, k / 2, k % 2);
    let matrix = Matrix4c::from_fn(|i, j| rho.matrix()[(idx(i), idx(j))]);
    let leaked_weight = rho.trace().re - matrix.trace().re;
    QubitBlock { matrix, leaked_weight }
}

/// `sigma_y (x) sigma_y`, real and symmetric.
fn sigma_yy() -> Matrix4c {
    let c = |x: f64| C64::new(x, 0.0);
    let z = c(0.0);
    Matrix4c::new(
        z, z, z, c(-1.0),
        z, z, c(1.0), z,
        z, c(1.0), z, z,
        c(-1.0), z, z, z,
    )
}

/// `(sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)`.
pub fn spin_flip(rho4: &Matrix4c) -> Matrix4c {
    let s = sigma_yy();
    s * rho4.map(|z| z.conj()) * s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConcurrencePath {
    General,
    Xstate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Eigenvalues of `rho * rho_tilde`, decreasing, after clamping (general path).
    pub lambdas: Option<[f64; 4]>,
    /// X-state branches, reported even when negative (X path).
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub path: ConcurrencePath,
}

fn max_hermitian_deviation(m: &Matrix4c) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sorted_desc(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Square roots of the eigenvalues of `rho * rho_tilde`, decreasing.
///
/// Computed as the singular values of `tau = X^T (sigma_y (x) sigma_y) X`
/// with `rho = X X^dagger`. Since `X^dagger rho_tilde X = tau^dagger tau`,
/// this is the Hermitian form of the same spectrum, and it never takes the
/// square root of a rounding-level eigenvalue.
pub fn wootters_roots(rho4: &Matrix4c) -> Result<[f64; 4]> {
    let herm = (rho4 + rho4.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min < -INPUT_TOL {
        return Err(Error::NotPositive { eigenvalue: min });
    }
    let mut factor = eig.eigenvectors;
    for (j, mut col) in factor.column_iter_mut().enumerate() {
        col *= C64::new(eig.eigenvalues[j].max(0.0).sqrt(), 0.0);
    }
    let tau = factor.transpose() * sigma_yy() * factor;
    let sv = tau.singular_values();
    Ok(sorted_desc([sv[0], sv[1], sv[2], sv[3]]))
}

/// Eigenvalues of the non-Hermitian product `rho * rho_tilde`, real parts,
/// decreasing, not clamped.
pub fn product_eigenvalues(rho4: &Matrix4c) -> Result<[f64; 4]> {
    let product = rho4 * spin_flip(rho4);
    let ev = product
        .schur()
        .eigenvalues()
        .ok_or(Error::NumericalDegeneracy { eigenvalue: f64::NAN })?;
    Ok(sorted_desc([ev[0].re, ev[1].re, ev[2].re, ev[3].re]))
}

/// `C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`.
pub fn concurrence_general(rho4: &Matrix4c) -> Result<ConcurrenceResult> {
    let deviation = max_hermitian_deviation(rho4);
    if deviation > INPUT_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let raw = product_eigenvalues(rho4)?;
    if let Some(&bad) = raw.iter().find(|&&l| l < -EIGENVALUE_CLAMP) {
        return Err(Error::NumericalDegeneracy { eigenvalue: bad });
    }
    let lambdas = raw.map(|l| l.max(0.0));
    let roots = wootters_roots(rho4)?;
    let value = (roots[0] - roots[1] - roots[2] - roots[3]).max(0.0);
    Ok(ConcurrenceResult {
        value,
        lambdas: Some(lambdas),
        c1: None,
        c2: None,
        path: ConcurrencePath::General,
    })
}

/// Largest magnitude outside the X pattern.
pub fn x_pattern_violation(rho4: &Matrix4c) -> f64 {
    OFF_X_PATTERN.iter().map(|&ij| rho4[ij].norm()).fold(0.0, f64::max)
}

/// `(C1, C2)` from the diagonal and anti-diagonal, without the pattern check.
pub fn x_branches(rho4: &Matrix4c) -> (f64, f64) {
    let pair = |i: usize, j: usize| (rho4[(i, j)] * rho4[(j, i)]).norm().sqrt();
    let pops = |i: usize, j: usize| (rho4[(i, i)].re * rho4[(j, j)].re).max(0.0).sqrt();
    let c1 = 2.0 * (pair(1, 2) - pops(0, 3));
    let c2 = 2.0 * (pair(0, 3) - pops(1, 2));
    (c1, c2)
}

/// `C = max(0, C1, C2)` with
/// `C1 = 2 (sqrt(r23 r32) - sqrt(r11 r44))`, `C2 = 2 (sqrt(r14 r41) - sqrt(r22 r33))`.
pub fn concurrence_xstate(rho4: &Matrix4c) -> Result<ConcurrenceResult> {
    let magnitude = x_pattern_violation(rho4);
    if magnitude > X_PATTERN_TOL {
        return Err(Error::NotXState { magnitude });
    }
    let (c1, c2) = x_branches(rho4);
    Ok(ConcurrenceResult {
        value: c1.max(c2).max(0.0),
        lambdas: None,
        c1: Some(c1),
        c2: Some(c2),
        path: ConcurrencePath::Xstate,
    })
}
