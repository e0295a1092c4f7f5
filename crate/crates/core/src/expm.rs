//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham, SIAM J. Matrix Anal. Appl. 26, 2005).
//!
//! No eigendecomposition is used, so non-normal generators are fine.

use nalgebra::DMatrix;

use crate::model::{CMatrix, C64};

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled degree-13 approximant reaches
/// double-precision accuracy.
const THETA13: f64 = 5.371_920_351_148_152;

pub fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` for a square complex matrix.
///
/// # Panics
/// If `a` is not square or contains non-finite entries.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    assert!(a.iter().all(|z| z.re.is_finite() && z.im.is_finite()), "expm input is not finite");
    if n == 0 {
        return a.clone();
    }

    let norm = one_norm(a);
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = a * C64::new(0.5f64.powi(squarings), 0.0);

    let mut result = pade13(&scaled);
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

fn pade13(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);

    let p = &v + &u;
    let q = &v - &u;
    q.lu().solve(&p).expect("Pade denominator is singular")
}
