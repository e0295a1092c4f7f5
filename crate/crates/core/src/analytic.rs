//! Closed-form NOON-state solution for identical cavities, kept as an
//! independent oracle for the numerical engine.
//!
//! With `a = 4N + 1` and `b^2 = 8N^2 + 8N + 1` the published populations are
//!
//! ```text
//! r11 = -(a+3)/(8b^2) [1 + a + 2 sinh(b k t) - (1+a)/b cosh(b k t)] e^{-a k t}
//! r22 = -1/16 [(16 al^2 + 4/b^2 - 4) + (1 - 1/b^2) cosh(b k t)] e^{-a k t}
//! r33 =  1/16 [(-16 al^2 + 4/b^2 + 12) + (1 - 1/b^2) cosh(b k t)] e^{-a k t}
//! r44 = 1/(8b^2) [a^2 - 1 + (a-1)/4 (2b sinh(b k t) - (a+1) cosh(b k t))] e^{-a k t}
//! ```
//!
//! and the coherences
//!
//! ```text
//! r14 = -(M/|M|) al sqrt(1-al^2) sinh(|M| k t) e^{-a k t}
//! r32 =          al sqrt(1-al^2) cosh(|M| k t) e^{-a k t}
//! ```
//!
//! The population expressions do not reproduce the initial condition
//! (`r22(0) = -al^2` at `r = 0`), so they are only returned in verbatim
//! mode and audited by [`consistency_report`]. The coherences are sound and
//! solve `u' = -a k u - k M* v`, `v' = -a k v - k M u` with `u(0) = u0`,
//! `v(0) = 0`.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::concurrence::extract_qubit_block;
use crate::error::{Error, Result};
use crate::evolution::propagate;
use crate::liouvillian::liouvillian_for;
use crate::model::{make_initial_density, InitialState, ReservoirParams, C64};

/// Cutoffs compared by the consistency report.
pub const REPORT_CUTOFFS: [usize; 3] = [1, 2, 3];
/// A verbatim element differing from the exact initial state by more than
/// this is flagged.
pub const INITIAL_CONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticParams {
    pub n: f64,
    pub a: f64,
    pub b: f64,
    pub m: C64,
    pub m_abs: f64,
    pub kappa: f64,
}

impl AnalyticParams {
    /// Requires identical cavities.
    pub fn new(params: &ReservoirParams) -> Result<Self> {
        params.check()?;
        if !params.is_identical() {
            return Err(Error::Unsupported(
                "closed-form solution assumes identical cavities".into(),
            ));
        }
        let n = params.a.n();
        let m = params.a.m();
        Ok(Self {
            n,
            a: 4.0 * n + 1.0,
            b: (8.0 * n * n + 8.0 * n + 1.0).sqrt(),
            m,
            m_abs: m.norm(),
            kappa: params.a.kappa,
        })
    }

    /// `M / |M|`, taken as zero in the vacuum limit where it multiplies `sinh(0)`.
    fn phase(&self) -> C64 {
        if self.m_abs > 0.0 {
            self.m / self.m_abs
        } else {
            C64::new(0.0, 0.0)
        }
    }
}

/// Elements of an X-form state at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XStateElements {
    pub t: f64,
    /// `[r11, r22, r33, r44]`; `None` when populations were not requested.
    pub populations: Option<[f64; 4]>,
    pub rho14: C64,
    pub rho41: C64,
    pub rho23: C64,
    pub rho32: C64,
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, 1]")));
    }
    Ok(alpha * (1.0 - alpha * alpha).max(0.0).sqrt())
}

fn verbatim_populations(alpha: f64, p: &AnalyticParams, t: f64) -> [f64; 4] {
    let (a, b) = (p.a, p.b);
    let b2 = b * b;
    let kt = p.kappa * t;
    let (sh, ch) = ((b * kt).sinh(), (b * kt).cosh());
    let decay = (-a * kt).exp();
    let al2 = alpha * alpha;

    let r11 = -(a + 3.0) / (8.0 * b2) * (1.0 + a + 2.0 * sh - (1.0 + a) / b * ch) * decay;
    let r22 = -((16.0 * al2 + 4.0 / b2 - 4.0) + (1.0 - 1.0 / b2) * ch) / 16.0 * decay;
    let r33 = ((-16.0 * al2 + 4.0 / b2 + 12.0) + (1.0 - 1.0 / b2) * ch) / 16.0 * decay;
    let r44 = (a * a - 1.0 + 0.25 * (a - 1.0) * (2.0 * b * sh - (a + 1.0) * ch)) / (8.0 * b2) * decay;
    [r11, r22, r33, r44]
}

/// Closed-form NOON elements. With `verbatim = false` only the coherences
/// are returned.
pub fn closed_form_noon_elements(
    alpha: f64,
    params: &ReservoirParams,
    t: f64,
    verbatim: bool,
) -> Result<XStateElements> {
    let amp = check_alpha(alpha)?;
    let p = AnalyticParams::new(params)?;
    let kt = p.kappa * t;
    let decay = (-p.a * kt).exp();
    let rho32 = C64::new(amp * (p.m_abs * kt).cosh() * decay, 0.0);
    let rho14 = -p.phase() * (amp * (p.m_abs * kt).sinh() * decay);
    Ok(XStateElements {
        t,
        populations: verbatim.then(|| verbatim_populations(alpha, &p, t)),
        rho14,
        rho41: rho14.conj(),
        rho23: rho32.conj(),
        rho32,
    })
}

/// `(r32, r14)` from the two-variable coherence system, integrated by
/// exponentiating its 2x2 generator.
pub fn effective_coherence_solution(u0: f64, params: &ReservoirParams, t: f64) -> Result<(C64, C64)> {
    let p = AnalyticParams::new(params)?;
    let k = p.kappa;
    let generator = Matrix2::new(
        C64::new(-p.a * k, 0.0),
        -p.m.conj() * k,
        -p.m * k,
        C64::new(-p.a * k, 0.0),
    ) * C64::new(t, 0.0);
    let prop = generator.exp();
    Ok((prop[(0, 0)] * u0, prop[(1, 0)] * u0))
}

/// Concurrence of a NOON state in a vacuum bath: `2 al sqrt(1 - al^2) e^{-k t}`.
pub fn vacuum_noon_concurrence(alpha: f64, kappa: f64, t: f64) -> Result<f64> {
    Ok(2.0 * check_alpha(alpha)? * (-kappa * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementValues {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho14: C64,
    pub rho32: C64,
}

impl ElementValues {
    fn deviation(&self, other: &Self) -> ElementDeviations {
        ElementDeviations {
            rho11: (self.rho11 - other.rho11).abs(),
            rho22: (self.rho22 - other.rho22).abs(),
            rho33: (self.rho33 - other.rho33).abs(),
            rho44: (self.rho44 - other.rho44).abs(),
            rho14: (self.rho14 - other.rho14).norm(),
            rho32: (self.rho32 - other.rho32).norm(),
        }
    }

    fn named(&self) -> [(&'static str, C64); 6] {
        let c = |x: f64| C64::new(x, 0.0);
        [
            ("rho11", c(self.rho11)),
            ("rho22", c(self.rho22)),
            ("rho33", c(self.rho33)),
            ("rho44", c(self.rho44)),
            ("rho14", self.rho14),
            ("rho32", self.rho32),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ElementDeviations {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho14: f64,
    pub rho32: f64,
}

impl ElementDeviations {
    fn max_with(&self, o: &Self) -> Self {
        Self {
            rho11: self.rho11.max(o.rho11),
            rho22: self.rho22.max(o.rho22),
            rho33: self.rho33.max(o.rho33),
            rho44: self.rho44.max(o.rho44),
            rho14: self.rho14.max(o.rho14),
            rho32: self.rho32.max(o.rho32),
        }
    }

    pub fn coherence_max(&self) -> f64 {
        self.rho14.max(self.rho32)
    }

    pub fn population_max(&self) -> f64 {
        self.rho11.max(self.rho22).max(self.rho33).max(self.rho44)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub t: f64,
    pub numerical: ElementValues,
    pub verbatim: ElementValues,
    pub deviation: ElementDeviations,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffComparison {
    pub n_max: usize,
    pub rows: Vec<ComparisonRow>,
    pub max_deviation: ElementDeviations,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialConditionCheck {
    pub element: &'static str,
    pub expected: C64,
    pub verbatim: C64,
    pub deviation: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub alpha: f64,
    pub params: ReservoirParams,
    pub analytic: AnalyticParams,
    pub initial_condition: Vec<InitialConditionCheck>,
    pub cutoffs: Vec<CutoffComparison>,
}

impl ConsistencyReport {
    pub fn initial_condition_violations(&self) -> impl Iterator<Item = &InitialConditionCheck> {
        self.initial_condition.iter().filter(|c| c.violated)
    }

    pub fn cutoff(&self, n_max: usize) -> Option<&CutoffComparison> {
        self.cutoffs.iter().find(|c| c.n_max == n_max)
    }
}

fn verbatim_values(alpha: f64, params: &ReservoirParams, t: f64) -> Result<ElementValues> {
    let e = closed_form_noon_elements(alpha, params, t, true)?;
    let [rho11, rho22, rho33, rho44] = e.populations.expect("verbatim populations");
    Ok(ElementValues { rho11, rho22, rho33, rho44, rho14: e.rho14, rho32: e.rho32 })
}

fn numerical_values(block: &crate::concurrence::Matrix4c) -> ElementValues {
    ElementValues {
        rho11: block[(0, 0)].re,
        rho22: block[(1, 1)].re,
        rho33: block[(2, 2)].re,
        rho44: block[(3, 3)].re,
        rho14: block[(0, 3)],
        rho32: block[(2, 1)],
    }
}

/// Audits the closed-form NOON solution against the master-equation engine
/// at cutoffs 1, 2 and 3. Disagreement is recorded, never raised.
///
/// `t_grid` must be strictly increasing and non-negative; `t = 0` is
/// evaluated even if absent but only listed rows are reported.
pub fn consistency_report(alpha: f64, params: &ReservoirParams, t_grid: &[f64]) -> Result<ConsistencyReport> {
    let analytic = AnalyticParams::new(params)?;
    check_alpha(alpha)?;
    let starts_at_zero = t_grid.first() == Some(&0.0);
    let mut grid = Vec::with_capacity(t_grid.len() + 1);
    if !starts_at_zero {
        grid.push(0.0);
    }
    grid.extend_from_slice(t_grid);
    let skip = usize::from(!starts_at_zero);

    let state = InitialState::Noon { alpha };
    let exact0 = numerical_values(&extract_qubit_block(&make_initial_density(&state, 1)?).matrix);
    let verbatim0 = verbatim_values(alpha, params, 0.0)?;
    let initial_condition = exact0
        .named()
        .iter()
        .zip(verbatim0.named())
        .map(|(&(element, expected), (_, verbatim))| {
            let deviation = (expected - verbatim).norm();
            InitialConditionCheck {
                element,
                expected,
                verbatim,
                deviation,
                violated: deviation > INITIAL_CONDITION_TOL,
            }
        })
        .collect();

    let verbatim_rows: Vec<ElementValues> = grid[skip..]
        .iter()
        .map(|&t| verbatim_values(alpha, params, t))
        .collect::<Result<_>>()?;

    let mut cutoffs = Vec::with_capacity(REPORT_CUTOFFS.len());
    for n_max in REPORT_CUTOFFS {
        let generator = liouvillian_for(params, n_max)?;
        let traj = propagate(&generator, &make_initial_density(&state, n_max)?, &grid)?;
        let mut max_deviation = ElementDeviations::default();
        let rows: Vec<ComparisonRow> = traj
            .iter()
            .skip(skip)
            .zip(&verbatim_rows)
            .map(|((t, rho), verbatim)| {
                let numerical = numerical_values(&extract_qubit_block(rho).matrix);
                let deviation = numerical.deviation(verbatim);
                max_deviation = max_deviation.max_with(&deviation);
                ComparisonRow { t, numerical, verbatim: *verbatim, deviation }
            })
            .collect();
        cutoffs.push(CutoffComparison { n_max, rows, max_deviation });
    }

    Ok(ConsistencyReport { alpha, params: *params, analytic, initial_condition, cutoffs })
}
