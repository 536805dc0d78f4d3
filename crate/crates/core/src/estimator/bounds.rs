//! Error bounds built from the star indicators.

use super::calibration::Calibration;
use super::indicators::StarIndicators;
use crate::error::{Error, Result};
use crate::optsys::{Constraint, ProblemSpec};

/// Space dimension; each residual contribution is counted in `d + 1` stars.
pub const DIM: usize = 2;

/// `κ = ((1+2L)/(1+L)) (1 + (M/m_a)(1+2L))` with `L = M/√α`.
pub fn kappa(alpha: f64, m: f64, m_a: f64) -> f64 {
    let l = m / alpha.sqrt();
    (1.0 + 2.0 * l) / (1.0 + l) * (1.0 + m / m_a * (1.0 + 2.0 * l))
}

fn overlap() -> f64 {
    ((DIM + 1) as f64).sqrt()
}

/// `(s·η/√(d+1), s·κ·√(C_M)·η)`.
///
/// The upper bound is linear in κ, matching the stability constant of the
/// abstract a posteriori estimate `d_α ≤ (κ/m_a)·‖Res‖`.
pub fn bounds_general(ind: &StarIndicators, problem: &ProblemSpec, cal: &Calibration) -> (f64, f64) {
    let eta = ind.total();
    let k = kappa(problem.alpha, problem.m, problem.m_a);
    (cal.s * eta / overlap(), cal.s * k / problem.m_a * (cal.c_m * ind.total_sq).sqrt())
}

/// `s·(1 + κF/√α)·η`.
pub fn bounds_compact(ind: &StarIndicators, problem: &ProblemSpec, cal: &Calibration) -> f64 {
    let k = kappa(problem.alpha, problem.m, problem.m_a);
    let f = ind.compactness(problem.setting);
    cal.s * (1.0 + k * f / problem.alpha.sqrt()) * ind.total()
}

/// Bounds for the energy error `‖x − X‖` without control constraints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBounds {
    /// `s·max{√α/(√α+M), 1 − κF}·η/√(d+1)`.
    pub lower_max: f64,
    /// `s·√α/(√α+M)·η/√(d+1)`.
    pub lower_general: f64,
    /// `s·(1 − κF)·η/√(d+1)`; negative when the option is void.
    pub lower_compact: f64,
    /// `s·(1 + κF)·η`.
    pub upper: f64,
}

pub fn bounds_energy_unconstrained(
    ind: &StarIndicators,
    problem: &ProblemSpec,
    cal: &Calibration,
) -> Result<EnergyBounds> {
    if problem.effective_constraint() != Constraint::None {
        return Err(Error::ConstrainedProblem);
    }
    let k = kappa(problem.alpha, problem.m, problem.m_a);
    let f = ind.compactness(problem.setting);
    let sa = problem.alpha.sqrt();
    let base = cal.s * ind.total() / overlap();
    let general = sa / (sa + problem.m);
    let compact = 1.0 - k * f;
    Ok(EnergyBounds {
        lower_max: base * general.max(compact),
        lower_general: base * general,
        lower_compact: base * compact,
        upper: cal.s * (1.0 + k * f) * ind.total(),
    })
}

/// All bounds of one level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub dofs: usize,
    pub eta_total: f64,
    pub lower_general: f64,
    pub upper_general: f64,
    pub upper_compact: f64,
    pub energy: Option<EnergyBounds>,
    pub kappa: f64,
    pub compactness: f64,
    pub scale: f64,
}

pub fn bound_report(dofs: usize, ind: &StarIndicators, problem: &ProblemSpec, cal: &Calibration) -> BoundReport {
    let (lower_general, upper_general) = bounds_general(ind, problem, cal);
    BoundReport {
        dofs,
        eta_total: ind.total(),
        lower_general,
        upper_general,
        upper_compact: bounds_compact(ind, problem, cal),
        energy: bounds_energy_unconstrained(ind, problem, cal).ok(),
        kappa: kappa(problem.alpha, problem.m, problem.m_a),
        compactness: ind.compactness(problem.setting),
        scale: cal.s,
    }
}
