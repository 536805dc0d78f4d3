//! Residual indicators, the stability factor κ and the bound families.

mod bounds;
mod calibration;
mod indicators;

pub use bounds::{
    bound_report, bounds_compact, bounds_energy_unconstrained, bounds_general, kappa, BoundReport, EnergyBounds, DIM,
};
pub use calibration::Calibration;
pub use indicators::{star_indicators, StarIndicators};
