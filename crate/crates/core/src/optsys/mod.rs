//! The discrete reduced optimality system: assembly, active-set solution
//! and evaluation of the forms used by the error analysis.

pub mod control;
mod forms;
pub mod kkt;
mod problem;
mod projection;
mod solve;

pub use control::Control;
pub use forms::{eval_forms, FormValues, Pair};
pub use kkt::{assemble_kkt_linear, KktSystem, Linearization, Operators};
pub use problem::{ClampQuadrature, Constraint, EdgeField, Field, ProblemData, ProblemSpec, Setting};
pub use projection::{boundary_mean_shift, boundary_weights, project_boundary_mean, project_box};
pub use solve::{
    discrete_residual, solve_optimality, solve_optimality_with, ActiveSet, Activity, DiscreteState,
    IterationRecord, Residual, SolverOptions,
};
