//! Manufactured benchmark problems, their data oracle and exact errors.

mod errors;
mod oracle;
mod poisson;
mod problems;

pub use errors::{compute_errors, ErrorRecord, DEFAULT_QUAD_DEPTH};
pub use oracle::{fd_directional, fd_laplacian, gradient_deviation, verify_manufactured, ManufacturedReport};
pub use poisson::{poisson_exact, poisson_grad, poisson_h1_error, poisson_indicators, poisson_solve, poisson_source};
pub use problems::{
    distributed_grad_u, distributed_grad_z, distributed_laplace_z, distributed_problem, distributed_u, distributed_z,
    in_control_region, neumann_grad_z, neumann_problem, neumann_z, poincare_constant, trace_constant, Benchmark,
    ExactSolution, VectorField, NEUMANN_EXPONENT,
};
