//! Adaptive P1 finite elements for linear-quadratic optimal control problems.
//!
//! The crate solves the reduced, rescaled optimality system of distributed and
//! Neumann boundary control problems with a variationally discretized control,
//! evaluates star-localized residual indicators, and reports the general,
//! compactness-based and unconstrained-energy error bounds on each level of an
//! adaptive (or uniform) refinement loop.
//!
//! Module map:
//!
//! - [`mesh`]: conforming triangulations, newest-vertex bisection, stars.
//! - [`fem`]: quadrature, P1 assembly, sparse storage, direct and iterative solvers.
//! - [`optsys`]: problem description, projections, the coupled system and its forms.
//! - [`estimator`]: residual indicators, the amplification factor and all bounds.
//! - [`benchmarks`]: manufactured benchmark problems and exact error evaluation.
//! - [`driver`]: marking, the adaptive loop, CSV output and the command line.

pub mod benchmarks;
pub mod driver;
pub mod error;
pub mod estimator;
pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod optsys;

pub use error::{Error, Result};
pub use geometry::Point;
