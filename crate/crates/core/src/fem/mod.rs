//! P1 Lagrange finite elements: quadrature, assembly, constraints and solvers.

mod assembly;
pub mod clip;
mod dirichlet;
mod embedding;
pub mod ldl;
pub mod ordering;
mod quadrature;
mod solve;
mod sparse;

pub use assembly::{
    assemble_boundary_load, assemble_boundary_mass, assemble_load, assemble_mass, assemble_stiffness,
    element_mass, element_stiffness, eval_p1, grad_p1, interpolate, p1_gradients, p1_pattern,
};
pub use dirichlet::{apply_dirichlet, DirichletSystem, DofMap};
pub use embedding::{estimate_embedding_constant, Embedding};
pub use quadrature::{gauss_legendre, LineQuadrature, Quadrature};
pub use solve::{matrix_graph, pcg, solve_spd, SpdFactor, DEFAULT_TOL, DIRECT_LIMIT};
pub use sparse::CsrMatrix;

/// Coefficient vector of a P1 function (one value per mesh vertex).
#[derive(Clone, Debug, PartialEq)]
pub struct FeFunction {
    pub values: Vec<f64>,
}

impl FeFunction {
    pub fn new(values: Vec<f64>) -> Self {
        FeFunction { values }
    }

    pub fn zeros(n: usize) -> Self {
        FeFunction { values: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
