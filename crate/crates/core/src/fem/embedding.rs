//! Discrete estimates of the Poincaré and trace embedding constants.

use super::assembly::{assemble_boundary_mass, assemble_mass, assemble_stiffness};
use super::dirichlet::DofMap;
use super::solve::SpdFactor;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Region};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedding {
    /// `‖v‖ ≤ C_P ‖∇v‖` on functions vanishing on the Dirichlet boundary.
    Poincare,
    /// `‖v‖_Γ ≤ C_Γ ‖v‖_{H¹}`.
    Trace,
}

const MAX_ITER: usize = 2000;

/// Largest eigenvalue of `B⁻¹ A` for SPD `B` and PSD `A`, by power iteration.
fn power_iteration(a: &CsrMatrix, b: &CsrMatrix) -> Result<f64> {
    let f = SpdFactor::new(b)?;
    let n = a.nrows();
    let mut x = vec![1.0; n];
    let mut mu = 0.0f64;
    for _ in 0..MAX_ITER {
        let y = f.solve(&a.matvec(&x));
        let num = a.bilinear(&y, &y);
        let den = b.bilinear(&y, &y);
        if !(den > 0.0) {
            return Err(Error::Eigen("iterate collapsed to zero".into()));
        }
        let next = num / den;
        let s = den.sqrt();
        x = y.iter().map(|v| v / s).collect();
        if (next - mu).abs() <= 1e-13 * next {
            return Ok(next);
        }
        mu = next;
    }
    Err(Error::Eigen(format!("no convergence after {MAX_ITER} iterations")))
}

pub fn estimate_embedding_constant(mesh: &Mesh, which: Embedding) -> Result<f64> {
    match which {
        Embedding::Poincare => {
            let fixed = mesh.dirichlet_vertices();
            if !fixed.iter().any(|&f| f) {
                return Err(Error::Eigen("Poincaré constant needs a Dirichlet boundary".into()));
            }
            let dofs = DofMap::new(&fixed);
            let k = assemble_stiffness(mesh, false)?.submatrix(&dofs.index, &dofs.index, dofs.len());
            let m = assemble_mass(mesh, Region::All)?.submatrix(&dofs.index, &dofs.index, dofs.len());
            // largest eigenvalue of K⁻¹M is 1/λ_min = C_P²
            Ok(power_iteration(&m, &k)?.sqrt())
        }
        Embedding::Trace => {
            let h1 = assemble_stiffness(mesh, true)?;
            let mg = assemble_boundary_mass(mesh, None);
            Ok(power_iteration(&mg, &h1)?.sqrt())
        }
    }
}
