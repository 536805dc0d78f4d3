//! Projections onto the admissible control sets.

use crate::fem::assemble_boundary_load;
use crate::fem::LineQuadrature;
use crate::mesh::Mesh;

/// `min{max{v, a}, b}`; either bound may be infinite.
#[inline]
pub fn project_box(v: f64, a: f64, b: f64) -> f64 {
    v.max(a).min(b)
}

/// `∫_Γ φ_i` for every vertex (zero at interior vertices).
pub fn boundary_weights(mesh: &Mesh) -> Vec<f64> {
    assemble_boundary_load(mesh, None, &|_, _| 1.0, &LineQuadrature::gauss(1))
        .expect("constant boundary load is finite")
}

/// Constant added by the mean-value projection to a trace with integral `integral`.
#[inline]
pub fn boundary_mean_shift(integral: f64, a: f64, length: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        0.0
    } else {
        (a - integral).max(0.0) / length
    }
}

/// Projects a P1 boundary trace (vertex values; interior values are
/// ignored and copied through) onto `{q : ∫_Γ q ≥ a}`.
pub fn project_boundary_mean(v: &[f64], a: f64, mesh: &Mesh) -> Vec<f64> {
    let m = boundary_weights(mesh);
    let integral: f64 = m.iter().zip(v).map(|(w, x)| w * x).sum();
    let shift = boundary_mean_shift(integral, a, mesh.boundary_length());
    let on_boundary = mesh.boundary_vertices();
    v.iter().zip(on_boundary).map(|(&x, b)| if b { x + shift } else { x }).collect()
}
