//! Elimination of Dirichlet-constrained vertices.

use super::sparse::CsrMatrix;
use crate::geometry::Point;
use crate::mesh::Mesh;

/// Map between all vertices and the free (unconstrained) ones.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub free: Vec<usize>,
    pub index: Vec<Option<usize>>,
}

impl DofMap {
    pub fn new(fixed: &[bool]) -> Self {
        let mut free = Vec::new();
        let index = fixed
            .iter()
            .enumerate()
            .map(|(v, &f)| {
                (!f).then(|| {
                    free.push(v);
                    free.len() - 1
                })
            })
            .collect();
        DofMap { free, index }
    }

    pub fn all(n: usize) -> Self {
        Self::new(&vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| v[i]).collect()
    }

    /// Full vector taking `reduced` on free vertices and `fixed` elsewhere.
    pub fn expand(&self, reduced: &[f64], fixed: &[f64]) -> Vec<f64> {
        let mut out = fixed.to_vec();
        for (k, &v) in self.free.iter().enumerate() {
            out[v] = reduced[k];
        }
        out
    }
}

pub struct DirichletSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dofs: DofMap,
    /// Vertex interpolant of the boundary data (zero on free vertices).
    pub lifting: Vec<f64>,
}

impl DirichletSystem {
    pub fn reconstruct(&self, reduced: &[f64]) -> Vec<f64> {
        self.dofs.expand(reduced, &self.lifting)
    }
}

/// Symmetric elimination of the Dirichlet vertices of `mesh` with trace `g`.
pub fn apply_dirichlet(a: &CsrMatrix, rhs: &[f64], mesh: &Mesh, g: &dyn Fn(Point) -> f64) -> DirichletSystem {
    let fixed = mesh.dirichlet_vertices();
    let dofs = DofMap::new(&fixed);
    let lifting: Vec<f64> = mesh
        .vertices()
        .iter()
        .zip(&fixed)
        .map(|(&p, &f)| if f { g(p) } else { 0.0 })
        .collect();
    let shift = a.matvec(&lifting);
    let rhs = dofs.free.iter().map(|&i| rhs[i] - shift[i]).collect();
    let matrix = a.submatrix(&dofs.index, &dofs.index, dofs.len());
    DirichletSystem { matrix, rhs, dofs, lifting }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_stiffness, solve_spd};
    use crate::mesh::{initial_mesh, uniform_bisect, DomainId};

    fn laplace(g: &dyn Fn(Point) -> f64) -> (Mesh, Vec<f64>) {
        let m = uniform_bisect(&initial_mesh(DomainId::UnitSquare).unwrap(), 6);
        let a = assemble_stiffness(&m, false).unwrap();
        let sys = apply_dirichlet(&a, &vec![0.0; m.num_vertices()], &m, g);
        let x = solve_spd(&sys.matrix, &sys.rhs, 1e-12).unwrap();
        (m.clone(), sys.reconstruct(&x))
    }

    #[test]
    fn constant_trace_gives_constant() {
        let (_, u) = laplace(&|_| 2.5);
        assert!(u.iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn affine_trace_reproduced() {
        let (m, u) = laplace(&|p| p[0] + p[1]);
        for (p, v) in m.vertices().iter().zip(&u) {
            assert!((v - p[0] - p[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_trace_is_deletion() {
        let m = uniform_bisect(&initial_mesh(DomainId::UnitSquare).unwrap(), 3);
        let a = assemble_stiffness(&m, false).unwrap();
        let rhs: Vec<f64> = (0..m.num_vertices()).map(|i| i as f64).collect();
        let sys = apply_dirichlet(&a, &rhs, &m, &|_| 0.0);
        assert_eq!(sys.rhs, sys.dofs.restrict(&rhs));
    }
}
