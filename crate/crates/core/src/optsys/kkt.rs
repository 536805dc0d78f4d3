//! Assembly and direct solution of the linearised optimality system.
//!
//! Unknowns are interleaved per free vertex as `[U_k, Z_k]`; row 0 of a
//! block is the adjoint equation (tested with `φ₁`), row 1 the state
//! equation (tested with `φ₂`):
//!
//! ```text
//! [ −c·M_W   A         ] [U]   [ −c·(u_d, Iφ₁) + ⟨G, φ₁⟩ ]
//! [  A       c·M_inact ] [Z] = [ ⟨f, φ₂⟩ + active bound loads ]
//! ```
//!
//! with `c = 1/√α`. The matrix is symmetric and every leading principal
//! submatrix is nonsingular, so an unpivoted block `LDLᵀ` applies.

use super::control::clamped_points;
use super::problem::{Constraint, ProblemSpec, Setting};
use super::projection::boundary_weights;
use crate::error::{Error, Result};
use crate::fem::ldl::{BlockLdl, BlockMatrix, Pivoting};
use crate::fem::ordering::nested_dissection;
use crate::fem::{
    assemble_boundary_load, assemble_boundary_mass, assemble_load, assemble_mass, assemble_stiffness,
    CsrMatrix, DofMap,
};
use crate::mesh::{Mesh, Region};

/// Per-mesh operators and data loads, independent of the linearisation point.
#[derive(Clone, Debug)]
pub struct Operators {
    pub dofs: DofMap,
    /// Matrix of `a(·,·)` on all vertices.
    pub a: CsrMatrix,
    /// Observation mass `(I·, I·)_W`.
    pub m_obs: CsrMatrix,
    /// Control mass `(C*·, C*·)_Q` without constraints.
    pub m_ctrl: CsrMatrix,
    /// `−c·(u_d, Iφ_i) + ⟨G, φ_i⟩` for all vertices.
    pub adjoint_rhs: Vec<f64>,
    /// `⟨f, φ_i⟩` (plus Neumann data) for all vertices.
    pub state_rhs: Vec<f64>,
    /// Dirichlet values of `U` (zero at free vertices).
    pub lifting: Vec<f64>,
    pub boundary_weights: Vec<f64>,
    pub boundary_length: f64,
    /// Elimination order of the free vertices.
    pub perm: Vec<usize>,
}

impl Operators {
    pub fn new(problem: &ProblemSpec, mesh: &Mesh) -> Result<Self> {
        problem.validate()?;
        let n = mesh.num_vertices();
        let c = problem.c();
        let q = &problem.quadrature;
        let lq = &problem.edge_quadrature;
        let d = &problem.data;
        let mut adjoint_rhs = vec![0.0; n];
        let mut state_rhs = vec![0.0; n];
        let mut lifting = vec![0.0; n];
        let add = |dst: &mut Vec<f64>, s: f64, v: Vec<f64>| {
            dst.iter_mut().zip(v).for_each(|(a, b)| *a += s * b);
        };
        if let Some(f) = &d.source {
            add(&mut state_rhs, 1.0, assemble_load(mesh, Region::All, f.as_ref(), q)?);
        }
        if let Some(g) = &d.adjoint_source {
            add(&mut adjoint_rhs, 1.0, assemble_load(mesh, Region::All, g.as_ref(), q)?);
        }
        if let Some(g) = &d.adjoint_flux {
            add(&mut adjoint_rhs, 1.0, assemble_boundary_load(mesh, None, g.as_ref(), lq)?);
        }
        let (a, m_obs, m_ctrl, dofs) = match problem.setting {
            Setting::Distributed => {
                if let Some(t) = &d.target {
                    add(&mut adjoint_rhs, -c, assemble_load(mesh, problem.observation_region, t.as_ref(), q)?);
                }
                let fixed = mesh.dirichlet_vertices();
                if let Some(g) = &d.state_boundary {
                    for e in mesh.boundary() {
                        let n = mesh.outward_normal(e);
                        for &v in &e.vertices {
                            lifting[v] = g(mesh.vertices()[v], n);
                        }
                    }
                    for (v, f) in fixed.iter().enumerate() {
                        if !f {
                            lifting[v] = 0.0;
                        }
                    }
                }
                (
                    assemble_stiffness(mesh, false)?,
                    assemble_mass(mesh, problem.observation_region)?,
                    assemble_mass(mesh, problem.control_region)?,
                    DofMap::new(&fixed),
                )
            }
            Setting::Boundary => {
                if let Some(t) = &d.target {
                    add(&mut adjoint_rhs, -c, assemble_load(mesh, Region::All, t.as_ref(), q)?);
                }
                if let Some(t) = &d.boundary_target {
                    add(&mut adjoint_rhs, -c, assemble_boundary_load(mesh, None, t.as_ref(), lq)?);
                }
                if let Some(g) = &d.state_boundary {
                    add(&mut state_rhs, 1.0, assemble_boundary_load(mesh, None, g.as_ref(), lq)?);
                }
                let mb = assemble_boundary_mass(mesh, None);
                (
                    assemble_stiffness(mesh, true)?,
                    assemble_mass(mesh, Region::All)?.add_scaled(1.0, &mb),
                    mb,
                    DofMap::all(n),
                )
            }
        };
        let graph: Vec<Vec<usize>> = dofs
            .free
            .iter()
            .map(|&v| a.row(v).0.iter().filter(|&&j| j != v).filter_map(|&j| dofs.index[j]).collect())
            .collect();
        let perm = nested_dissection(&graph);
        Ok(Operators {
            dofs,
            a,
            m_obs,
            m_ctrl,
            adjoint_rhs,
            state_rhs,
            lifting,
            boundary_weights: boundary_weights(mesh),
            boundary_length: mesh.boundary_length(),
            perm,
        })
    }

    pub fn num_free(&self) -> usize {
        self.dofs.len()
    }
}

/// Point at which the projection is linearised.
#[derive(Clone, Copy, Debug)]
pub enum Linearization<'a> {
    /// `Π_K = id`.
    Identity,
    /// Box constraint: activity of `−Z/√α` for the given `Z` (all vertices).
    Box { z: &'a [f64] },
    /// Mean constraint on Γ with the given scalar activity.
    Mean { active: bool },
}

/// Rank-one correction `u vᵀ` of the block matrix.
#[derive(Clone, Debug)]
pub struct RankOne {
    pub u: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct KktSystem {
    pub matrix: BlockMatrix<2>,
    pub rhs: Vec<[f64; 2]>,
    pub rank_one: Option<RankOne>,
}

/// Inactive control mass and active bound loads (all vertices).
fn control_linearization(
    problem: &ProblemSpec,
    mesh: &Mesh,
    ops: &Operators,
    lin: Linearization<'_>,
) -> (CsrMatrix, Vec<f64>) {
    let n = mesh.num_vertices();
    let mut load = vec![0.0; n];
    match lin {
        Linearization::Identity | Linearization::Mean { .. } => {
            if let Linearization::Mean { active: true } = lin {
                if let Constraint::BoundaryMean { lower } = problem.constraint {
                    let s = lower / ops.boundary_length;
                    load.iter_mut().zip(&ops.boundary_weights).for_each(|(l, m)| *l = s * m);
                }
            }
            (ops.m_ctrl.clone(), load)
        }
        Linearization::Box { z } => {
            let (lower, upper) = match problem.constraint {
                Constraint::Box { lower, upper } => (lower, upper),
                _ => (f64::NEG_INFINITY, f64::INFINITY),
            };
            let c = problem.c();
            let mut m = ops.m_ctrl.clone();
            m.scale(0.0);
            for (t, tri) in mesh.triangles().iter().enumerate() {
                if !problem.control_region.contains(tri.subdomain) {
                    continue;
                }
                let v = tri.vertices;
                let vals = [-c * z[v[0]], -c * z[v[1]], -c * z[v[2]]];
                let field = crate::fem::clip::ClampField { vals, lower, upper };
                let area = mesh.area(t);
                for (l, wt) in clamped_points(&[field], problem.clamp_quadrature, None) {
                    let w = vals[0] * l[0] + vals[1] * l[1] + vals[2] * l[2];
                    let wa = wt * area;
                    if w <= lower || w >= upper {
                        let b = if w <= lower { lower } else { upper };
                        for k in 0..3 {
                            load[v[k]] += b * wa * l[k];
                        }
                    } else {
                        for i in 0..3 {
                            for j in 0..3 {
                                m.add(v[i], v[j], wa * l[i] * l[j]);
                            }
                        }
                    }
                }
            }
            (m, load)
        }
    }
}

/// Assembles the linearised system on the free vertices.
pub fn assemble_kkt_linear(
    problem: &ProblemSpec,
    mesh: &Mesh,
    ops: &Operators,
    lin: Linearization<'_>,
) -> KktSystem {
    let c = problem.c();
    let (m_inact, bound_load) = control_linearization(problem, mesh, ops, lin);
    let dofs = &ops.dofs;
    let rows: Vec<Vec<usize>> = dofs
        .free
        .iter()
        .map(|&v| ops.a.row(v).0.iter().filter_map(|&j| dofs.index[j]).collect())
        .collect();
    let mut matrix = BlockMatrix::<2>::with_pattern(&rows);
    let mut rhs = vec![[0.0; 2]; dofs.len()];
    for (k, &v) in dofs.free.iter().enumerate() {
        rhs[k] = [ops.adjoint_rhs[v], ops.state_rhs[v] + bound_load[v]];
        let (cols, avals) = ops.a.row(v);
        let (mcols, mvals) = ops.m_obs.row(v);
        let (icols, ivals) = m_inact.row(v);
        debug_assert!(cols == mcols && cols == icols);
        for (p, &j) in cols.iter().enumerate() {
            let (a, mo, mi) = (avals[p], mvals[p], ivals[p]);
            match dofs.index[j] {
                Some(l) => *matrix.block_mut(k, l) = [[-c * mo, a], [a, c * mi]],
                None => {
                    let g = ops.lifting[j];
                    rhs[k][0] += c * mo * g;
                    rhs[k][1] -= a * g;
                }
            }
        }
    }
    let rank_one = match (lin, problem.constraint) {
        (Linearization::Mean { active: true }, Constraint::BoundaryMean { .. }) => {
            let s = -c / ops.boundary_length;
            let u = dofs.free.iter().map(|&v| [0.0, s * ops.boundary_weights[v]]).collect();
            let w = dofs.free.iter().map(|&v| [0.0, ops.boundary_weights[v]]).collect();
            Some(RankOne { u, v: w })
        }
        _ => None,
    };
    KktSystem { matrix, rhs, rank_one }
}

fn dot(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x[0] * y[0] + x[1] * y[1]).sum()
}

fn inf_norm(a: &[[f64; 2]]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x[0].abs()).max(x[1].abs()))
}

impl KktSystem {
    /// `(K + u vᵀ) x`.
    pub fn apply(&self, x: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let mut y = self.matrix.matvec(x);
        if let Some(r) = &self.rank_one {
            let s = dot(&r.v, x);
            for (yi, ui) in y.iter_mut().zip(&r.u) {
                yi[0] += s * ui[0];
                yi[1] += s * ui[1];
            }
        }
        y
    }

    /// Direct solve with iterative refinement; returns free-vertex `(U, Z)` pairs.
    pub fn solve(&self, perm: &[usize]) -> Result<Vec<[f64; 2]>> {
        let ldl = BlockLdl::factor(&self.matrix, perm, Pivoting::Nonsingular)?;
        let correction = self.rank_one.as_ref().map(|r| {
            let y = ldl.solve(&r.u);
            let denom = 1.0 + dot(&r.v, &y);
            (y, denom)
        });
        let inner = |b: &[[f64; 2]]| -> Result<Vec<[f64; 2]>> {
            let mut x = ldl.solve(b);
            if let (Some(r), Some((y, denom))) = (&self.rank_one, &correction) {
                if denom.abs() < 1e-14 {
                    return Err(Error::SingularPivot { row: usize::MAX });
                }
                let s = dot(&r.v, &x) / denom;
                for (xi, yi) in x.iter_mut().zip(y) {
                    xi[0] -= s * yi[0];
                    xi[1] -= s * yi[1];
                }
            }
            Ok(x)
        };
        let mut x = inner(&self.rhs)?;
        let bn = inf_norm(&self.rhs).max(f64::MIN_POSITIVE);
        for _ in 0..3 {
            let ax = self.apply(&x);
            let r: Vec<[f64; 2]> = self.rhs.iter().zip(ax).map(|(b, a)| [b[0] - a[0], b[1] - a[1]]).collect();
            if inf_norm(&r) <= 1e-15 * bn {
                break;
            }
            let dx = inner(&r)?;
            for (xi, d) in x.iter_mut().zip(dx) {
                xi[0] += d[0];
                xi[1] += d[1];
            }
        }
        if x.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::SingularPivot { row: usize::MAX });
        }
        Ok(x)
    }
}

/// Expands free-vertex pairs to full `(U, Z)` vectors.
pub fn expand(ops: &Operators, x: &[[f64; 2]]) -> (Vec<f64>, Vec<f64>) {
    let u: Vec<f64> = x.iter().map(|p| p[0]).collect();
    let z: Vec<f64> = x.iter().map(|p| p[1]).collect();
    let zero = vec![0.0; ops.lifting.len()];
    (ops.dofs.expand(&u, &ops.lifting), ops.dofs.expand(&z, &zero))
}
