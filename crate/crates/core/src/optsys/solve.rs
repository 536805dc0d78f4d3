//! Semismooth Newton (primal–dual active set) for the projected system.

use super::control::Control;
use super::kkt::{assemble_kkt_linear, expand, Linearization, Operators};
use super::problem::{Constraint, ProblemSpec};
use crate::error::{Error, Result};
use crate::fem::FeFunction;
use crate::mesh::Mesh;
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activity {
    Inactive,
    Lower,
    Upper,
}

/// Activity flags of the computed solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActiveSet {
    Unconstrained,
    /// Per-vertex activity of `−Z/√α` (outside the control region: inactive).
    Vertices(Vec<Activity>),
    /// Whether `∫_Γ q ≥ a` is active.
    Mean(bool),
}

impl ActiveSet {
    fn count(&self) -> usize {
        match self {
            ActiveSet::Unconstrained => 0,
            ActiveSet::Vertices(v) => v.iter().filter(|a| **a != Activity::Inactive).count(),
            ActiveSet::Mean(a) => *a as usize,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Iteration cap.
    pub max_iter: usize,
    /// Stop once the residual is below `tol · scale`.
    pub tol: f64,
    /// Halve the Newton step while the residual grows.
    pub line_search: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iter: 50, tol: 1e-11, line_search: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub residual: f64,
    pub active: usize,
    pub step: f64,
}

#[derive(Clone, Debug)]
pub struct DiscreteState {
    pub u: FeFunction,
    pub z: FeFunction,
    pub active_set: ActiveSet,
    pub newton_iters: usize,
    /// Max-norm of the nonlinear residual against all basis functions.
    pub residual: f64,
    /// Largest max-norm among the terms of the residual.
    pub residual_scale: f64,
    pub history: Vec<IterationRecord>,
}

impl DiscreteState {
    pub fn control(&self, problem: &ProblemSpec, mesh: &Mesh) -> Control {
        Control::from_adjoint(problem, mesh, &self.z.values)
    }

    /// Text listing of the iteration history.
    pub fn history_dump(&self) -> String {
        let mut s = String::from("iter residual active step\n");
        for r in &self.history {
            let _ = writeln!(s, "{} {:.6e} {} {}", r.iteration, r.residual, r.active, r.step);
        }
        s
    }
}

/// Nonlinear residual tested with the free basis functions.
#[derive(Clone, Debug)]
pub struct Residual {
    /// Adjoint rows (tested with `φ₁`).
    pub adjoint: Vec<f64>,
    /// State rows (tested with `φ₂`).
    pub state: Vec<f64>,
    pub max: f64,
    pub scale: f64,
}

fn inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn discrete_residual(problem: &ProblemSpec, mesh: &Mesh, ops: &Operators, u: &[f64], z: &[f64]) -> Residual {
    let c = problem.c();
    let az = ops.a.matvec(z);
    let au = ops.a.matvec(u);
    let mu: Vec<f64> = ops.m_obs.matvec(u).into_iter().map(|v| c * v).collect();
    let q = Control::from_adjoint(problem, mesh, z).load(mesh, problem.clamp_quadrature);
    let free = &ops.dofs.free;
    let adjoint: Vec<f64> = free.iter().map(|&v| ops.adjoint_rhs[v] - az[v] + mu[v]).collect();
    let state: Vec<f64> = free.iter().map(|&v| ops.state_rhs[v] - au[v] + q[v]).collect();
    let restrict = |x: &[f64]| inf(&ops.dofs.restrict(x));
    let scale = [
        restrict(&ops.adjoint_rhs),
        restrict(&ops.state_rhs),
        restrict(&az),
        restrict(&au),
        restrict(&mu),
        restrict(&q),
    ]
    .into_iter()
    .fold(f64::MIN_POSITIVE, f64::max);
    let max = inf(&adjoint).max(inf(&state));
    Residual { adjoint, state, max, scale }
}

fn vertex_activity(problem: &ProblemSpec, mesh: &Mesh, z: &[f64]) -> ActiveSet {
    let (lower, upper) = match problem.constraint {
        Constraint::Box { lower, upper } => (lower, upper),
        _ => return ActiveSet::Unconstrained,
    };
    let c = problem.c();
    let mut in_region = vec![false; mesh.num_vertices()];
    for tri in mesh.triangles() {
        if problem.control_region.contains(tri.subdomain) {
            tri.vertices.iter().for_each(|&v| in_region[v] = true);
        }
    }
    ActiveSet::Vertices(
        z.iter()
            .zip(in_region)
            .map(|(&zv, r)| {
                let w = -c * zv;
                if !r {
                    Activity::Inactive
                } else if w <= lower {
                    Activity::Lower
                } else if w >= upper {
                    Activity::Upper
                } else {
                    Activity::Inactive
                }
            })
            .collect(),
    )
}

fn mean_active(problem: &ProblemSpec, ops: &Operators, z: &[f64]) -> bool {
    match problem.constraint {
        Constraint::BoundaryMean { lower } => {
            let integral: f64 = -problem.c() * ops.boundary_weights.iter().zip(z).map(|(m, v)| m * v).sum::<f64>();
            lower - integral > 0.0
        }
        _ => false,
    }
}

fn linear_solve(problem: &ProblemSpec, mesh: &Mesh, ops: &Operators, lin: Linearization<'_>) -> Result<(Vec<f64>, Vec<f64>)> {
    let sys = assemble_kkt_linear(problem, mesh, ops, lin);
    let x = sys.solve(&ops.perm)?;
    Ok(expand(ops, &x))
}

/// Solves the discrete optimality system, starting from the unconstrained solution.
pub fn solve_optimality(problem: &ProblemSpec, mesh: &Mesh) -> Result<DiscreteState> {
    let ops = Operators::new(problem, mesh)?;
    solve_optimality_with(problem, mesh, &ops, None, SolverOptions::default())
}

/// Like [`solve_optimality`] with precomputed operators, an optional initial
/// adjoint `z0` (all vertices) and explicit options.
pub fn solve_optimality_with(
    problem: &ProblemSpec,
    mesh: &Mesh,
    ops: &Operators,
    z0: Option<&[f64]>,
    opts: SolverOptions,
) -> Result<DiscreteState> {
    let constraint = problem.effective_constraint();
    let mut history = Vec::new();
    let finish = |u: Vec<f64>, z: Vec<f64>, iters: usize, history: Vec<IterationRecord>| {
        let r = discrete_residual(problem, mesh, ops, &u, &z);
        let active_set = match constraint {
            Constraint::None => ActiveSet::Unconstrained,
            Constraint::Box { .. } => vertex_activity(problem, mesh, &z),
            Constraint::BoundaryMean { .. } => ActiveSet::Mean(mean_active(problem, ops, &z)),
        };
        DiscreteState {
            u: FeFunction::new(u),
            z: FeFunction::new(z),
            active_set,
            newton_iters: iters,
            residual: r.max,
            residual_scale: r.scale,
            history,
        }
    };

    let (mut u, mut z) = match z0 {
        Some(z0) if constraint != Constraint::None => (ops.lifting.clone(), z0.to_vec()),
        _ => linear_solve(problem, mesh, ops, Linearization::Identity)?,
    };
    if constraint == Constraint::None {
        return Ok(finish(u, z, 1, history));
    }
    let mut res = discrete_residual(problem, mesh, ops, &u, &z);
    if z0.is_none() {
        history.push(IterationRecord { iteration: 0, residual: res.max, active: 0, step: 1.0 });
    }
    if res.max <= opts.tol * res.scale && z0.is_none() {
        return Ok(finish(u, z, 0, history));
    }

    match constraint {
        Constraint::BoundaryMean { .. } => {
            let mut active = mean_active(problem, ops, &z);
            for k in 1..=opts.max_iter {
                let (un, zn) = linear_solve(problem, mesh, ops, Linearization::Mean { active })?;
                u = un;
                z = zn;
                res = discrete_residual(problem, mesh, ops, &u, &z);
                let next = mean_active(problem, ops, &z);
                history.push(IterationRecord { iteration: k, residual: res.max, active: next as usize, step: 1.0 });
                if next == active {
                    return Ok(finish(u, z, k, history));
                }
                active = next;
            }
            Err(Error::ActiveSetCycle { iterations: opts.max_iter, residual: res.max })
        }
        Constraint::Box { .. } => {
            let mut prev_flags = vertex_activity(problem, mesh, &z);
            for k in 1..=opts.max_iter {
                let (un, zn) = linear_solve(problem, mesh, ops, Linearization::Box { z: &z })?;
                let mut step = 1.0;
                let mut trial = discrete_residual(problem, mesh, ops, &un, &zn);
                let (mut ut, mut zt) = (un.clone(), zn.clone());
                if opts.line_search && k > 1 {
                    while trial.max > res.max && step > 1.0 / 256.0 {
                        step *= 0.5;
                        ut = u.iter().zip(&un).map(|(a, b)| a + step * (b - a)).collect();
                        zt = z.iter().zip(&zn).map(|(a, b)| a + step * (b - a)).collect();
                        trial = discrete_residual(problem, mesh, ops, &ut, &zt);
                    }
                    if trial.max > res.max {
                        step = 1.0;
                        ut = un;
                        zt = zn;
                        trial = discrete_residual(problem, mesh, ops, &ut, &zt);
                    }
                }
                u = ut;
                z = zt;
                res = trial;
                let flags = vertex_activity(problem, mesh, &z);
                history.push(IterationRecord { iteration: k, residual: res.max, active: flags.count(), step });
                let repeated = flags == prev_flags;
                if res.max <= opts.tol * res.scale || (repeated && res.max <= 1e-9 * res.scale && k > 1) {
                    return Ok(finish(u, z, k, history));
                }
                prev_flags = flags;
            }
            Err(Error::ActiveSetCycle { iterations: opts.max_iter, residual: res.max })
        }
        Constraint::None => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{initial_mesh, uniform_bisect, DomainId};
    use crate::optsys::Setting;
    use std::sync::Arc;

    fn problem(alpha: f64) -> ProblemSpec {
        let mut p = ProblemSpec::new(DomainId::DistributedQuad, Setting::Distributed, alpha);
        p.data.source = Some(Arc::new(|x| 10.0 * x[0]));
        p.data.target = Some(Arc::new(|x| 5.0 * (3.0 * x[1]).sin()));
        p
    }

    #[test]
    fn infinite_bounds_equal_unconstrained() {
        let mesh = uniform_bisect(&initial_mesh(DomainId::DistributedQuad).unwrap(), 4);
        let p = problem(1e-2);
        let mut pb = p.clone();
        pb.constraint = Constraint::Box { lower: f64::NEG_INFINITY, upper: f64::INFINITY };
        let a = solve_optimality(&p, &mesh).unwrap();
        let b = solve_optimality(&pb, &mesh).unwrap();
        assert_eq!(a.u, b.u);
        assert_eq!(a.z, b.z);
    }

    #[test]
    fn constrained_residual_vanishes() {
        let mesh = uniform_bisect(&initial_mesh(DomainId::DistributedQuad).unwrap(), 6);
        let mut p = problem(1e-4);
        p.constraint = Constraint::Box { lower: -1.0, upper: 1.0 };
        let s = solve_optimality(&p, &mesh).unwrap();
        assert!(s.residual <= 1e-9 * s.residual_scale, "{}", s.history_dump());
        assert!(matches!(&s.active_set, ActiveSet::Vertices(v) if v.iter().any(|a| *a != Activity::Inactive)));
    }

    #[test]
    fn inactive_bounds_equal_unconstrained() {
        let mesh = uniform_bisect(&initial_mesh(DomainId::DistributedQuad).unwrap(), 4);
        let p = problem(1e2);
        let mut pb = p.clone();
        pb.constraint = Constraint::Box { lower: -1.0, upper: 1.0 };
        let a = solve_optimality(&p, &mesh).unwrap();
        let c = p.c();
        assert!(a.z.values.iter().all(|z| (c * z).abs() < 1.0));
        let b = solve_optimality(&pb, &mesh).unwrap();
        for (x, y) in a.z.values.iter().zip(&b.z.values) {
            assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn mean_constraint_becomes_active() {
        let mesh = uniform_bisect(&initial_mesh(DomainId::UnitSquare).unwrap(), 4);
        let mut p = ProblemSpec::new(DomainId::UnitSquare, Setting::Boundary, 1e-2);
        p.data.target = Some(Arc::new(|x| x[0] - 2.0));
        let unc = solve_optimality(&p, &mesh).unwrap();
        let q0 = unc.control(&p, &mesh).integral(&mesh, p.clamp_quadrature);
        p.constraint = Constraint::BoundaryMean { lower: q0 + 1.0 };
        let s = solve_optimality(&p, &mesh).unwrap();
        assert_eq!(s.active_set, ActiveSet::Mean(true));
        let q = s.control(&p, &mesh).integral(&mesh, p.clamp_quadrature);
        assert!(q >= q0 + 1.0 - 1e-10 * mesh.boundary_length());
        assert!(s.residual <= 1e-9 * s.residual_scale);
    }
}
