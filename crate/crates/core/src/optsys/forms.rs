//! The forms `b_α`, `c_α` and the distances `δ_α`, `d_α` on discrete pairs.

use super::control::Control;
use super::kkt::Operators;
use super::problem::ProblemSpec;
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// A pair `(v₁, v₂)` of P1 coefficient vectors on all vertices.
pub type Pair<'a> = (&'a [f64], &'a [f64]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormValues {
    pub b_v: f64,
    pub b_w: f64,
    pub c_v: f64,
    pub c_w: f64,
    pub delta: f64,
    pub d_alpha: f64,
    /// `|||v − w|||`.
    pub enorm_diff: f64,
    pub enorm_phi: f64,
    /// `‖v − w‖` in `V`.
    pub norm_diff: f64,
    pub norm_phi: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn c_form(problem: &ProblemSpec, mesh: &Mesh, ops: &Operators, v: Pair<'_>, phi: Pair<'_>) -> f64 {
    let q = Control::from_adjoint(problem, mesh, v.1).load(mesh, problem.clamp_quadrature);
    -dot(&q, phi.1) - problem.c() * ops.m_obs.bilinear(v.0, phi.0)
}

fn b_form(problem: &ProblemSpec, mesh: &Mesh, ops: &Operators, v: Pair<'_>, phi: Pair<'_>) -> (f64, f64) {
    let a = ops.a.bilinear(v.0, phi.1) + ops.a.bilinear(phi.0, v.1);
    let c = c_form(problem, mesh, ops, v, phi);
    (a + c, c)
}

/// `δ_α(v, w)`.
pub fn delta(problem: &ProblemSpec, mesh: &Mesh, ops: &Operators, v: Pair<'_>, w: Pair<'_>) -> f64 {
    let qv = Control::from_adjoint(problem, mesh, v.1);
    let qw = Control::from_adjoint(problem, mesh, w.1);
    let e1 = sub(v.0, w.0);
    let d2 = problem.alpha * qv.distance_sq(&qw, mesh, problem.clamp_quadrature) + ops.m_obs.bilinear(&e1, &e1);
    d2.max(0.0).sqrt()
}

/// Evaluates all forms for `v`, `w` and the test pair `φ`.
pub fn eval_forms(
    problem: &ProblemSpec,
    mesh: &Mesh,
    ops: &Operators,
    v: Pair<'_>,
    w: Pair<'_>,
    phi: Pair<'_>,
) -> Result<FormValues> {
    let n = mesh.num_vertices();
    for x in [v.0, v.1, w.0, w.1, phi.0, phi.1] {
        if x.len() != n {
            return Err(Error::MeshMismatch(format!("vector of length {} on a mesh with {n} vertices", x.len())));
        }
    }
    let (b_v, c_v) = b_form(problem, mesh, ops, v, phi);
    let (b_w, c_w) = b_form(problem, mesh, ops, w, phi);
    let e1 = sub(v.0, w.0);
    let e2 = sub(v.1, w.1);
    let vnorm = |a: &[f64], b: &[f64]| (ops.a.bilinear(a, a) + ops.a.bilinear(b, b)).max(0.0).sqrt();
    let enorm = |a: &[f64], b: &[f64]| (ops.m_obs.bilinear(a, a) + ops.m_ctrl.bilinear(b, b)).max(0.0).sqrt();
    let delta = delta(problem, mesh, ops, v, w);
    let norm_diff = vnorm(&e1, &e2);
    Ok(FormValues {
        b_v,
        b_w,
        c_v,
        c_w,
        delta,
        d_alpha: norm_diff + problem.c() * problem.m / problem.big_m_a * delta,
        enorm_diff: enorm(&e1, &e2),
        enorm_phi: enorm(phi.0, phi.1),
        norm_diff,
        norm_phi: vnorm(phi.0, phi.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{initial_mesh, uniform_bisect, DomainId};
    use crate::optsys::{Constraint, Setting};

    #[test]
    fn metric_vanishes_on_diagonal() {
        let mesh = uniform_bisect(&initial_mesh(DomainId::DistributedQuad).unwrap(), 3);
        let mut p = ProblemSpec::new(DomainId::DistributedQuad, Setting::Distributed, 0.01);
        p.constraint = Constraint::Box { lower: -1.0, upper: 1.0 };
        let ops = Operators::new(&p, &mesh).unwrap();
        let v1: Vec<f64> = mesh.vertices().iter().map(|x| x[0] * x[1]).collect();
        let v2: Vec<f64> = mesh.vertices().iter().map(|x| x[0] - x[1]).collect();
        let f = eval_forms(&p, &mesh, &ops, (&v1, &v2), (&v1, &v2), (&v2, &v1)).unwrap();
        assert_eq!(f.delta, 0.0);
        assert_eq!(f.d_alpha, 0.0);
        assert_eq!(f.b_v, f.b_w);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let mesh = initial_mesh(DomainId::UnitSquare).unwrap();
        let p = ProblemSpec::new(DomainId::UnitSquare, Setting::Distributed, 1.0);
        let ops = Operators::new(&p, &mesh).unwrap();
        let a = vec![0.0; 4];
        let b = vec![0.0; 3];
        assert!(matches!(eval_forms(&p, &mesh, &ops, (&a, &a), (&a, &b), (&a, &a)), Err(Error::MeshMismatch(_))));
    }
}
