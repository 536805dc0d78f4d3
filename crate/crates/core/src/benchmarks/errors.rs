//! Exact errors of a discrete solution against the closed-form solution.

use super::problems::ExactSolution;
use crate::error::{Error, Result};
use crate::fem::clip::{partition, Bary, ClampField};
use crate::fem::{grad_p1, Quadrature};
use crate::geometry::{self, Point};
use crate::mesh::Mesh;
use crate::optsys::control::order10;
use crate::optsys::{project_box, Constraint, DiscreteState, ProblemSpec, Setting};

/// Default number of 4-way subdivisions of elements touching the singular corner.
pub const DEFAULT_QUAD_DEPTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorRecord {
    pub dofs: usize,
    /// `‖x − X‖` in `V`.
    pub energy_error: f64,
    /// `δ_α(x, X)`.
    pub delta_term: f64,
    /// `‖x − X‖ + (M/M_a)(1/√α) δ_α(x, X)`.
    pub d_alpha_error: f64,
    /// `‖q − Q‖` on the control domain.
    pub control_error: f64,
    /// `‖u − U‖` and `‖z − Z‖` in the `V`-norm.
    pub state_error: f64,
    pub adjoint_error: f64,
    /// `|||x − X|||`.
    pub enorm_error: f64,
}

fn bary_mid(a: &Bary, b: &Bary) -> Bary {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

/// Sub-triangles (parent barycentric corners, area fraction) of a
/// `depth`-fold uniform 4-way split.
fn subdivide(depth: usize) -> Vec<([Bary; 3], f64)> {
    let mut tris = vec![([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 1.0)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(4 * tris.len());
        for (c, f) in &tris {
            let m01 = bary_mid(&c[0], &c[1]);
            let m12 = bary_mid(&c[1], &c[2]);
            let m20 = bary_mid(&c[2], &c[0]);
            let q = f / 4.0;
            next.push(([c[0], m01, m20], q));
            next.push(([m01, c[1], m12], q));
            next.push(([m20, m12, c[2]], q));
            next.push(([m01, m12, m20], q));
        }
        tris = next;
    }
    tris
}

fn map(c: &[Bary; 3], l: &Bary) -> Bary {
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = l[0] * c[0][k] + l[1] * c[1][k] + l[2] * c[2][k];
    }
    out
}

/// Quadrature points (parent barycentric, weight as area fraction) of
/// triangle `t`, refined near the corner and clipped along the kinks of an
/// optional clamp field (given in parent barycentric vertex values).
fn element_points(
    pieces_near_corner: &[([Bary; 3], f64)],
    field: Option<ClampField>,
    rule: &Quadrature,
) -> Vec<(Bary, f64)> {
    let mut out = Vec::new();
    for (c, frac) in pieces_near_corner {
        let parts = match field {
            Some(f) => {
                let vals = [
                    f.vals[0] * c[0][0] + f.vals[1] * c[0][1] + f.vals[2] * c[0][2],
                    f.vals[0] * c[1][0] + f.vals[1] * c[1][1] + f.vals[2] * c[1][2],
                    f.vals[0] * c[2][0] + f.vals[1] * c[2][1] + f.vals[2] * c[2][2],
                ];
                partition(&[ClampField { vals, ..f }])
            }
            None => vec![crate::fem::clip::SubTriangle::whole()],
        };
        for piece in parts {
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                out.push((map(c, &piece.map(l)), w * piece.fraction * frac));
            }
        }
    }
    out
}

/// Errors of `state` measured with order-10 quadrature; elements touching
/// the singular corner are split `quad_depth` times.
pub fn compute_errors(
    state: &DiscreteState,
    exact: &ExactSolution,
    problem: &ProblemSpec,
    mesh: &Mesh,
    quad_depth: usize,
) -> Result<ErrorRecord> {
    let n = mesh.num_vertices();
    if state.u.len() != n || state.z.len() != n {
        return Err(Error::MeshMismatch("discrete state belongs to another mesh".into()));
    }
    let rule = order10();
    let u = &state.u.values;
    let z = &state.z.values;
    let c = problem.c();
    let boundary = problem.setting == Setting::Boundary;
    let (lower, upper) = match problem.effective_constraint() {
        Constraint::Box { lower, upper } => (lower, upper),
        _ => (f64::NEG_INFINITY, f64::INFINITY),
    };
    let fine = subdivide(quad_depth);
    let whole = subdivide(0);

    let (mut su, mut sz, mut obs, mut ctrl, mut ctrl_adj) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.coords(t);
        let area = mesh.area(t);
        let v = tri.vertices;
        let corner = p.iter().any(|&x| geometry::dist(x, exact.corner) < 1e-14);
        let subs = if corner { &fine } else { &whole };
        let gu = grad_p1(mesh, u, t);
        let gz = grad_p1(mesh, z, t);
        let observed = boundary || problem.observation_region.contains(tri.subdomain);
        let controlled = !boundary && problem.control_region.contains(tri.subdomain);
        let field = controlled.then(|| ClampField { vals: [-c * z[v[0]], -c * z[v[1]], -c * z[v[2]]], lower, upper });
        for (l, w) in element_points(subs, field, rule) {
            let x = geometry::from_barycentric(&p, l);
            let wa = w * area;
            let eu = (exact.u)(x) - (l[0] * u[v[0]] + l[1] * u[v[1]] + l[2] * u[v[2]]);
            let ez = (exact.z)(x) - (l[0] * z[v[0]] + l[1] * z[v[1]] + l[2] * z[v[2]]);
            let dgu = geometry::sub((exact.grad_u)(x), gu);
            let dgz = geometry::sub((exact.grad_z)(x), gz);
            if !(eu.is_finite() && ez.is_finite() && dgu[0].is_finite() && dgz[0].is_finite()) {
                return Err(Error::Evaluation { x: x[0], y: x[1] });
            }
            su += wa * geometry::dot(dgu, dgu);
            sz += wa * geometry::dot(dgz, dgz);
            if boundary {
                su += wa * eu * eu;
                sz += wa * ez * ez;
            }
            if observed {
                obs += wa * eu * eu;
            }
            if let Some(f) = field {
                let qh = project_box(f.vals[0] * l[0] + f.vals[1] * l[1] + f.vals[2] * l[2], lower, upper);
                let dq = (exact.q)(x) - qh;
                ctrl += wa * dq * dq;
                ctrl_adj += wa * ez * ez;
            }
        }
    }
    if boundary {
        let lq = crate::fem::LineQuadrature::with_order(10);
        for e in mesh.boundary() {
            let [a, b] = e.vertices;
            let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
            let h = geometry::dist(pa, pb);
            // finer subdivision of the two edges at the corner
            let corner = [pa, pb].iter().any(|&x| geometry::dist(x, exact.corner) < 1e-14);
            let segs = if corner { 1usize << quad_depth } else { 1 };
            for k in 0..segs {
                for (&s, &w) in lq.points.iter().zip(&lq.weights) {
                    let sp = (k as f64 + s) / segs as f64;
                    let x: Point = [pa[0] + sp * (pb[0] - pa[0]), pa[1] + sp * (pb[1] - pa[1])];
                    let wh = w * h / segs as f64;
                    let eu = (exact.u)(x) - ((1.0 - sp) * u[a] + sp * u[b]);
                    let ez = (exact.z)(x) - ((1.0 - sp) * z[a] + sp * z[b]);
                    obs += wh * eu * eu;
                    // unconstrained boundary control: q − Q = −(z − Z)/√α
                    let dq = (exact.q)(x) - (-c * ((1.0 - sp) * z[a] + sp * z[b]));
                    ctrl += wh * dq * dq;
                    ctrl_adj += wh * ez * ez;
                }
            }
        }
        if problem.effective_constraint() != Constraint::None {
            return Err(Error::ConstrainedProblem);
        }
    }
    let energy = (su + sz).sqrt();
    let delta = (problem.alpha * ctrl + obs).sqrt();
    Ok(ErrorRecord {
        dofs: 0,
        energy_error: energy,
        delta_term: delta,
        d_alpha_error: energy + c * problem.m / problem.big_m_a * delta,
        control_error: ctrl.sqrt(),
        state_error: su.sqrt(),
        adjoint_error: sz.sqrt(),
        enorm_error: (obs + ctrl_adj).sqrt(),
    })
}
