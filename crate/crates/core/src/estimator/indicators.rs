//! Star-localised residual indicators for the coupled system.

use crate::error::{Error, Result};
use crate::fem::{grad_p1, Quadrature};
use crate::geometry::{self, Point};
use crate::mesh::Mesh;
use crate::optsys::control::clamped_points;
use crate::optsys::{Control, DiscreteState, ProblemSpec, Setting};

#[derive(Clone, Debug, PartialEq)]
pub struct StarIndicators {
    /// `η_z` per vertex.
    pub eta: Vec<f64>,
    /// Star diameters `h_z`.
    pub h: Vec<f64>,
    /// `Σ η_z²`.
    pub total_sq: f64,
    /// `Σ h_z² η_z²`.
    pub weighted_h2: f64,
    /// `Σ h_z η_z²`.
    pub weighted_h1: f64,
}

impl StarIndicators {
    pub fn from_parts(eta_sq: Vec<f64>, h: Vec<f64>) -> Self {
        let total_sq = eta_sq.iter().sum();
        let weighted_h2 = eta_sq.iter().zip(&h).map(|(e, h)| e * h * h).sum();
        let weighted_h1 = eta_sq.iter().zip(&h).map(|(e, h)| e * h).sum();
        StarIndicators { eta: eta_sq.iter().map(|e| e.sqrt()).collect(), h, total_sq, weighted_h2, weighted_h1 }
    }

    pub fn total(&self) -> f64 {
        self.total_sq.sqrt()
    }

    pub fn squared(&self) -> Vec<f64> {
        self.eta.iter().map(|e| e * e).collect()
    }

    /// `sqrt(Σ h_z² η_z² / Σ η_z²)` (distributed) or `sqrt(Σ h_z η_z² / Σ η_z²)` (boundary).
    pub fn compactness(&self, setting: Setting) -> f64 {
        if self.total_sq == 0.0 {
            return 0.0;
        }
        match setting {
            Setting::Distributed => (self.weighted_h2 / self.total_sq).sqrt(),
            Setting::Boundary => (self.weighted_h1 / self.total_sq).sqrt(),
        }
    }
}

fn opt(f: &Option<crate::optsys::Field>, x: Point) -> f64 {
    f.as_ref().map_or(0.0, |f| f(x))
}

fn opt_edge(f: &Option<crate::optsys::EdgeField>, x: Point, n: Point) -> f64 {
    f.as_ref().map_or(0.0, |f| f(x, n))
}

fn triangle_diameter(p: &[Point; 3]) -> f64 {
    geometry::dist(p[0], p[1]).max(geometry::dist(p[1], p[2])).max(geometry::dist(p[2], p[0]))
}

/// Element indicators `η_T² = h_T² ‖r‖²_T + ½ Σ_{E interior} h_E ‖j‖²_E
/// + Σ_{E ⊂ Γ_N} h_E ‖j‖²_E`, stacking both equations, summed over stars:
/// `η_z² = Σ_{T ∋ z} η_T²`. Every element and edge term is thus counted
/// exactly `d + 1 = 3` times in `Σ_z η_z²`.
pub fn star_indicators(state: &DiscreteState, problem: &ProblemSpec, mesh: &Mesh) -> Result<StarIndicators> {
    let n = mesh.num_vertices();
    if state.u.len() != n || state.z.len() != n {
        return Err(Error::MeshMismatch("discrete state belongs to another mesh".into()));
    }
    let u = &state.u.values;
    let z = &state.z.values;
    let c = problem.c();
    let d = &problem.data;
    let control = Control::from_adjoint(problem, mesh, z);
    let rule: &Quadrature = &problem.quadrature;
    let mut eta_t = vec![0.0; mesh.num_triangles()];

    let grads_u: Vec<Point> = (0..mesh.num_triangles()).map(|t| grad_p1(mesh, u, t)).collect();
    let grads_z: Vec<Point> = (0..mesh.num_triangles()).map(|t| grad_p1(mesh, z, t)).collect();

    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.coords(t);
        let area = mesh.area(t);
        let v = tri.vertices;
        let observed = match problem.setting {
            Setting::Distributed => problem.observation_region.contains(tri.subdomain),
            Setting::Boundary => true,
        };
        let points = match control.field(mesh, t) {
            Some(f) => clamped_points(&[f], problem.clamp_quadrature, Some(rule)),
            None => rule.points.iter().copied().zip(rule.weights.iter().copied()).collect(),
        };
        let mut s = 0.0;
        for (l, w) in points {
            let x = geometry::from_barycentric(&p, l);
            let uh = l[0] * u[v[0]] + l[1] * u[v[1]] + l[2] * u[v[2]];
            let zh = l[0] * z[v[0]] + l[1] * z[v[1]] + l[2] * z[v[2]];
            let (r1, r2) = match problem.setting {
                Setting::Distributed => {
                    let obs = if observed { c * (uh - opt(&d.target, x)) } else { 0.0 };
                    (obs + opt(&d.adjoint_source, x), opt(&d.source, x) + control.eval(mesh, t, l))
                }
                Setting::Boundary => (
                    c * (uh - opt(&d.target, x)) + opt(&d.adjoint_source, x) - zh,
                    opt(&d.source, x) - uh,
                ),
            };
            if !(r1.is_finite() && r2.is_finite()) {
                return Err(Error::Evaluation { x: x[0], y: x[1] });
            }
            s += w * (r1 * r1 + r2 * r2);
        }
        let h = triangle_diameter(&p);
        eta_t[t] += h * h * s * area;
    }

    // interior jumps of the normal derivatives
    let topo = mesh.topology();
    for (e, tris) in topo.edge_triangles.iter().enumerate() {
        let (Some(t0), Some(t1)) = (tris[0], tris[1]) else { continue };
        let [a, b] = topo.edges[e];
        let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
        let h = geometry::dist(pa, pb);
        let nrm = [(pb[1] - pa[1]) / h, -(pb[0] - pa[0]) / h];
        let ju = geometry::dot(geometry::sub(grads_u[t0], grads_u[t1]), nrm);
        let jz = geometry::dot(geometry::sub(grads_z[t0], grads_z[t1]), nrm);
        let half = 0.5 * h * h * (ju * ju + jz * jz);
        eta_t[t0] += half;
        eta_t[t1] += half;
    }

    if problem.setting == Setting::Boundary {
        let vt = mesh.vertex_triangles();
        let lq = &problem.edge_quadrature;
        for edge in mesh.boundary() {
            let [a, b] = edge.vertices;
            let t = *vt[a].iter().find(|&&t| mesh.triangles()[t].vertices.contains(&b)).expect("boundary edge has a triangle");
            let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
            let h = geometry::dist(pa, pb);
            let nrm = mesh.outward_normal(edge);
            let dnu = geometry::dot(grads_u[t], nrm);
            let dnz = geometry::dot(grads_z[t], nrm);
            let mut s = 0.0;
            for (&sp, &w) in lq.points.iter().zip(&lq.weights) {
                let x = [pa[0] + sp * (pb[0] - pa[0]), pa[1] + sp * (pb[1] - pa[1])];
                let uh = (1.0 - sp) * u[a] + sp * u[b];
                let q = control.eval_edge(a, b, sp);
                let j2 = opt_edge(&d.state_boundary, x, nrm) + q - dnu;
                let j1 = c * (uh - opt_edge(&d.boundary_target, x, nrm)) + opt_edge(&d.adjoint_flux, x, nrm) - dnz;
                if !(j1.is_finite() && j2.is_finite()) {
                    return Err(Error::Evaluation { x: x[0], y: x[1] });
                }
                s += w * (j1 * j1 + j2 * j2);
            }
            eta_t[t] += h * h * s;
        }
    }

    let mut eta_sq = vec![0.0; n];
    for (tri, e) in mesh.triangles().iter().zip(&eta_t) {
        for &k in &tri.vertices {
            eta_sq[k] += e;
        }
    }
    let h: Vec<f64> = mesh.stars().iter().map(|s| s.diameter).collect();
    Ok(StarIndicators::from_parts(eta_sq, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{initial_mesh, uniform_bisect, DomainId};
    use crate::optsys::solve_optimality;
    use std::sync::Arc;

    #[test]
    fn affine_distributed_solution_has_zero_indicators() {
        let mesh = uniform_bisect(&initial_mesh(DomainId::UnitSquare).unwrap(), 3);
        let mut p = ProblemSpec::new(DomainId::UnitSquare, Setting::Distributed, 1.0);
        let u = |x: Point| 1.0 + 2.0 * x[0] - x[1];
        p.data.target = Some(Arc::new(u));
        p.data.state_boundary = Some(Arc::new(move |x, _| u(x)));
        let s = solve_optimality(&p, &mesh).unwrap();
        let ind = star_indicators(&s, &p, &mesh).unwrap();
        assert!(ind.eta.iter().all(|e| *e <= 1e-10), "{:?}", ind.eta);
    }

    #[test]
    fn affine_boundary_solution_has_zero_indicators() {
        let mesh = uniform_bisect(&initial_mesh(DomainId::UnitSquare).unwrap(), 3);
        let mut p = ProblemSpec::new(DomainId::UnitSquare, Setting::Boundary, 0.25);
        let c = p.c();
        let u = |x: Point| 1.0 + 2.0 * x[0] - x[1];
        let z = |x: Point| 0.5 - x[0] + 3.0 * x[1];
        let gu = [2.0, -1.0];
        let gz = [-1.0, 3.0];
        p.data.source = Some(Arc::new(u));
        p.data.state_boundary = Some(Arc::new(move |x, n| geometry::dot(gu, n) + c * z(x)));
        p.data.adjoint_source = Some(Arc::new(move |x| z(x) - c * u(x)));
        p.data.adjoint_flux = Some(Arc::new(move |x, n| geometry::dot(gz, n) - c * u(x)));
        let s = solve_optimality(&p, &mesh).unwrap();
        for (v, x) in mesh.vertices().iter().enumerate() {
            assert!((s.u.values[v] - u(*x)).abs() < 1e-10);
            assert!((s.z.values[v] - z(*x)).abs() < 1e-10);
        }
        let ind = star_indicators(&s, &p, &mesh).unwrap();
        assert!(ind.eta.iter().all(|e| *e <= 1e-10), "{:?}", ind.eta);
    }

    #[test]
    fn zero_data_zero_indicators() {
        let mesh = uniform_bisect(&initial_mesh(DomainId::DistributedQuad).unwrap(), 2);
        let p = ProblemSpec::new(DomainId::DistributedQuad, Setting::Distributed, 1e-2);
        let s = solve_optimality(&p, &mesh).unwrap();
        let ind = star_indicators(&s, &p, &mesh).unwrap();
        assert!(ind.eta.iter().all(|e| *e == 0.0));
    }

    #[test]
    fn totals_are_sums() {
        let ind = StarIndicators::from_parts(vec![1.0, 4.0], vec![0.5, 0.25]);
        assert_eq!(ind.total_sq, 5.0);
        assert!((ind.compactness(Setting::Distributed) - 0.1f64.sqrt()).abs() < 1e-15);
        assert!((ind.compactness(Setting::Boundary) - (1.5f64 / 5.0).sqrt()).abs() < 1e-15);
    }
}
