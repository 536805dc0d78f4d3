//! Poisson problem `−Δu = 2π² sin(πx) sin(πy)` on the unit square, used as
//! a sanity check of the finite element layer.

use crate::error::Result;
use crate::estimator::StarIndicators;
use crate::fem::{apply_dirichlet, assemble_load, assemble_stiffness, grad_p1, solve_spd, Quadrature};
use crate::geometry::{self, Point};
use crate::mesh::{Mesh, Region};
use crate::optsys::control::order10;
use std::f64::consts::PI;

pub fn poisson_exact(x: Point) -> f64 {
    (PI * x[0]).sin() * (PI * x[1]).sin()
}

pub fn poisson_grad(x: Point) -> Point {
    [PI * (PI * x[0]).cos() * (PI * x[1]).sin(), PI * (PI * x[0]).sin() * (PI * x[1]).cos()]
}

pub fn poisson_source(x: Point) -> f64 {
    2.0 * PI * PI * poisson_exact(x)
}

/// P1 solution (all vertices) with homogeneous Dirichlet data.
pub fn poisson_solve(mesh: &Mesh) -> Result<Vec<f64>> {
    let k = assemble_stiffness(mesh, false)?;
    let b = assemble_load(mesh, Region::All, &poisson_source, &Quadrature::dunavant6())?;
    let sys = apply_dirichlet(&k, &b, mesh, &|_| 0.0);
    let x = solve_spd(&sys.matrix, &sys.rhs, 1e-12)?;
    Ok(sys.reconstruct(&x))
}

/// Full H¹ error of a P1 function against the exact solution.
pub fn poisson_h1_error(mesh: &Mesh, values: &[f64]) -> f64 {
    let rule = order10();
    let mut s = 0.0;
    for t in 0..mesh.num_triangles() {
        let p = mesh.coords(t);
        let v = mesh.triangles()[t].vertices;
        let g = grad_p1(mesh, values, t);
        s += rule.integrate(&p, mesh.area(t), |x, l| {
            let e = poisson_exact(x) - (l[0] * values[v[0]] + l[1] * values[v[1]] + l[2] * values[v[2]]);
            let d = geometry::sub(poisson_grad(x), g);
            e * e + geometry::dot(d, d)
        });
    }
    s.sqrt()
}

/// Residual indicators `h_T²‖f‖²_T + ½Σ h_E‖[∂_n U]‖²_E` summed over vertex stars.
pub fn poisson_indicators(mesh: &Mesh, values: &[f64]) -> StarIndicators {
    let rule = Quadrature::dunavant6();
    let mut eta_t: Vec<f64> = (0..mesh.num_triangles())
        .map(|t| {
            let p = mesh.coords(t);
            let h = geometry::diameter(&p);
            h * h * rule.integrate(&p, mesh.area(t), |x, _| poisson_source(x).powi(2))
        })
        .collect();
    let grads: Vec<Point> = (0..mesh.num_triangles()).map(|t| grad_p1(mesh, values, t)).collect();
    let topo = mesh.topology();
    for (e, tris) in topo.edge_triangles.iter().enumerate() {
        let (Some(t0), Some(t1)) = (tris[0], tris[1]) else { continue };
        let [a, b] = topo.edges[e];
        let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
        let h = geometry::dist(pa, pb);
        let n = [(pb[1] - pa[1]) / h, -(pb[0] - pa[0]) / h];
        let j = geometry::dot(geometry::sub(grads[t0], grads[t1]), n);
        eta_t[t0] += 0.5 * h * h * j * j;
        eta_t[t1] += 0.5 * h * h * j * j;
    }
    let mut eta = vec![0.0; mesh.num_vertices()];
    for (tri, e) in mesh.triangles().iter().zip(&eta_t) {
        tri.vertices.iter().for_each(|&k| eta[k] += e);
    }
    StarIndicators::from_parts(eta, mesh.stars().iter().map(|s| s.diameter).collect())
}
