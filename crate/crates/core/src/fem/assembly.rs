//! P1 element matrices and global assembly.

use super::quadrature::{LineQuadrature, Quadrature};
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::mesh::{BoundaryKind, Mesh, Region};

/// Gradients of the three barycentric coordinates and the triangle area.
pub fn p1_gradients(p: &[Point; 3]) -> ([Point; 3], f64) {
    let area = geometry::signed_area(p[0], p[1], p[2]);
    let s = 0.5 / area;
    let g = |a: Point, b: Point| [(a[1] - b[1]) * s, (b[0] - a[0]) * s];
    ([g(p[1], p[2]), g(p[2], p[0]), g(p[0], p[1])], area)
}

pub fn element_stiffness(p: &[Point; 3]) -> [[f64; 3]; 3] {
    let (g, area) = p1_gradients(p);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * geometry::dot(g[i], g[j]);
        }
    }
    k
}

pub fn element_mass(area: f64) -> [[f64; 3]; 3] {
    let d = area / 6.0;
    let o = area / 12.0;
    [[d, o, o], [o, d, o], [o, o, d]]
}

/// Vertex adjacency rows including the diagonal: the P1 sparsity pattern.
pub fn p1_pattern(mesh: &Mesh) -> Vec<Vec<usize>> {
    let mut adj = mesh.vertex_neighbors();
    for (i, row) in adj.iter_mut().enumerate() {
        let pos = row.binary_search(&i).unwrap_err();
        row.insert(pos, i);
    }
    adj
}

fn checked_area(mesh: &Mesh, t: usize) -> Result<f64> {
    let a = mesh.area(t);
    if a > 0.0 {
        Ok(a)
    } else {
        Err(Error::DegenerateTriangle { index: t, area: a })
    }
}

/// Matrix of `∫∇u·∇v` (plus `∫uv` when `with_mass`).
pub fn assemble_stiffness(mesh: &Mesh, with_mass: bool) -> Result<CsrMatrix> {
    let mut m = CsrMatrix::with_pattern(mesh.num_vertices(), &p1_pattern(mesh));
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = checked_area(mesh, t)?;
        let k = element_stiffness(&mesh.coords(t));
        let ms = element_mass(area);
        for i in 0..3 {
            for j in 0..3 {
                let v = if with_mass { k[i][j] + ms[i][j] } else { k[i][j] };
                m.add(tri.vertices[i], tri.vertices[j], v);
            }
        }
    }
    Ok(m)
}

/// Mass matrix restricted to the triangles of `region`; the pattern is the
/// full P1 pattern so it can be combined with other global matrices.
pub fn assemble_mass(mesh: &Mesh, region: Region) -> Result<CsrMatrix> {
    let mut m = CsrMatrix::with_pattern(mesh.num_vertices(), &p1_pattern(mesh));
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if !region.contains(tri.subdomain) {
            continue;
        }
        let ms = element_mass(checked_area(mesh, t)?);
        for i in 0..3 {
            for j in 0..3 {
                m.add(tri.vertices[i], tri.vertices[j], ms[i][j]);
            }
        }
    }
    Ok(m)
}

/// One-dimensional mass matrix on boundary edges of the given kind (all edges for `None`).
pub fn assemble_boundary_mass(mesh: &Mesh, kind: Option<BoundaryKind>) -> CsrMatrix {
    let mut m = CsrMatrix::with_pattern(mesh.num_vertices(), &p1_pattern(mesh));
    for e in mesh.boundary() {
        if kind.is_some_and(|k| k != e.kind) {
            continue;
        }
        let [a, b] = e.vertices;
        let h = geometry::dist(mesh.vertices()[a], mesh.vertices()[b]);
        m.add(a, a, h / 3.0);
        m.add(b, b, h / 3.0);
        m.add(a, b, h / 6.0);
        m.add(b, a, h / 6.0);
    }
    m
}

fn finite(v: f64, x: Point) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { x: x[0], y: x[1] })
    }
}

/// Load vector `∫_region f φ_i`.
pub fn assemble_load(
    mesh: &Mesh,
    region: Region,
    f: &dyn Fn(Point) -> f64,
    quad: &Quadrature,
) -> Result<Vec<f64>> {
    let mut b = vec![0.0; mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if !region.contains(tri.subdomain) {
            continue;
        }
        let p = mesh.coords(t);
        let area = checked_area(mesh, t)?;
        for (l, w) in quad.points.iter().zip(&quad.weights) {
            let x = geometry::from_barycentric(&p, *l);
            let v = finite(f(x), x)? * w * area;
            for k in 0..3 {
                b[tri.vertices[k]] += v * l[k];
            }
        }
    }
    Ok(b)
}

/// Boundary load `∫_E g(x, n) φ_i` over edges of the given kind; `n` is the outward normal.
pub fn assemble_boundary_load(
    mesh: &Mesh,
    kind: Option<BoundaryKind>,
    g: &dyn Fn(Point, Point) -> f64,
    quad: &LineQuadrature,
) -> Result<Vec<f64>> {
    let mut b = vec![0.0; mesh.num_vertices()];
    for e in mesh.boundary() {
        if kind.is_some_and(|k| k != e.kind) {
            continue;
        }
        let [ia, ib] = e.vertices;
        let (pa, pb) = (mesh.vertices()[ia], mesh.vertices()[ib]);
        let h = geometry::dist(pa, pb);
        let n = mesh.outward_normal(e);
        for (&s, &w) in quad.points.iter().zip(&quad.weights) {
            let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            let v = finite(g(x, n), x)? * w * h;
            b[ia] += v * (1.0 - s);
            b[ib] += v * s;
        }
    }
    Ok(b)
}

/// Vertex interpolant of `f`.
pub fn interpolate(mesh: &Mesh, f: &dyn Fn(Point) -> f64) -> Vec<f64> {
    mesh.vertices().iter().map(|&p| f(p)).collect()
}

/// Evaluates a P1 function at barycentric point `l` of triangle `t`.
#[inline]
pub fn eval_p1(mesh: &Mesh, values: &[f64], t: usize, l: [f64; 3]) -> f64 {
    let v = mesh.triangles()[t].vertices;
    l[0] * values[v[0]] + l[1] * values[v[1]] + l[2] * values[v[2]]
}

/// Constant gradient of a P1 function on triangle `t`.
#[inline]
pub fn grad_p1(mesh: &Mesh, values: &[f64], t: usize) -> Point {
    let v = mesh.triangles()[t].vertices;
    let (g, _) = p1_gradients(&mesh.coords(t));
    let mut out = [0.0; 2];
    for k in 0..3 {
        out[0] += values[v[k]] * g[k][0];
        out[1] += values[v[k]] * g[k][1];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{initial_mesh, uniform_bisect, DomainId, Subdomain};

    #[test]
    fn reference_stiffness() {
        let k = element_stiffness(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn global_identities() {
        let m = uniform_bisect(&initial_mesh(DomainId::DistributedQuad).unwrap(), 5);
        let a = assemble_stiffness(&m, false).unwrap();
        let ones = vec![1.0; m.num_vertices()];
        assert!(a.matvec(&ones).iter().all(|v| v.abs() < 1e-13));
        assert!(a.asymmetry() < 1e-12);
        let mass = assemble_mass(&m, Region::All).unwrap();
        assert!((mass.bilinear(&ones, &ones) - 1.5).abs() < 1e-13);
        let mq = assemble_mass(&m, Region::Tagged(Subdomain::Control)).unwrap();
        assert!((mq.bilinear(&ones, &ones) - 0.5).abs() < 1e-13);
        // a vertex strictly inside the observation triangle has a zero row in the control mass
        let inside = m
            .vertices()
            .iter()
            .position(|p| p[0] < -0.01 && p[1] > p[0].abs() + 0.01 && p[1] < 0.99)
            .unwrap();
        assert!(mq.row(inside).1.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn boundary_mass_perimeter() {
        let m = uniform_bisect(&initial_mesh(DomainId::UnitSquare).unwrap(), 4);
        let mb = assemble_boundary_mass(&m, None);
        let ones = vec![1.0; m.num_vertices()];
        assert!((mb.bilinear(&ones, &ones) - 4.0).abs() < 1e-13);
        let interior = m.boundary_vertices().iter().position(|b| !b).unwrap();
        assert!(mb.row(interior).1.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn load_of_x_on_reference_triangle() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let t = vec![crate::mesh::Triangle {
            vertices: [0, 1, 2],
            subdomain: Subdomain::Plain,
            generation: 0,
        }];
        let m = Mesh::new(v, t, vec![]).unwrap();
        let b = assemble_load(&m, Region::All, &|x| x[0], &Quadrature::dunavant6()).unwrap();
        for (got, want) in b.iter().zip([1.0 / 24.0, 1.0 / 12.0, 1.0 / 24.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn non_finite_data_is_reported() {
        let m = initial_mesh(DomainId::UnitSquare).unwrap();
        let r = assemble_load(&m, Region::All, &|_| f64::NAN, &Quadrature::centroid());
        assert!(matches!(r, Err(Error::Evaluation { .. })));
    }
}
