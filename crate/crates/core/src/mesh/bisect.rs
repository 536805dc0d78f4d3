//! Newest-vertex bisection with conforming closure.

use super::{BoundaryEdge, Mesh, Triangle};
use crate::geometry;
use std::collections::HashMap;

#[inline]
fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Refines every marked triangle at least once and restores conformity by
/// bisecting the refinement edges of neighbours as required.
///
/// Children inherit the subdomain tag; split boundary edges inherit kind and
/// segment. Out-of-range indices in `marked` are ignored.
pub fn bisect(mesh: &Mesh, marked: &[usize]) -> Mesh {
    bisect_with_parents(mesh, marked).0
}

/// Like [`bisect`], also returning the parent edge of every new vertex.
/// New vertex `mesh.num_vertices() + k` is the midpoint of `parents[k]`.
pub fn bisect_with_parents(mesh: &Mesh, marked: &[usize]) -> (Mesh, Vec<[usize; 2]>) {
    let tris = mesh.triangles();
    let topo = mesh.topology();
    let ne = topo.edges.len();
    let mut edge_marked = vec![false; ne];

    // refinement edge of triangle t = edge opposite local vertex 0
    let mut queue: Vec<usize> = Vec::new();
    for &t in marked {
        if t < tris.len() {
            let e = topo.triangle_edges[t][0];
            if !edge_marked[e] {
                edge_marked[e] = true;
                queue.push(e);
            }
        }
    }
    while let Some(e) = queue.pop() {
        for t in topo.edge_triangles[e].iter().flatten() {
            let re = topo.triangle_edges[*t][0];
            if !edge_marked[re] {
                edge_marked[re] = true;
                queue.push(re);
            }
        }
    }

    let mut vertices = mesh.vertices().to_vec();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut parents = Vec::new();
    for (e, &m) in edge_marked.iter().enumerate() {
        if m {
            let [a, b] = topo.edges[e];
            vertices.push(geometry::midpoint(vertices[a], vertices[b]));
            midpoint.insert((a, b), vertices.len() - 1);
            parents.push([a, b]);
        }
    }

    let mut out = Vec::with_capacity(tris.len() + 2 * midpoint.len());
    for tri in tris {
        split(*tri, &midpoint, &mut out);
    }

    let mut boundary = Vec::with_capacity(mesh.boundary().len() + midpoint.len());
    for e in mesh.boundary() {
        let [a, b] = e.vertices;
        match midpoint.get(&key(a, b)) {
            Some(&m) => {
                boundary.push(BoundaryEdge { vertices: [a, m], ..*e });
                boundary.push(BoundaryEdge { vertices: [m, b], ..*e });
            }
            None => boundary.push(*e),
        }
    }
    (Mesh::from_parts_unchecked(vertices, out, boundary), parents)
}

/// Prolongs P1 nodal values to the refined mesh (midpoint averaging).
pub fn prolong(values: &[f64], parents: &[[usize; 2]]) -> Vec<f64> {
    let mut out = values.to_vec();
    out.reserve(parents.len());
    for &[a, b] in parents {
        out.push(0.5 * (out[a] + out[b]));
    }
    out
}

fn split(tri: Triangle, midpoint: &HashMap<(usize, usize), usize>, out: &mut Vec<Triangle>) {
    let [v0, v1, v2] = tri.vertices;
    match midpoint.get(&key(v1, v2)) {
        Some(&m) => {
            let generation = tri.generation + 1;
            let a = Triangle { vertices: [m, v0, v1], generation, ..tri };
            let b = Triangle { vertices: [m, v2, v0], generation, ..tri };
            split(a, midpoint, out);
            split(b, midpoint, out);
        }
        None => out.push(tri),
    }
}

/// Bisects every triangle `sweeps` times.
pub fn uniform_bisect(mesh: &Mesh, sweeps: usize) -> Mesh {
    let mut m = mesh.clone();
    for _ in 0..sweeps {
        let all: Vec<usize> = (0..m.num_triangles()).collect();
        m = bisect(&m, &all);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{initial_mesh, DomainId};

    #[test]
    fn one_marked_square_triangle() {
        let m = initial_mesh(DomainId::UnitSquare).unwrap();
        let r = bisect(&m, &[0]);
        // both triangles share the diagonal as refinement edge
        assert_eq!(r.num_triangles(), 4);
        assert_eq!(r.num_vertices(), 5);
        r.check_conformity().unwrap();
    }

    #[test]
    fn prolongation_reproduces_affine() {
        let m = initial_mesh(DomainId::DistributedQuad).unwrap();
        let f = |p: crate::Point| 2.0 * p[0] - 3.0 * p[1] + 0.5;
        let vals: Vec<f64> = m.vertices().iter().map(|&p| f(p)).collect();
        let (r, parents) = bisect_with_parents(&m, &[0, 1]);
        let fine = prolong(&vals, &parents);
        for (p, v) in r.vertices().iter().zip(&fine) {
            assert!((f(*p) - v).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_counts_unit_square() {
        let m = initial_mesh(DomainId::UnitSquare).unwrap();
        let counts: Vec<usize> =
            (1..=3).map(|k| uniform_bisect(&m, k).num_triangles()).collect();
        assert_eq!(counts, vec![4, 8, 16]);
    }

    #[test]
    fn empty_marking_is_identity() {
        let m = initial_mesh(DomainId::DistributedQuad).unwrap();
        assert_eq!(bisect(&m, &[]), m);
    }

    #[test]
    fn incompatible_neighbour_closure() {
        // the Q triangle's refinement edge is the diagonal, the W triangle's
        // is the top edge: refining Q forces W to split twice
        let m = initial_mesh(DomainId::DistributedQuad).unwrap();
        let r = bisect(&m, &[0]);
        r.check_conformity().unwrap();
        assert_eq!(r.num_triangles(), 5);
        assert!((r.total_area() - m.total_area()).abs() < 1e-15);
    }

    #[test]
    fn children_keep_tags() {
        let m = initial_mesh(DomainId::DistributedQuad).unwrap();
        let r = uniform_bisect(&m, 4);
        let q: f64 = (0..r.num_triangles())
            .filter(|&t| r.triangles()[t].subdomain == crate::mesh::Subdomain::Control)
            .map(|t| r.area(t))
            .sum();
        assert!((q - 0.5).abs() < 1e-14);
    }
}
