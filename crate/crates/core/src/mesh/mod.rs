//! Conforming triangulations of polygonal domains.
//!
//! Triangles are stored counter-clockwise with the *newest vertex* first, so
//! the refinement edge of `vertices = [v0, v1, v2]` is always `v1 v2`.

mod bisect;
mod domains;
mod io;

pub use bisect::{bisect, bisect_with_parents, prolong, uniform_bisect};
pub use domains::{initial_mesh, DomainId};
pub use io::{read_mesh, write_mesh};

use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Element tag distinguishing the control and observation regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subdomain {
    Plain,
    Control,
    Observation,
}

impl Subdomain {
    pub fn code(self) -> u8 {
        match self {
            Subdomain::Plain => 0,
            Subdomain::Control => 1,
            Subdomain::Observation => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Subdomain::Plain),
            1 => Ok(Subdomain::Control),
            2 => Ok(Subdomain::Observation),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

impl FromStr for Subdomain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" | "plain" | "omega" => Ok(Subdomain::Plain),
            "1" | "Q" | "control" => Ok(Subdomain::Control),
            "2" | "W" | "observation" => Ok(Subdomain::Observation),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

/// A set of elements selected by tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    All,
    Tagged(Subdomain),
}

impl Region {
    #[inline]
    pub fn contains(self, tag: Subdomain) -> bool {
        match self {
            Region::All => true,
            Region::Tagged(t) => t == tag,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub subdomain: Subdomain,
    pub generation: u32,
}

/// Boundary edge oriented so that the domain lies to its left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub kind: BoundaryKind,
    pub segment: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<Triangle>,
    boundary: Vec<BoundaryEdge>,
}

/// Patch of all elements sharing a vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Star {
    pub center: usize,
    pub elements: Vec<usize>,
    /// Diameter of the vertex set of the patch.
    pub diameter: f64,
    pub on_boundary: bool,
}

/// Edge-based adjacency derived from a mesh.
#[derive(Clone, Debug)]
pub struct Topology {
    /// Sorted vertex pair of every edge.
    pub edges: Vec<[usize; 2]>,
    /// One or two adjacent triangles.
    pub edge_triangles: Vec<[Option<usize>; 2]>,
    /// `triangle_edges[t][k]` is the edge opposite local vertex `k`.
    pub triangle_edges: Vec<[usize; 3]>,
}

impl Mesh {
    /// Builds a mesh, orienting triangles counter-clockwise and rejecting
    /// degenerate ones. The first listed vertex of each triangle is taken as
    /// the one opposite its refinement edge.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<Triangle>,
        boundary: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let nv = vertices.len();
        let mut triangles = triangles;
        for (index, t) in triangles.iter_mut().enumerate() {
            if t.vertices.iter().any(|&v| v >= nv) {
                return Err(Error::MeshFormat(format!(
                    "triangle {index} references a missing vertex"
                )));
            }
            let [a, b, c] = t.vertices.map(|v| vertices[v]);
            let area = geometry::signed_area(a, b, c);
            let scale = geometry::diameter(&[a, b, c]).powi(2);
            if !(area.abs() > 1e-14 * scale) || !area.is_finite() {
                return Err(Error::DegenerateTriangle { index, area });
            }
            if area < 0.0 {
                t.vertices.swap(1, 2);
            }
        }
        for e in &boundary {
            if e.vertices.iter().any(|&v| v >= nv) {
                return Err(Error::MeshFormat("boundary edge references a missing vertex".into()));
            }
        }
        let mut mesh = Mesh { vertices, triangles, boundary };
        mesh.orient_boundary();
        Ok(mesh)
    }

    pub(crate) fn from_parts_unchecked(
        vertices: Vec<Point>,
        triangles: Vec<Triangle>,
        boundary: Vec<BoundaryEdge>,
    ) -> Self {
        Mesh { vertices, triangles, boundary }
    }

    fn orient_boundary(&mut self) {
        let mut directed: HashMap<(usize, usize), ()> = HashMap::new();
        for t in &self.triangles {
            let v = t.vertices;
            for k in 0..3 {
                directed.insert((v[k], v[(k + 1) % 3]), ());
            }
        }
        for e in &mut self.boundary {
            let [a, b] = e.vertices;
            if !directed.contains_key(&(a, b)) && directed.contains_key(&(b, a)) {
                e.vertices = [b, a];
            }
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn coords(&self, t: usize) -> [Point; 3] {
        self.triangles[t].vertices.map(|v| self.vertices[v])
    }

    #[inline]
    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.coords(t);
        geometry::signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary
            .iter()
            .map(|e| geometry::dist(self.vertices[e.vertices[0]], self.vertices[e.vertices[1]]))
            .sum()
    }

    /// Largest element diameter.
    pub fn max_h(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| geometry::diameter(&self.coords(t)))
            .fold(0.0, f64::max)
    }

    pub fn min_angle(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| geometry::min_angle(&self.coords(t)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Flags vertices lying on a Dirichlet edge.
    pub fn dirichlet_vertices(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_vertices()];
        for e in &self.boundary {
            if e.kind == BoundaryKind::Dirichlet {
                flags[e.vertices[0]] = true;
                flags[e.vertices[1]] = true;
            }
        }
        flags
    }

    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_vertices()];
        for e in &self.boundary {
            flags[e.vertices[0]] = true;
            flags[e.vertices[1]] = true;
        }
        flags
    }

    /// Outward unit normal of a boundary edge.
    pub fn outward_normal(&self, e: &BoundaryEdge) -> Point {
        let d = geometry::sub(self.vertices[e.vertices[1]], self.vertices[e.vertices[0]]);
        let len = d[0].hypot(d[1]);
        [d[1] / len, -d[0] / len]
    }

    /// Triangles incident to each vertex, in increasing index order.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_vertices()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in &tri.vertices {
                out[v].push(t);
            }
        }
        out
    }

    /// Symmetric vertex adjacency (excluding the vertex itself), sorted.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for tri in &self.triangles {
            let v = tri.vertices;
            for a in 0..3 {
                for b in 0..3 {
                    if a != b {
                        adj[v[a]].push(v[b]);
                    }
                }
            }
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        adj
    }

    pub fn stars(&self) -> Vec<Star> {
        let on_boundary = self.boundary_vertices();
        self.vertex_triangles()
            .into_iter()
            .enumerate()
            .map(|(center, elements)| {
                let mut pts: Vec<usize> =
                    elements.iter().flat_map(|&t| self.triangles[t].vertices).collect();
                pts.sort_unstable();
                pts.dedup();
                let mut diameter = 0.0f64;
                for (i, &a) in pts.iter().enumerate() {
                    for &b in &pts[i + 1..] {
                        diameter = diameter.max(geometry::dist(self.vertices[a], self.vertices[b]));
                    }
                }
                Star { center, elements, diameter, on_boundary: on_boundary[center] }
            })
            .collect()
    }

    pub fn topology(&self) -> Topology {
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_triangles: Vec<[Option<usize>; 2]> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(self.num_triangles());
        for (t, tri) in self.triangles.iter().enumerate() {
            let v = tri.vertices;
            let mut te = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (v[(k + 1) % 3], v[(k + 2) % 3]);
                let key = (a.min(b), a.max(b));
                let id = *index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_triangles.push([None, None]);
                    edges.len() - 1
                });
                let slot = &mut edge_triangles[id];
                if slot[0].is_none() {
                    slot[0] = Some(t);
                } else if slot[1].is_none() {
                    slot[1] = Some(t);
                } else {
                    // third triangle on one edge: flagged by `check_conformity`
                    slot[1] = Some(usize::MAX);
                }
                te[k] = id;
            }
            triangle_edges.push(te);
        }
        Topology { edges, edge_triangles, triangle_edges }
    }

    /// Verifies conformity: every edge is shared by at most two triangles and
    /// the edges owned by a single triangle are exactly the boundary edges.
    pub fn check_conformity(&self) -> Result<()> {
        let topo = self.topology();
        let mut boundary: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &self.boundary {
            let [a, b] = e.vertices;
            *boundary.entry((a.min(b), a.max(b))).or_default() += 1;
        }
        for (id, pair) in topo.edge_triangles.iter().enumerate() {
            let [a, b] = topo.edges[id];
            match pair {
                [Some(_), Some(t)] if *t == usize::MAX => {
                    return Err(Error::MeshFormat(format!("edge ({a},{b}) shared by 3+ triangles")))
                }
                [Some(_), Some(_)] => {
                    if boundary.contains_key(&(a, b)) {
                        return Err(Error::MeshFormat(format!(
                            "interior edge ({a},{b}) listed as boundary"
                        )));
                    }
                }
                _ => match boundary.get(&(a, b)) {
                    Some(1) => {}
                    _ => {
                        return Err(Error::MeshFormat(format!(
                            "edge ({a},{b}) has one neighbour but is not a boundary edge (hanging node?)"
                        )))
                    }
                },
            }
        }
        let owned = topo.edge_triangles.iter().filter(|p| p[1].is_none()).count();
        if owned != self.boundary.len() {
            return Err(Error::MeshFormat("boundary edge list does not match the mesh".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Mesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} vertices, {} triangles, {} boundary edges",
            self.num_vertices(),
            self.num_triangles(),
            self.boundary.len()
        )
    }
}
