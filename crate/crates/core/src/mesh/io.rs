//! Plain-text mesh format.
//!
//! ```text
//! V T E
//! x y                 (V lines)
//! i j k tag refedge   (T lines; refedge = local index of the vertex opposite the refinement edge)
//! i j kind            (E lines; kind = D<segment> or N<segment>)
//! ```
//! Blank lines and `#` comments are ignored.

use super::{BoundaryEdge, BoundaryKind, Mesh, Subdomain, Triangle};
use crate::error::{Error, Result};
use std::fmt::Write as _;

fn bad(msg: impl Into<String>) -> Error {
    Error::MeshFormat(msg.into())
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<T> {
    tok.ok_or_else(|| bad(format!("line {line}: missing {what}")))?
        .parse()
        .map_err(|_| bad(format!("line {line}: invalid {what}")))
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (n, header) = lines.next().ok_or_else(|| bad("empty mesh file"))?;
    let mut h = header.split_whitespace();
    let nv: usize = parse(h.next(), "vertex count", n)?;
    let nt: usize = parse(h.next(), "triangle count", n)?;
    let ne: usize = parse(h.next(), "edge count", n)?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines.next().ok_or_else(|| bad("truncated vertex block"))?;
        let mut t = l.split_whitespace();
        let x: f64 = parse(t.next(), "x", n)?;
        let y: f64 = parse(t.next(), "y", n)?;
        vertices.push([x, y]);
    }

    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, l) = lines.next().ok_or_else(|| bad("truncated triangle block"))?;
        let mut t = l.split_whitespace();
        let mut v = [0usize; 3];
        for slot in &mut v {
            *slot = parse(t.next(), "vertex index", n)?;
        }
        let tag: Subdomain = t.next().ok_or_else(|| bad(format!("line {n}: missing tag")))?.parse()?;
        let r: usize = parse(t.next(), "refedge", n)?;
        if r > 2 {
            return Err(bad(format!("line {n}: refedge must be 0, 1 or 2")));
        }
        v.rotate_left(r);
        triangles.push(Triangle { vertices: v, subdomain: tag, generation: 0 });
    }

    let mut boundary = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (n, l) = lines.next().ok_or_else(|| bad("truncated edge block"))?;
        let mut t = l.split_whitespace();
        let a: usize = parse(t.next(), "vertex index", n)?;
        let b: usize = parse(t.next(), "vertex index", n)?;
        let tag = t.next().ok_or_else(|| bad(format!("line {n}: missing edge tag")))?;
        let (kind, seg) = match tag.split_at(1) {
            ("D", s) => (BoundaryKind::Dirichlet, s),
            ("N", s) => (BoundaryKind::Neumann, s),
            _ => return Err(bad(format!("line {n}: edge tag must start with D or N"))),
        };
        let segment = if seg.is_empty() { 0 } else { parse(Some(seg), "segment", n)? };
        boundary.push(BoundaryEdge { vertices: [a, b], kind, segment });
    }
    if lines.next().is_some() {
        return Err(bad("trailing data after edge block"));
    }
    Mesh::new(vertices, triangles, boundary)
}

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} {} {}",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.boundary().len()
    );
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:.17e} {:.17e}", p[0], p[1]);
    }
    for t in mesh.triangles() {
        let [i, j, k] = t.vertices;
        let _ = writeln!(s, "{i} {j} {k} {} 0", t.subdomain.code());
    }
    for e in mesh.boundary() {
        let k = match e.kind {
            BoundaryKind::Dirichlet => 'D',
            BoundaryKind::Neumann => 'N',
        };
        let _ = writeln!(s, "{} {} {k}{}", e.vertices[0], e.vertices[1], e.segment);
    }
    s
}
