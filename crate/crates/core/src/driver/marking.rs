//! Dörfler (bulk) marking on vertex stars.

use crate::mesh::Mesh;

/// Vertices of the smallest set whose squared indicators reach
/// `theta · Σ η_z²`: the greedy prefix after sorting by decreasing `η_z²`
/// (ties by vertex id).
pub fn doerfler_select(eta_sq: &[f64], theta: f64) -> Vec<usize> {
    let total: f64 = eta_sq.iter().sum();
    if !(total > 0.0) {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..eta_sq.len()).collect();
    order.sort_by(|&a, &b| eta_sq[b].total_cmp(&eta_sq[a]).then(a.cmp(&b)));
    let goal = theta * total;
    let mut acc = 0.0;
    let mut out = Vec::new();
    for v in order {
        if acc >= goal || eta_sq[v] <= 0.0 {
            break;
        }
        acc += eta_sq[v];
        out.push(v);
    }
    out
}

/// Triangles of the stars of the given vertices, sorted and deduplicated.
pub fn star_triangles(mesh: &Mesh, vertices: &[usize]) -> Vec<usize> {
    let mut selected = vec![false; mesh.num_vertices()];
    vertices.iter().for_each(|&v| selected[v] = true);
    (0..mesh.num_triangles()).filter(|&t| mesh.triangles()[t].vertices.iter().any(|&v| selected[v])).collect()
}

pub fn doerfler_mark(mesh: &Mesh, eta_sq: &[f64], theta: f64) -> Vec<usize> {
    star_triangles(mesh, &doerfler_select(eta_sq, theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_example() {
        assert_eq!(doerfler_select(&[16.0, 9.0, 4.0, 1.0], 0.6), vec![0, 1]);
        assert_eq!(doerfler_select(&[1.0, 4.0, 9.0, 16.0], 0.6), vec![3, 2]);
    }

    #[test]
    fn full_theta_takes_all_positive() {
        assert_eq!(doerfler_select(&[1.0, 0.0, 2.0], 1.0), vec![2, 0]);
        assert!(doerfler_select(&[0.0, 0.0], 0.5).is_empty());
    }

    #[test]
    fn ties_by_vertex_id() {
        assert_eq!(doerfler_select(&[1.0, 1.0, 1.0, 1.0], 0.5), vec![0, 1]);
    }
}
