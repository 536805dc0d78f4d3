//! Refinement invariants under random marking.

use ocpfem::geometry;
use ocpfem::mesh::{bisect, bisect_with_parents, initial_mesh, prolong, uniform_bisect, DomainId, Mesh, Subdomain};
use proptest::prelude::*;

fn domain(i: usize) -> DomainId {
    [DomainId::DistributedQuad, DomainId::NeumannConvex, DomainId::UnitSquare][i % 3]
}

/// Applies `rounds` of refinement, each marking the triangles selected by `picks`.
fn refine(mesh: &Mesh, rounds: &[Vec<usize>]) -> Mesh {
    rounds.iter().fold(mesh.clone(), |m, picks| {
        let marked: Vec<usize> = picks.iter().map(|p| p % m.num_triangles()).collect();
        bisect(&m, &marked)
    })
}

fn control_area(mesh: &Mesh) -> f64 {
    (0..mesh.num_triangles()).filter(|&t| mesh.triangles()[t].subdomain == Subdomain::Control).map(|t| mesh.area(t)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refinement_is_conforming_and_measure_preserving(
        d in 0usize..3,
        rounds in prop::collection::vec(prop::collection::vec(0usize..10_000, 1..6), 1..7),
    ) {
        let base = uniform_bisect(&initial_mesh(domain(d)).unwrap(), 2);
        let fine = refine(&base, &rounds);
        prop_assert!(fine.check_conformity().is_ok());
        prop_assert!((fine.total_area() - base.total_area()).abs() < 1e-12);
        prop_assert!((fine.boundary_length() - base.boundary_length()).abs() < 1e-12);
        prop_assert!((control_area(&fine) - control_area(&base)).abs() < 1e-12);
        prop_assert!(fine.num_triangles() >= base.num_triangles());
        // Euler characteristic of a simply connected triangulation
        let edges = fine.topology().edges.len();
        prop_assert_eq!(fine.num_vertices() + fine.num_triangles(), edges + 1);
    }

    #[test]
    fn shape_regularity_is_bounded(
        d in 0usize..3,
        rounds in prop::collection::vec(prop::collection::vec(0usize..10_000, 1..4), 1..9),
    ) {
        let base = initial_mesh(domain(d)).unwrap();
        let fine = refine(&base, &rounds);
        // newest-vertex bisection only produces finitely many similarity classes
        // (four per initial triangle), so angles stay above a fixed fraction
        prop_assert!(fine.min_angle() >= 0.25 * base.min_angle() - 1e-12);
    }

    #[test]
    fn marked_triangles_are_refined(d in 0usize..3, pick in 0usize..10_000) {
        let base = uniform_bisect(&initial_mesh(domain(d)).unwrap(), 1);
        let t = pick % base.num_triangles();
        let refined = bisect(&base, &[t]);
        let p = base.coords(t);
        // the marked triangle itself no longer exists
        let survivor = (0..refined.num_triangles()).any(|s| refined.coords(s).iter().all(|v| p.contains(v)));
        prop_assert!(!survivor);
    }

    #[test]
    fn prolongation_is_exact_for_affine_functions(
        d in 0usize..3,
        picks in prop::collection::vec(0usize..10_000, 1..10),
        a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0,
    ) {
        let base = uniform_bisect(&initial_mesh(domain(d)).unwrap(), 2);
        let marked: Vec<usize> = picks.iter().map(|p| p % base.num_triangles()).collect();
        let (fine, parents) = bisect_with_parents(&base, &marked);
        prop_assert_eq!(fine.num_vertices(), base.num_vertices() + parents.len());
        let f = |x: ocpfem::Point| a * x[0] + b * x[1] + c;
        let values: Vec<f64> = base.vertices().iter().map(|&x| f(x)).collect();
        let fine_values = prolong(&values, &parents);
        for (x, v) in fine.vertices().iter().zip(&fine_values) {
            prop_assert!((f(*x) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn stars_cover_each_triangle_three_times(
        d in 0usize..3,
        rounds in prop::collection::vec(prop::collection::vec(0usize..10_000, 1..5), 0..4),
    ) {
        let mesh = refine(&uniform_bisect(&initial_mesh(domain(d)).unwrap(), 1), &rounds);
        let stars = mesh.stars();
        let covered: f64 = stars.iter().flat_map(|s| s.elements.iter()).map(|&t| mesh.area(t)).sum();
        prop_assert!((covered - 3.0 * mesh.total_area()).abs() < 1e-12);
        for s in &stars {
            let far = s.elements.iter()
                .flat_map(|&t| mesh.coords(t))
                .map(|x| geometry::dist(x, mesh.vertices()[s.center]))
                .fold(0.0, f64::max);
            prop_assert!(s.diameter >= far - 1e-15 && s.diameter <= 2.0 * far + 1e-15);
        }
    }
}
