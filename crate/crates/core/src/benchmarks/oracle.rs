//! Strong-form check of manufactured data against the exact closures.
//!
//! Derivatives of the exact `u` and `z` are taken by fourth-order central
//! differences, so the check is independent of the hand-coded gradients and
//! Laplacians used to build the data.

use super::problems::{Benchmark, ExactSolution};
use crate::error::Result;
use crate::geometry::{self, Point};
use crate::mesh::{initial_mesh, Region, Subdomain};
use crate::optsys::{project_box, Constraint, Field, Setting};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-3;
/// Samples closer than this to the singular corner are rejected.
const CORNER_RADIUS: f64 = 0.1;

fn d2(f: &dyn Fn(Point) -> f64, x: Point, dir: Point) -> f64 {
    let at = |s: f64| f([x[0] + s * dir[0], x[1] + s * dir[1]]);
    (-at(2.0 * STEP) + 16.0 * at(STEP) - 30.0 * at(0.0) + 16.0 * at(-STEP) - at(-2.0 * STEP)) / (12.0 * STEP * STEP)
}

/// Fourth-order central difference of the Laplacian.
pub fn fd_laplacian(f: &dyn Fn(Point) -> f64, x: Point) -> f64 {
    d2(f, x, [1.0, 0.0]) + d2(f, x, [0.0, 1.0])
}

/// Fourth-order central difference of the directional derivative.
pub fn fd_directional(f: &dyn Fn(Point) -> f64, x: Point, dir: Point) -> f64 {
    let at = |s: f64| f([x[0] + s * dir[0], x[1] + s * dir[1]]);
    (-at(2.0 * STEP) + 8.0 * at(STEP) - 8.0 * at(-STEP) + at(-2.0 * STEP)) / (12.0 * STEP)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManufacturedReport {
    pub samples: usize,
    pub max_residual: f64,
    /// Largest magnitude of any term entering the residuals.
    pub scale: f64,
    /// Equation with the largest residual.
    pub worst: &'static str,
    pub worst_point: Point,
}

impl ManufacturedReport {
    pub fn relative(&self) -> f64 {
        self.max_residual / self.scale.max(f64::MIN_POSITIVE)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.relative() <= tol
    }
}

struct Tracker {
    max: f64,
    scale: f64,
    worst: &'static str,
    point: Point,
}

impl Tracker {
    fn record(&mut self, label: &'static str, x: Point, terms: &[f64]) {
        let r: f64 = terms.iter().sum();
        for t in terms {
            self.scale = self.scale.max(t.abs());
        }
        if r.abs() > self.max || self.max.is_nan() {
            self.max = r.abs();
            self.worst = label;
            self.point = x;
        }
    }
}

fn eval(f: &Option<Field>, x: Point) -> f64 {
    f.as_ref().map_or(0.0, |f| f(x))
}

/// Membership by geometry: the tagged regions of the distributed example
/// are separated by the diagonal `y = x`.
fn region_contains(region: Region, x: Point) -> bool {
    match region {
        Region::All => true,
        Region::Tagged(Subdomain::Control) => x[1] < x[0],
        Region::Tagged(Subdomain::Observation) => x[1] > x[0],
        Region::Tagged(Subdomain::Plain) => false,
    }
}

/// Evaluates the strong optimality system at `n_samples` random interior
/// points and at boundary points; returns the largest residual.
pub fn verify_manufactured(bench: &Benchmark, n_samples: usize, seed: u64) -> Result<ManufacturedReport> {
    let problem = &bench.problem;
    let exact: &ExactSolution = &bench.exact;
    let mesh = initial_mesh(problem.domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = problem.c();
    let d = &problem.data;
    let u = exact.u.as_ref();
    let z = exact.z.as_ref();
    let mut tr = Tracker { max: 0.0, scale: 0.0, worst: "none", point: [0.0, 0.0] };
    let areas: Vec<f64> = (0..mesh.num_triangles()).map(|t| mesh.area(t)).collect();
    let total: f64 = areas.iter().sum();

    let mut taken = 0;
    while taken < n_samples {
        let mut pick = rng.gen::<f64>() * total;
        let mut t = 0;
        while t + 1 < areas.len() && pick > areas[t] {
            pick -= areas[t];
            t += 1;
        }
        let (mut a, mut b) = (rng.gen::<f64>(), rng.gen::<f64>());
        if a + b > 1.0 {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        let x = geometry::from_barycentric(&mesh.coords(t), [1.0 - a - b, a, b]);
        if geometry::dist(x, exact.corner) < CORNER_RADIUS || (x[1] - x[0]).abs() < 1e-9 {
            continue;
        }
        taken += 1;
        let lu = fd_laplacian(u, x);
        let lz = fd_laplacian(z, x);
        let ux = u(x);
        let zx = z(x);
        match problem.setting {
            Setting::Distributed => {
                let in_q = region_contains(problem.control_region, x);
                let in_w = region_contains(problem.observation_region, x);
                let q = (exact.q)(x);
                // −Δu = f + χ_Q q
                tr.record("state", x, &[-lu, -eval(&d.source, x), -q]);
                // −Δz = (1/√α)(u − u_d)χ_W + G
                let obs = if in_w { c * (ux - eval(&d.target, x)) } else { 0.0 };
                tr.record("adjoint", x, &[-lz, -obs, -eval(&d.adjoint_source, x)]);
                let (lo, hi) = match problem.constraint {
                    Constraint::Box { lower, upper } => (lower, upper),
                    _ => (f64::NEG_INFINITY, f64::INFINITY),
                };
                let proj = if in_q { project_box(-c * zx, lo, hi) } else { 0.0 };
                tr.record("projection", x, &[q, -proj]);
            }
            Setting::Boundary => {
                tr.record("state", x, &[-lu, ux, -eval(&d.source, x)]);
                let obs = c * (ux - eval(&d.target, x));
                tr.record("adjoint", x, &[-lz, zx, -obs, -eval(&d.adjoint_source, x)]);
            }
        }
    }

    // boundary identities at points along every boundary edge
    for e in mesh.boundary() {
        let (pa, pb) = (mesh.vertices()[e.vertices[0]], mesh.vertices()[e.vertices[1]]);
        let n = mesh.outward_normal(e);
        for k in 1..10 {
            let s = k as f64 / 10.0;
            let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            if geometry::dist(x, exact.corner) < CORNER_RADIUS {
                continue;
            }
            let bnd = |f: &Option<crate::optsys::EdgeField>| f.as_ref().map_or(0.0, |f| f(x, n));
            match problem.setting {
                Setting::Distributed => {
                    tr.record("dirichlet state", x, &[u(x), -bnd(&d.state_boundary)]);
                    tr.record("dirichlet adjoint", x, &[z(x)]);
                }
                Setting::Boundary => {
                    let q = (exact.q)(x);
                    tr.record("neumann state", x, &[fd_directional(u, x, n), -bnd(&d.state_boundary), -q]);
                    let obs = c * (u(x) - bnd(&d.boundary_target));
                    tr.record("neumann adjoint", x, &[fd_directional(z, x, n), -obs, -bnd(&d.adjoint_flux)]);
                    if problem.effective_constraint() == Constraint::None {
                        tr.record("projection", x, &[q, c * z(x)]);
                    }
                }
            }
        }
    }
    Ok(ManufacturedReport { samples: taken, max_residual: tr.max, scale: tr.scale, worst: tr.worst, worst_point: tr.point })
}

/// Largest relative deviation between the hand-coded gradients and
/// central differences of the exact closures at the given points.
pub fn gradient_deviation(exact: &ExactSolution, points: &[Point]) -> f64 {
    let mut worst = 0.0f64;
    for &x in points {
        for (f, g) in [(exact.u.as_ref(), exact.grad_u.as_ref()), (exact.z.as_ref(), exact.grad_z.as_ref())] {
            let gx = g(x);
            let fd = [fd_directional(f, x, [1.0, 0.0]), fd_directional(f, x, [0.0, 1.0])];
            let scale = gx[0].abs().max(gx[1].abs()).max(1.0);
            worst = worst.max((gx[0] - fd[0]).abs() / scale).max((gx[1] - fd[1]).abs() / scale);
        }
    }
    worst
}
