//! The two manufactured optimal control examples.

use crate::error::{Error, Result};
use crate::fem::{estimate_embedding_constant, Embedding};
use crate::geometry::{self, Point};
use crate::mesh::{initial_mesh, uniform_bisect, DomainId};
use crate::optsys::{Constraint, Field, ProblemSpec, Setting};
use crate::optsys::project_box;
use std::sync::{Arc, OnceLock};

pub type VectorField = Arc<dyn Fn(Point) -> Point + Send + Sync>;

/// Closed-form solution `(u, z)` and control `q` of a benchmark.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: Field,
    pub grad_u: VectorField,
    pub z: Field,
    pub grad_z: VectorField,
    /// Control; for boundary control it is meaningful on Γ only.
    pub q: Field,
    /// Location of the singular corner.
    pub corner: Point,
    /// Leading exponent `λ` of the singular function `r^λ`.
    pub exponent: f64,
}

/// A problem together with its exact solution.
#[derive(Clone)]
pub struct Benchmark {
    pub problem: ProblemSpec,
    pub exact: ExactSolution,
}

/// Uniform sweeps of the initial mesh used to estimate embedding constants.
const EMBEDDING_SWEEPS: usize = 12;

fn cached(cell: &'static OnceLock<f64>, domain: DomainId, which: Embedding) -> Result<f64> {
    if let Some(v) = cell.get() {
        return Ok(*v);
    }
    let mesh = uniform_bisect(&initial_mesh(domain)?, EMBEDDING_SWEEPS);
    let v = estimate_embedding_constant(&mesh, which)?;
    Ok(*cell.get_or_init(|| v))
}

/// Poincaré constant `C_P` of the distributed example's domain.
pub fn poincare_constant() -> Result<f64> {
    static C: OnceLock<f64> = OnceLock::new();
    cached(&C, DomainId::DistributedQuad, Embedding::Poincare)
}

/// Trace constant `C_Γ` of the Neumann example's domain.
pub fn trace_constant() -> Result<f64> {
    static C: OnceLock<f64> = OnceLock::new();
    cached(&C, DomainId::NeumannConvex, Embedding::Trace)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidProblem(format!("alpha must be positive, got {alpha}")))
    }
}

/// Adjoint `z = 4(y − y²)(1 − x)(x + y)` of the distributed example.
pub fn distributed_z(x: Point) -> f64 {
    let (p, q) = (x[1] - x[1] * x[1], (1.0 - x[0]) * (x[0] + x[1]));
    4.0 * p * q
}

pub fn distributed_grad_z(x: Point) -> Point {
    let (p, q) = (x[1] - x[1] * x[1], (1.0 - x[0]) * (x[0] + x[1]));
    [4.0 * p * (1.0 - 2.0 * x[0] - x[1]), 4.0 * ((1.0 - 2.0 * x[1]) * q + p * (1.0 - x[0]))]
}

pub fn distributed_laplace_z(x: Point) -> f64 {
    let (p, q) = (x[1] - x[1] * x[1], (1.0 - x[0]) * (x[0] + x[1]));
    -8.0 * p - 8.0 * q + 8.0 * (1.0 - 2.0 * x[1]) * (1.0 - x[0])
}

/// State `u = 3 r^{4/3} sin(4θ/3)`.
pub fn distributed_u(x: Point) -> f64 {
    let (r, t) = geometry::polar(x);
    3.0 * r.powf(4.0 / 3.0) * (4.0 * t / 3.0).sin()
}

pub fn distributed_grad_u(x: Point) -> Point {
    let (r, t) = geometry::polar(x);
    let s = 4.0 * r.cbrt();
    [s * (t / 3.0).sin(), s * (t / 3.0).cos()]
}

/// Ω_Q is the triangle below the diagonal `y = x`.
#[inline]
pub fn in_control_region(x: Point) -> bool {
    x[1] < x[0]
}

/// Distributed control on Ω_Q with `K = {|q| ≤ 1}` and a singular state.
pub fn distributed_problem(alpha: f64) -> Result<Benchmark> {
    check_alpha(alpha)?;
    let c = 1.0 / alpha.sqrt();
    let mut p = ProblemSpec::new(DomainId::DistributedQuad, Setting::Distributed, alpha);
    p.constraint = Constraint::Box { lower: -1.0, upper: 1.0 };
    p.m = poincare_constant()?;
    let q: Field = Arc::new(move |x| if in_control_region(x) { project_box(-c * distributed_z(x), -1.0, 1.0) } else { 0.0 });
    let qf = q.clone();
    p.data.source = Some(Arc::new(move |x| -qf(x)));
    p.data.target = Some(Arc::new(|x| distributed_u(x) + distributed_laplace_z(x)));
    p.data.adjoint_source = Some(Arc::new(move |x| {
        let w = if in_control_region(x) { 0.0 } else { c };
        distributed_laplace_z(x) * (w - 1.0)
    }));
    p.data.state_boundary = Some(Arc::new(|x, _| distributed_u(x)));
    let exact = ExactSolution {
        u: Arc::new(distributed_u),
        grad_u: Arc::new(distributed_grad_u),
        z: Arc::new(distributed_z),
        grad_z: Arc::new(distributed_grad_z),
        q,
        corner: [0.0, 0.0],
        exponent: 4.0 / 3.0,
    };
    Ok(Benchmark { problem: p, exact })
}

/// Exponent `μ = 36/35` of the Neumann example (interior angle 175°).
pub const NEUMANN_EXPONENT: f64 = 36.0 / 35.0;

pub fn neumann_z(x: Point) -> f64 {
    let (r, t) = geometry::polar(x);
    r.powf(NEUMANN_EXPONENT) * (NEUMANN_EXPONENT * t).cos()
}

pub fn neumann_grad_z(x: Point) -> Point {
    let (r, t) = geometry::polar(x);
    let mu = NEUMANN_EXPONENT;
    if r == 0.0 {
        return [0.0, 0.0];
    }
    let s = mu * r.powf(mu - 1.0);
    [s * ((mu - 1.0) * t).cos(), -s * ((mu - 1.0) * t).sin()]
}

/// Unconstrained Neumann boundary control on the convex pentagon, `u = 0`.
pub fn neumann_problem(alpha: f64) -> Result<Benchmark> {
    check_alpha(alpha)?;
    let sa = alpha.sqrt();
    let mut p = ProblemSpec::new(DomainId::NeumannConvex, Setting::Boundary, alpha);
    p.m = 1.0 + trace_constant()?;
    p.data.target = Some(Arc::new(move |x| -sa * neumann_z(x)));
    p.data.adjoint_flux = Some(Arc::new(|x, n| geometry::dot(neumann_grad_z(x), n)));
    p.data.state_boundary = Some(Arc::new(move |x, _| neumann_z(x) / sa));
    let exact = ExactSolution {
        u: Arc::new(|_| 0.0),
        grad_u: Arc::new(|_| [0.0, 0.0]),
        z: Arc::new(neumann_z),
        grad_z: Arc::new(neumann_grad_z),
        q: Arc::new(move |x| -neumann_z(x) / sa),
        corner: [0.0, 0.0],
        exponent: NEUMANN_EXPONENT,
    };
    Ok(Benchmark { problem: p, exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distributed_boundary_values() {
        for s in [0.0, 0.3, 0.8] {
            assert!(distributed_z([s, 0.0]).abs() < 1e-15);
            assert!(distributed_z([s, 1.0]).abs() < 1e-15);
            assert!(distributed_z([-s, s]).abs() < 1e-15);
            assert!(distributed_z([1.0, s]).abs() < 1e-15);
        }
        let t = 0.75 * std::f64::consts::PI;
        assert!(distributed_u([0.5, 0.0]).abs() < 1e-15);
        assert!(distributed_u([0.6 * t.cos(), 0.6 * t.sin()]).abs() < 1e-14);
    }

    #[test]
    fn control_is_bounded() {
        let b = distributed_problem(1e-8).unwrap();
        for i in 0..50 {
            let x = [(i as f64) / 50.0, 0.4];
            assert!(b.exact.q.as_ref()(x).abs() <= 1.0);
        }
    }

    #[test]
    fn neumann_gradient_is_finite_near_corner() {
        for r in [1e-12, 1e-6, 1e-2] {
            let g = neumann_grad_z([r, r]);
            let norm = g[0].hypot(g[1]);
            assert!(norm.is_finite() && (norm - NEUMANN_EXPONENT * (r * 2f64.sqrt()).powf(1.0 / 35.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn non_positive_alpha_rejected() {
        assert!(distributed_problem(0.0).is_err());
        assert!(neumann_problem(-1.0).is_err());
    }

    #[test]
    fn embedding_constants_plausible() {
        let cp = poincare_constant().unwrap();
        // Ω lies in a strip of width 1 (0 < y < 1): C_P ≤ 1/π
        assert!(cp > 0.2 && cp < 1.0 / std::f64::consts::PI, "{cp}");
        let ct = trace_constant().unwrap();
        assert!(ct > 0.5 && ct < 2.0, "{ct}");
    }
}
