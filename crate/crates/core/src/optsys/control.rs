//! The control `Π_K(−C*z/√α)` as an exactly integrable object.

use super::problem::{ClampQuadrature, Constraint, ProblemSpec, Setting};
use super::projection::{boundary_mean_shift, boundary_weights, project_box};
use crate::fem::clip::{partition, Bary, ClampField};
use crate::fem::Quadrature;
use crate::mesh::{Mesh, Region};
use std::sync::OnceLock;

fn degree2() -> &'static Quadrature {
    static Q: OnceLock<Quadrature> = OnceLock::new();
    Q.get_or_init(Quadrature::degree2)
}

/// Rule used in pointwise mode.
pub fn order10() -> &'static Quadrature {
    static Q: OnceLock<Quadrature> = OnceLock::new();
    Q.get_or_init(|| Quadrature::with_order(10))
}

/// Quadrature points (parent barycentric coordinates, weight as a fraction
/// of the element area) for integrands built from clamps of the given P1
/// fields. In clipped mode every piece gets `piece_rule` (degree 2 is exact
/// for products of two clamped or plain P1 functions).
pub fn clamped_points(
    fields: &[ClampField],
    mode: ClampQuadrature,
    piece_rule: Option<&Quadrature>,
) -> Vec<(Bary, f64)> {
    match mode {
        ClampQuadrature::Clipped => {
            let rule = piece_rule.unwrap_or_else(|| degree2());
            let mut out = Vec::new();
            for piece in partition(fields) {
                for (l, w) in rule.points.iter().zip(&rule.weights) {
                    out.push((piece.map(l), w * piece.fraction));
                }
            }
            out
        }
        ClampQuadrature::Pointwise => {
            let rule = order10();
            rule.points.iter().copied().zip(rule.weights.iter().copied()).collect()
        }
    }
}

#[inline]
fn dot3(v: &[f64; 3], l: &Bary) -> f64 {
    v[0] * l[0] + v[1] * l[1] + v[2] * l[2]
}

/// Exact representation of `q = Π_K(−C*Z/√α)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Control {
    /// `q = clamp(w, lower, upper)` on `region`, zero elsewhere, with `w = −Z/√α`.
    Distributed { w: Vec<f64>, lower: f64, upper: f64, region: Region },
    /// `q = w|_Γ + shift`.
    Boundary { w: Vec<f64>, shift: f64 },
}

impl Control {
    pub fn from_adjoint(problem: &ProblemSpec, mesh: &Mesh, z: &[f64]) -> Control {
        let c = problem.c();
        let w: Vec<f64> = z.iter().map(|v| -c * v).collect();
        match problem.setting {
            Setting::Distributed => {
                let (lower, upper) = match problem.effective_constraint() {
                    Constraint::Box { lower, upper } => (lower, upper),
                    _ => (f64::NEG_INFINITY, f64::INFINITY),
                };
                Control::Distributed { w, lower, upper, region: problem.control_region }
            }
            Setting::Boundary => {
                let shift = match problem.effective_constraint() {
                    Constraint::BoundaryMean { lower } => {
                        let m = boundary_weights(mesh);
                        let integral: f64 = m.iter().zip(&w).map(|(a, b)| a * b).sum();
                        boundary_mean_shift(integral, lower, mesh.boundary_length())
                    }
                    _ => 0.0,
                };
                Control::Boundary { w, shift }
            }
        }
    }

    /// Value at a barycentric point of triangle `t` (distributed control).
    pub fn eval(&self, mesh: &Mesh, t: usize, l: Bary) -> f64 {
        match self {
            Control::Distributed { w, lower, upper, region } => {
                let tri = &mesh.triangles()[t];
                if !region.contains(tri.subdomain) {
                    return 0.0;
                }
                let v = tri.vertices;
                project_box(l[0] * w[v[0]] + l[1] * w[v[1]] + l[2] * w[v[2]], *lower, *upper)
            }
            Control::Boundary { .. } => 0.0,
        }
    }

    /// Value at parameter `s ∈ [0,1]` along the boundary edge from `a` to `b`.
    pub fn eval_edge(&self, a: usize, b: usize, s: f64) -> f64 {
        match self {
            Control::Boundary { w, shift } => (1.0 - s) * w[a] + s * w[b] + shift,
            Control::Distributed { .. } => 0.0,
        }
    }

    /// Clamp field of triangle `t`, if the triangle lies in the control region.
    pub fn field(&self, mesh: &Mesh, t: usize) -> Option<ClampField> {
        match self {
            Control::Distributed { w, lower, upper, region } => {
                let tri = &mesh.triangles()[t];
                region.contains(tri.subdomain).then(|| {
                    let v = tri.vertices;
                    ClampField { vals: [w[v[0]], w[v[1]], w[v[2]]], lower: *lower, upper: *upper }
                })
            }
            Control::Boundary { .. } => None,
        }
    }

    /// Load vector `(q, C*φ_i)`.
    pub fn load(&self, mesh: &Mesh, mode: ClampQuadrature) -> Vec<f64> {
        let mut out = vec![0.0; mesh.num_vertices()];
        match self {
            Control::Distributed { .. } => {
                for (t, tri) in mesh.triangles().iter().enumerate() {
                    let Some(f) = self.field(mesh, t) else { continue };
                    let area = mesh.area(t);
                    for (l, wt) in clamped_points(&[f], mode, None) {
                        let q = project_box(dot3(&f.vals, &l), f.lower, f.upper) * wt * area;
                        for k in 0..3 {
                            out[tri.vertices[k]] += q * l[k];
                        }
                    }
                }
            }
            Control::Boundary { w, shift } => {
                let mb = crate::fem::assemble_boundary_mass(mesh, None);
                let mw = mb.matvec(w);
                let m = boundary_weights(mesh);
                for i in 0..out.len() {
                    out[i] = mw[i] + shift * m[i];
                }
            }
        }
        out
    }

    /// `∫ q` over the control region (or Γ).
    pub fn integral(&self, mesh: &Mesh, mode: ClampQuadrature) -> f64 {
        self.load(mesh, mode).iter().sum()
    }

    /// `‖q₁ − q₂‖²` over the control region (or Γ), exact in clipped mode.
    pub fn distance_sq(&self, other: &Control, mesh: &Mesh, mode: ClampQuadrature) -> f64 {
        match (self, other) {
            (Control::Distributed { .. }, Control::Distributed { .. }) => {
                let mut s = 0.0;
                for t in 0..mesh.num_triangles() {
                    let (Some(f), Some(g)) = (self.field(mesh, t), other.field(mesh, t)) else {
                        continue;
                    };
                    let area = mesh.area(t);
                    for (l, wt) in clamped_points(&[f, g], mode, None) {
                        let d = project_box(dot3(&f.vals, &l), f.lower, f.upper)
                            - project_box(dot3(&g.vals, &l), g.lower, g.upper);
                        s += d * d * wt * area;
                    }
                }
                s
            }
            (Control::Boundary { w: w1, shift: s1 }, Control::Boundary { w: w2, shift: s2 }) => {
                let e: Vec<f64> = w1.iter().zip(w2).map(|(a, b)| a - b).collect();
                let sigma = s1 - s2;
                let mb = crate::fem::assemble_boundary_mass(mesh, None);
                let m = boundary_weights(mesh);
                let me: f64 = m.iter().zip(&e).map(|(a, b)| a * b).sum();
                mb.bilinear(&e, &e) + 2.0 * sigma * me + sigma * sigma * mesh.boundary_length()
            }
            _ => panic!("controls of different settings"),
        }
    }
}
