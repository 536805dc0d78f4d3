use crate::error::{Error, Result};
use crate::fem::{LineQuadrature, Quadrature};
use crate::geometry::Point;
use crate::mesh::{DomainId, Region, Subdomain};
use std::fmt;
use std::sync::Arc;

/// Scalar field on the domain.
pub type Field = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
/// Field on the boundary; the second argument is the outward unit normal.
pub type EdgeField = Arc<dyn Fn(Point, Point) -> f64 + Send + Sync>;

/// Which state operator, control operator and observation are used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setting {
    /// `a = (∇·,∇·)` on H̊¹, control on a subdomain, observation on a subdomain.
    Distributed,
    /// `a = (·,·)_{H¹}` on H¹, Neumann control on Γ, observation in Ω and on Γ.
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constraint {
    None,
    /// Pointwise bounds `lower ≤ q ≤ upper`; either bound may be infinite.
    Box { lower: f64, upper: f64 },
    /// `∫_Γ q ≥ lower`.
    BoundaryMean { lower: f64 },
}

/// How integrals of clamped P1 functions are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClampQuadrature {
    /// Split elements along the kink lines and integrate each piece exactly.
    Clipped,
    /// Order-10 rule applied to the clamped integrand without splitting.
    Pointwise,
}

/// Data of the reduced, rescaled optimality system.
///
/// Adjoint equation (tested with `φ₁`):
/// `a(φ₁, z) − (1/√α)(Iu, Iφ₁) = −(1/√α)(u_d, Iφ₁) + ⟨G, φ₁⟩`,
/// state equation (tested with `φ₂`):
/// `a(u, φ₂) − (Π_K(−C*z/√α), C*φ₂) = ⟨f, φ₂⟩ + ⟨g₂, φ₂⟩_Γ` (Neumann data in the boundary setting).
#[derive(Clone, Default)]
pub struct ProblemData {
    pub source: Option<Field>,
    /// Observation target on the observation region (or Ω in the boundary setting).
    pub target: Option<Field>,
    /// Boundary observation target (boundary setting).
    pub boundary_target: Option<EdgeField>,
    /// Volume load added to the adjoint equation.
    pub adjoint_source: Option<Field>,
    /// Boundary load added to the adjoint equation.
    pub adjoint_flux: Option<EdgeField>,
    /// Dirichlet trace (distributed) or Neumann data (boundary) of the state.
    pub state_boundary: Option<EdgeField>,
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub domain: DomainId,
    pub setting: Setting,
    pub alpha: f64,
    pub constraint: Constraint,
    pub control_region: Region,
    pub observation_region: Region,
    pub data: ProblemData,
    /// Coercivity and continuity constants of `a`.
    pub m_a: f64,
    pub big_m_a: f64,
    /// `max{M_I, M_C}`.
    pub m: f64,
    pub quadrature: Quadrature,
    pub edge_quadrature: LineQuadrature,
    pub clamp_quadrature: ClampQuadrature,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("domain", &self.domain)
            .field("setting", &self.setting)
            .field("alpha", &self.alpha)
            .field("constraint", &self.constraint)
            .field("m", &self.m)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// A problem with zero data, default regions and `M = 1`.
    pub fn new(domain: DomainId, setting: Setting, alpha: f64) -> Self {
        let (control_region, observation_region) = match (domain, setting) {
            (DomainId::DistributedQuad, Setting::Distributed) => {
                (Region::Tagged(Subdomain::Control), Region::Tagged(Subdomain::Observation))
            }
            _ => (Region::All, Region::All),
        };
        ProblemSpec {
            domain,
            setting,
            alpha,
            constraint: Constraint::None,
            control_region,
            observation_region,
            data: ProblemData::default(),
            m_a: 1.0,
            big_m_a: 1.0,
            m: 1.0,
            quadrature: Quadrature::dunavant6(),
            edge_quadrature: LineQuadrature::with_order(6),
            clamp_quadrature: ClampQuadrature::Clipped,
        }
    }

    /// `1/√α`.
    #[inline]
    pub fn c(&self) -> f64 {
        1.0 / self.alpha.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidProblem(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.m > 0.0 && self.m_a > 0.0 && self.big_m_a >= self.m_a) {
            return Err(Error::InvalidProblem("constants must satisfy 0 < m_a ≤ M_a and M > 0".into()));
        }
        match (self.constraint, self.setting) {
            (Constraint::Box { lower, upper }, Setting::Distributed) => {
                if !(lower < upper) {
                    return Err(Error::InvalidProblem(format!("box bounds need a < b, got [{lower}, {upper}]")));
                }
            }
            (Constraint::Box { .. }, Setting::Boundary) => {
                return Err(Error::InvalidProblem("box constraints are supported for distributed control only".into()))
            }
            (Constraint::BoundaryMean { lower }, Setting::Boundary) => {
                if lower.is_nan() {
                    return Err(Error::InvalidProblem("boundary mean bound is NaN".into()));
                }
            }
            (Constraint::BoundaryMean { .. }, Setting::Distributed) => {
                return Err(Error::InvalidProblem("mean constraint requires boundary control".into()))
            }
            (Constraint::None, _) => {}
        }
        Ok(())
    }

    /// Control constraint with infinite bounds collapsed to `None`.
    pub fn effective_constraint(&self) -> Constraint {
        match self.constraint {
            Constraint::Box { lower, upper } if lower == f64::NEG_INFINITY && upper == f64::INFINITY => {
                Constraint::None
            }
            Constraint::BoundaryMean { lower } if lower == f64::NEG_INFINITY => Constraint::None,
            c => c,
        }
    }
}
