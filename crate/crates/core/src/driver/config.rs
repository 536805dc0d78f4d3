use crate::benchmarks::DEFAULT_QUAD_DEPTH;
use crate::error::{Error, Result};
use crate::estimator::Calibration;
use crate::optsys::{ClampQuadrature, SolverOptions};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Distributed,
    Neumann,
    UnitSquarePoisson,
}

impl FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "distributed" => Ok(ProblemKind::Distributed),
            "neumann" => Ok(ProblemKind::Neumann),
            "unitsquare-poisson" | "poisson" => Ok(ProblemKind::UnitSquarePoisson),
            other => Err(Error::InvalidConfig(format!("unknown problem `{other}`"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Distributed => "distributed",
            ProblemKind::Neumann => "neumann",
            ProblemKind::UnitSquarePoisson => "unitsquare-poisson",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refinement {
    Adaptive,
    Uniform,
}

impl FromStr for Refinement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adaptive" => Ok(Refinement::Adaptive),
            "uniform" => Ok(Refinement::Uniform),
            other => Err(Error::InvalidConfig(format!("unknown refinement `{other}`"))),
        }
    }
}

/// Which bounds the per-level summary prints; the CSV always has all columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundsSelection {
    General,
    Compact,
    Energy,
    All,
}

impl FromStr for BoundsSelection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "general" => Ok(BoundsSelection::General),
            "compact" => Ok(BoundsSelection::Compact),
            "energy" => Ok(BoundsSelection::Energy),
            "all" => Ok(BoundsSelection::All),
            other => Err(Error::InvalidConfig(format!("unknown bounds selection `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub alpha: f64,
    pub theta: f64,
    pub max_dofs: usize,
    pub refine: Refinement,
    pub bounds: BoundsSelection,
    pub calibration: Calibration,
    pub output: Option<PathBuf>,
    /// Corner subdivision depth for error quadrature.
    pub quad_depth: usize,
    pub solver: SolverOptions,
    pub clamp_quadrature: ClampQuadrature,
    /// Uniform sweeps applied to the initial mesh; `None` uses the problem default.
    pub initial_sweeps: Option<usize>,
    /// Print one summary line per level to stdout.
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(problem: ProblemKind, alpha: f64) -> Self {
        RunConfig {
            problem,
            alpha,
            theta: 0.6,
            max_dofs: 100_000,
            refine: Refinement::Adaptive,
            bounds: BoundsSelection::All,
            calibration: Calibration::default(),
            output: None,
            quad_depth: DEFAULT_QUAD_DEPTH,
            solver: SolverOptions::default(),
            clamp_quadrature: ClampQuadrature::Clipped,
            initial_sweeps: None,
            verbose: false,
        }
    }

    /// Uniform pre-refinement of the initial mesh.
    pub fn sweeps(&self) -> usize {
        self.initial_sweeps.unwrap_or(match self.problem {
            ProblemKind::Distributed => 5,
            ProblemKind::Neumann => 6,
            ProblemKind::UnitSquarePoisson => 2,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidConfig(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if self.max_dofs == 0 {
            return Err(Error::InvalidConfig("max-dofs must be positive".into()));
        }
        Ok(())
    }
}
