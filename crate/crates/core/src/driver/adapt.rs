//! The solve–estimate–mark–refine loop.

use std::io::Write;

use super::config::{ProblemKind, Refinement, RunConfig};
use super::marking::doerfler_mark;
use crate::benchmarks::{
    compute_errors, distributed_problem, neumann_problem, poisson_h1_error, poisson_indicators, poisson_solve,
    Benchmark,
};
use crate::error::{Error, Result};
use crate::estimator::{bound_report, star_indicators, Calibration, StarIndicators};
use crate::mesh::{bisect_with_parents, initial_mesh, prolong, uniform_bisect, DomainId, Mesh};
use crate::optsys::{solve_optimality_with, Operators, ProblemSpec};

/// One row of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelRecord {
    pub level: usize,
    pub dofs: usize,
    /// `d_α` error (distributed) or `V`-norm error (Neumann, Poisson).
    pub error: f64,
    /// General lower bound.
    pub esti: f64,
    /// General upper bound.
    pub nasbou: f64,
    /// Compact upper bound (energy variant for unconstrained problems).
    pub asbou: f64,
    /// Energy lower bound, general option.
    pub lextra: f64,
    /// Energy lower bound, compact option (may be negative before clamping).
    pub lower: f64,
    pub eta: f64,
    pub kappa: f64,
    pub compactness: f64,
    pub energy_error: f64,
    pub delta_term: f64,
    pub newton_iters: usize,
    pub residual: f64,
    pub residual_scale: f64,
    pub triangles: usize,
}

impl LevelRecord {
    pub fn effectivity(&self) -> f64 {
        self.eta / self.error
    }
}

/// Records of a run; `failure` is set when a level could not be completed.
#[derive(Debug)]
pub struct RunOutcome {
    pub records: Vec<LevelRecord>,
    pub failure: Option<Error>,
}

pub fn benchmark(kind: ProblemKind, alpha: f64) -> Result<Option<Benchmark>> {
    Ok(match kind {
        ProblemKind::Distributed => Some(distributed_problem(alpha)?),
        ProblemKind::Neumann => Some(neumann_problem(alpha)?),
        ProblemKind::UnitSquarePoisson => None,
    })
}

fn domain(kind: ProblemKind) -> DomainId {
    match kind {
        ProblemKind::Distributed => DomainId::DistributedQuad,
        ProblemKind::Neumann => DomainId::NeumannConvex,
        ProblemKind::UnitSquarePoisson => DomainId::UnitSquare,
    }
}

/// Number of unknowns: free vertices of both fields (one field for Poisson).
pub fn count_dofs(kind: ProblemKind, mesh: &Mesh) -> usize {
    match kind {
        ProblemKind::Neumann => 2 * mesh.num_vertices(),
        ProblemKind::Distributed => 2 * mesh.dirichlet_vertices().iter().filter(|f| !**f).count(),
        ProblemKind::UnitSquarePoisson => mesh.dirichlet_vertices().iter().filter(|f| !**f).count(),
    }
}

struct Level {
    record: LevelRecord,
    indicators: StarIndicators,
    z: Vec<f64>,
}

fn solve_level(
    config: &RunConfig,
    bench: Option<&Benchmark>,
    mesh: &Mesh,
    level: usize,
    z0: Option<&[f64]>,
) -> Result<Level> {
    let dofs = count_dofs(config.problem, mesh);
    let Some(bench) = bench else {
        let u = poisson_solve(mesh)?;
        let err = poisson_h1_error(mesh, &u);
        let ind = poisson_indicators(mesh, &u);
        let eta = ind.total();
        let record = LevelRecord {
            level,
            dofs,
            error: err,
            esti: config.calibration.s * eta,
            nasbou: f64::NAN,
            asbou: f64::NAN,
            lextra: f64::NAN,
            lower: f64::NAN,
            eta,
            kappa: f64::NAN,
            compactness: ind.compactness(crate::optsys::Setting::Distributed),
            energy_error: err,
            delta_term: 0.0,
            newton_iters: 1,
            residual: 0.0,
            residual_scale: 1.0,
            triangles: mesh.num_triangles(),
        };
        return Ok(Level { record, indicators: ind, z: vec![] });
    };
    let mut problem: ProblemSpec = bench.problem.clone();
    problem.clamp_quadrature = config.clamp_quadrature;
    let ops = Operators::new(&problem, mesh)?;
    let state = solve_optimality_with(&problem, mesh, &ops, z0, config.solver)?;
    let ind = star_indicators(&state, &problem, mesh)?;
    let errors = compute_errors(&state, &bench.exact, &problem, mesh, config.quad_depth)?;
    let rep = bound_report(dofs, &ind, &problem, &config.calibration);
    let (error, asbou, lextra, lower) = match (config.problem, rep.energy) {
        (ProblemKind::Neumann, Some(e)) => (errors.energy_error, e.upper, e.lower_general, e.lower_compact),
        (ProblemKind::Neumann, None) => (errors.energy_error, rep.upper_compact, f64::NAN, f64::NAN),
        (_, Some(e)) => (errors.d_alpha_error, rep.upper_compact, e.lower_general, e.lower_compact),
        (_, None) => (errors.d_alpha_error, rep.upper_compact, f64::NAN, f64::NAN),
    };
    let record = LevelRecord {
        level,
        dofs,
        error,
        esti: rep.lower_general,
        nasbou: rep.upper_general,
        asbou,
        lextra,
        lower,
        eta: rep.eta_total,
        kappa: rep.kappa,
        compactness: rep.compactness,
        energy_error: errors.energy_error,
        delta_term: errors.delta_term,
        newton_iters: state.newton_iters,
        residual: state.residual,
        residual_scale: state.residual_scale,
        triangles: mesh.num_triangles(),
    };
    Ok(Level { record, indicators: ind, z: state.z.values })
}

/// One summary line.
pub fn summary_line(config: &RunConfig, r: &LevelRecord) -> String {
    use super::config::BoundsSelection as B;
    let mut s = format!("level {:>2} dofs {:>7} eta {:.4e} error {:.4e}", r.level, r.dofs, r.eta, r.error);
    if config.problem != ProblemKind::UnitSquarePoisson {
        if matches!(config.bounds, B::General | B::All) {
            s += &format!(" esti {:.4e} Nasbou {:.4e}", r.esti, r.nasbou);
        }
        if matches!(config.bounds, B::Compact | B::All) {
            s += &format!(" Asbou {:.4e}", r.asbou);
        }
        if matches!(config.bounds, B::Energy | B::All) && r.lextra.is_finite() {
            s += &format!(" lextra {:.4e} lower {:.4e}", r.lextra, r.lower.max(0.0));
        }
        s += &format!(" newton {}", r.newton_iters);
    }
    s
}

/// Runs the loop until the next level would exceed `max_dofs`. Levels
/// completed before a failure are kept.
pub fn adapt_loop(config: &RunConfig) -> RunOutcome {
    let mut records = Vec::new();
    let failure = run(config, &mut records).err();
    RunOutcome { records, failure }
}

fn run(config: &RunConfig, records: &mut Vec<LevelRecord>) -> Result<()> {
    config.validate()?;
    let bench = benchmark(config.problem, config.alpha)?;
    let mut mesh = uniform_bisect(&initial_mesh(domain(config.problem))?, config.sweeps());
    let initial = count_dofs(config.problem, &mesh);
    if initial > config.max_dofs {
        return Err(Error::InvalidConfig(format!("max_dofs {} is below the {initial} initial DOFs", config.max_dofs)));
    }
    let mut z0: Option<Vec<f64>> = None;
    for level in 0.. {
        let lv = solve_level(config, bench.as_ref(), &mesh, level, z0.as_deref())?;
        if config.verbose {
            // a closed pipe must not abort the run; the CSV is still written
            let _ = writeln!(std::io::stdout(), "{}", summary_line(config, &lv.record));
        }
        records.push(lv.record);
        let marked: Vec<usize> = match config.refine {
            Refinement::Uniform => (0..mesh.num_triangles()).collect(),
            Refinement::Adaptive => doerfler_mark(&mesh, &lv.indicators.squared(), config.theta),
        };
        if marked.is_empty() {
            break;
        }
        let (next, parents) = bisect_with_parents(&mesh, &marked);
        if count_dofs(config.problem, &next) > config.max_dofs {
            break;
        }
        z0 = (!lv.z.is_empty()).then(|| prolong(&lv.z, &parents));
        mesh = next;
    }
    Ok(())
}

/// Calibration from an adaptive distributed run at `α = 10⁶`.
pub fn calibrate_reference(template: &RunConfig, max_dofs: usize) -> Result<Calibration> {
    let mut cfg = template.clone();
    cfg.problem = ProblemKind::Distributed;
    cfg.alpha = 1e6;
    cfg.refine = Refinement::Adaptive;
    cfg.max_dofs = max_dofs;
    cfg.calibration = Calibration::default();
    cfg.verbose = false;
    let out = adapt_loop(&cfg);
    if let Some(e) = out.failure {
        return Err(e);
    }
    let levels: Vec<(f64, f64)> = out.records.iter().map(|r| (r.error, r.eta)).collect();
    Calibration::from_reference(&levels)
}

/// Least-squares slope `−d log(value) / d log(dofs)`.
pub fn convergence_rate(dofs: &[usize], values: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> =
        dofs.iter().zip(values).filter(|(d, v)| **d > 0 && **v > 0.0).map(|(d, v)| ((*d as f64).ln(), v.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -sxy / sxx
}
