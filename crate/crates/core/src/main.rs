use clap::Parser;
use ocpfem::driver::{
    adapt_loop, calibrate_reference, convergence_rate, emit_csv, BoundsSelection, ProblemKind, Refinement, RunConfig,
};
use ocpfem::benchmarks::verify_manufactured;
use ocpfem::estimator::Calibration;
use ocpfem::optsys::ClampQuadrature;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Adaptive finite elements for linear-quadratic elliptic optimal control
/// with a posteriori error bounds.
#[derive(Parser, Debug)]
#[command(name = "ocpfem", version)]
struct Cli {
    /// distributed | neumann | unitsquare-poisson
    #[arg(long, default_value = "distributed")]
    problem: String,
    /// Cost parameter α > 0.
    #[arg(long, default_value_t = 1e-1, allow_negative_numbers = true)]
    alpha: f64,
    /// Dörfler bulk parameter in (0, 1].
    #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
    theta: f64,
    /// Stop before a level would exceed this many unknowns.
    #[arg(long, default_value_t = 100_000)]
    max_dofs: usize,
    /// adaptive | uniform
    #[arg(long, default_value = "adaptive")]
    refine: String,
    /// Bounds shown in the per-level summary: general | compact | energy | all
    #[arg(long, default_value = "all")]
    bounds: String,
    /// Calibration file (`s=…`, `C_M=…`). Created from a reference run at
    /// α = 1e6 when missing; `none` uses s = 1.
    #[arg(long, default_value = "none")]
    calibrate: String,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Corner subdivision depth of the error quadrature.
    #[arg(long, default_value_t = ocpfem::benchmarks::DEFAULT_QUAD_DEPTH)]
    quad_depth: usize,
    /// Seed of the sampled strong-form check of the benchmark data printed
    /// before the run (the run itself is deterministic).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Uniform pre-refinement sweeps of the initial mesh.
    #[arg(long)]
    initial_sweeps: Option<usize>,
    /// Integrate clamped terms pointwise with an order-10 rule instead of clipping.
    #[arg(long)]
    pointwise_clamp: bool,
}

fn config(cli: &Cli) -> ocpfem::Result<RunConfig> {
    let problem: ProblemKind = cli.problem.parse()?;
    let mut c = RunConfig::new(problem, cli.alpha);
    c.theta = cli.theta;
    c.max_dofs = cli.max_dofs;
    c.refine = cli.refine.parse::<Refinement>()?;
    c.bounds = cli.bounds.parse::<BoundsSelection>()?;
    c.output = cli.out.clone();
    c.quad_depth = cli.quad_depth;
    c.initial_sweeps = cli.initial_sweeps;
    c.verbose = true;
    if cli.pointwise_clamp {
        c.clamp_quadrature = ClampQuadrature::Pointwise;
    }
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.calibrate != "none" {
        let path = PathBuf::from(&cli.calibrate);
        let cal = if path.exists() {
            Calibration::load(&path)
        } else {
            calibrate_reference(&cfg, cfg.max_dofs).and_then(|c| c.save(&path).map(|_| c))
        };
        match cal {
            Ok(c) => {
                println!("calibration s = {:.6e}, C_M = {}", c.s, c.c_m);
                cfg.calibration = c;
            }
            Err(e @ ocpfem::Error::InvalidConfig(_)) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            Err(e) => {
                eprintln!("calibration failed: {e}");
                return ExitCode::from(3);
            }
        }
    }
    match ocpfem::driver::benchmark(cfg.problem, cfg.alpha) {
        Ok(Some(bench)) => match verify_manufactured(&bench, 1000, cli.seed) {
            Ok(r) => println!("oracle: strong-form residual {:.2e} relative over {} samples (seed {})", r.relative(), r.samples, cli.seed),
            Err(e) => eprintln!("oracle check skipped: {e}"),
        },
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = adapt_loop(&cfg);
    if let Some(path) = &cfg.output {
        if !out.records.is_empty() {
            if let Err(e) = emit_csv(&out.records, cfg.problem, path) {
                eprintln!("error writing {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
    }
    if out.records.len() >= 2 {
        let dofs: Vec<usize> = out.records.iter().map(|r| r.dofs).collect();
        let err: Vec<f64> = out.records.iter().map(|r| r.error).collect();
        let eta: Vec<f64> = out.records.iter().map(|r| r.eta).collect();
        let re = convergence_rate(&dofs, &err);
        let _ = writeln!(
            std::io::stdout(),
            "rates vs DOFs: error {:.3}, estimator {:.3} (error vs h: {:.3})",
            re,
            convergence_rate(&dofs, &eta),
            2.0 * re
        );
    }
    match out.failure {
        None => ExitCode::SUCCESS,
        Some(e @ ocpfem::Error::InvalidConfig(_)) | Some(e @ ocpfem::Error::InvalidProblem(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Some(e) => {
            eprintln!("solver failure after {} levels: {e}", out.records.len());
            ExitCode::from(3)
        }
    }
}
