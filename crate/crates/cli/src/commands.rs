//! Subcommand dispatch and exit codes.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use porous_adjoint::{
    canonical_ab, canonical_cd, classify_bvp, gradient_report, interpolate_permeability, optimize,
    require_compatibility, run_table1, sensitivity_field, solve_adjoint, BoundedMaterial,
    ClassGroup, ClassTag, Error, FlowProblem, ModelForm, OptimizerOptions, ScenarioParams, Sense,
    Verdict,
};
use serde::Serialize;

use crate::config::{read_config, ConfigError, RunConfig};
use crate::output::{cell_csv, face_csv, vtk, write_all, Artifact, Format};
use crate::verify::{run_verify, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "porous-adjoint",
    version,
    about = "Darcy and Darcy-Brinkman solves, adjoint sensitivities and design"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Field file format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; 1 gives byte-identical output across runs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the flow problem; writes pressure, velocity and diagnostics.
    Solve(ConfigArg),
    /// Solve the adjoint of the total dissipation.
    Adjoint(ConfigArg),
    /// Gradient of the total dissipation with respect to permeability.
    Sensitivity {
        #[command(flatten)]
        config: ConfigArg,
        /// Also compute central finite differences (one pair of solves per cell).
        #[arg(long)]
        fd: bool,
    },
    /// Classify the boundary-value problem into classes A-D.
    Classify(ConfigArg),
    /// Run the two-material design optimizer from the config's design block.
    Optimize(ConfigArg),
    /// Reproduce the trivial/nontrivial verdict table on the canonical problems.
    Table1 {
        /// Cells per side of the canonical problems.
        #[arg(long, default_value_t = 32)]
        size: usize,
    },
    /// Randomized gradient triple-check and sign suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random problems per model and class.
        #[arg(long, default_value_t = 10)]
        instances: usize,
        /// Cells along x of each random problem.
        #[arg(long, default_value_t = 6)]
        size: usize,
    },
}

/// Why a run failed, with its process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Compatibility(String),
    Convergence(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Compatibility(_) => 3,
            Failure::Convergence(_) => 4,
            Failure::Internal(_) => 5,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Compatibility(m) => write!(f, "compatibility error: {m}"),
            Failure::Convergence(m) => write!(f, "solver error: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Input(_) | Error::Shape(_) => Failure::Config(m),
            Error::Compatibility { .. } | Error::NotPureVelocity => Failure::Compatibility(m),
            Error::Convergence { .. } => Failure::Convergence(m),
            _ => Failure::Internal(m),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Files written by a successful run, and whether its checks held.
#[derive(Debug)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    /// False when `table1` or `verify` found a mismatch; the report is still written.
    pub checks_passed: bool,
}

/// Runs one subcommand. Everything is computed before the first file is
/// written, so a failed run leaves `out` untouched.
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let (artifacts, checks_passed) = match &cli.command {
        Command::Solve(c) => (solve(&load(&c.config)?, cli.format)?, true),
        Command::Adjoint(c) => (adjoint(&load(&c.config)?, cli.format)?, true),
        Command::Sensitivity { config, fd } => {
            (sensitivity(&load(&config.config)?, *fd, cli.format)?, true)
        }
        Command::Classify(c) => (classify(&load(&c.config)?)?, true),
        Command::Optimize(c) => (design(&load(&c.config)?, cli.format)?, true),
        Command::Table1 { size } => table1(*size)?,
        Command::Verify {
            seed,
            instances,
            size,
        } => verify(VerifyOptions {
            seed: *seed,
            instances: *instances,
            size: *size,
        })?,
    };
    let written = write_all(&cli.out, &artifacts)
        .map_err(|e| Failure::Config(format!("cannot write to {}: {e}", cli.out.display())))?;
    for path in &written {
        log::info!("wrote {}", path.display());
    }
    Ok(Outcome {
        written,
        checks_passed,
    })
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let config = read_config(path)?;
    log::info!(
        "loaded {} ({:?}, {}x{})",
        path.display(),
        config.model,
        config.grid.nx,
        config.grid.ny
    );
    Ok(config)
}

/// The problem of a config, after the checks that precede any solve.
fn prepare(config: &RunConfig) -> Result<FlowProblem, Failure> {
    let problem = config.problem();
    require_compatibility(&problem)?;
    Ok(problem)
}

fn model_name(model: ModelForm) -> &'static str {
    match model {
        ModelForm::Darcy => "darcy",
        ModelForm::BrinkmanMain => "brinkman",
        ModelForm::BrinkmanTraction => "brinkman_traction",
    }
}

#[derive(Serialize)]
struct SolveReport {
    model: &'static str,
    nx: usize,
    ny: usize,
    dissipation: f64,
    residual: f64,
    iterations: usize,
    gauge_pinned: bool,
}

fn solve(config: &RunConfig, format: Format) -> Result<Vec<Artifact>, Failure> {
    let problem = prepare(config)?;
    let sol = problem.solve()?;
    let grid = problem.grid();
    let report = SolveReport {
        model: model_name(config.model),
        nx: grid.nx,
        ny: grid.ny,
        dissipation: problem.dissipation(&sol.v)?,
        residual: sol.diagnostics.residual,
        iterations: sol.diagnostics.iterations,
        gauge_pinned: sol.diagnostics.gauge_pinned,
    };
    let mut out = match format {
        Format::Csv => vec![
            Artifact::new("pressure.csv", cell_csv(grid, &sol.p)),
            Artifact::new("velocity.csv", face_csv(grid, &sol.v)),
        ],
        Format::Vtk => vec![Artifact::new(
            "solution.vtk",
            vtk(
                grid,
                "flow solution",
                &[("pressure", &sol.p)],
                &[("velocity", &sol.v)],
            ),
        )],
    };
    out.push(Artifact::json("diagnostics.json", &report));
    Ok(out)
}

fn adjoint(config: &RunConfig, format: Format) -> Result<Vec<Artifact>, Failure> {
    let problem = prepare(config)?;
    let forward = problem.solve()?;
    let adj = solve_adjoint(&problem, &forward)?;
    let grid = problem.grid();
    Ok(match format {
        Format::Csv => vec![
            Artifact::new("adjoint_pressure.csv", cell_csv(grid, &adj.lambda_p)),
            Artifact::new("adjoint_velocity.csv", face_csv(grid, &adj.lambda_v)),
        ],
        Format::Vtk => vec![Artifact::new(
            "adjoint.vtk",
            vtk(
                grid,
                "adjoint solution",
                &[("adjoint_pressure", &adj.lambda_p)],
                &[("adjoint_velocity", &adj.lambda_v)],
            ),
        )],
    })
}

fn sensitivity(config: &RunConfig, fd: bool, format: Format) -> Result<Vec<Artifact>, Failure> {
    let problem = prepare(config)?;
    let report = gradient_report(&problem, fd)?;
    let forward = problem.solve()?;
    let adj = solve_adjoint(&problem, &forward)?;
    let s = sensitivity_field(problem.grid(), problem.k(), problem.mu(), &forward.v, &adj)?;
    let grid = problem.grid();
    let field = match format {
        Format::Csv => Artifact::new("sensitivity.csv", cell_csv(grid, &s.density)),
        Format::Vtk => Artifact::new(
            "sensitivity.vtk",
            vtk(
                grid,
                "dissipation sensitivity density",
                &[("sensitivity", &s.density)],
                &[],
            ),
        ),
    };
    Ok(vec![Artifact::json("gradient_report.json", &report), field])
}

#[derive(Serialize)]
struct ClassReport {
    model: &'static str,
    class: ClassTag,
    pressure_driven: bool,
    velocity_driven: bool,
    notes: Vec<String>,
}

fn classify(config: &RunConfig) -> Result<Vec<Artifact>, Failure> {
    let problem = prepare(config)?;
    let class = classify_bvp(&problem)?;
    let report = ClassReport {
        model: model_name(class.model),
        class: class.tag,
        pressure_driven: class.tag.is_pressure_driven(),
        velocity_driven: class.tag.is_velocity_driven(),
        notes: class.notes,
    };
    Ok(vec![Artifact::json("class.json", &report)])
}

fn design(config: &RunConfig, format: Format) -> Result<Vec<Artifact>, Failure> {
    let Some(design) = &config.design else {
        return Err(Failure::Config("optimize needs a design block".into()));
    };
    let problem = prepare(config)?;
    let state = optimize(&problem, &design.scenario, &design.options)?;
    let gamma = &state.gamma.gamma;
    let k = interpolate_permeability(gamma, &design.scenario)?.k;
    let grid = problem.grid();
    let mut out = vec![Artifact::json("design.json", &state)];
    match format {
        Format::Csv => {
            out.push(Artifact::new("gamma.csv", cell_csv(grid, gamma)));
            out.push(Artifact::new("permeability.csv", cell_csv(grid, &k)));
        }
        Format::Vtk => out.push(Artifact::new(
            "design.vtk",
            vtk(
                grid,
                "design",
                &[("gamma", gamma), ("permeability", &k)],
                &[],
            ),
        )),
    }
    Ok(out)
}

#[derive(Serialize)]
struct VerdictRow {
    bound: BoundedMaterial,
    sense: Sense,
    group: ClassGroup,
    expected: Verdict,
    verdict: Verdict,
    matches: bool,
    bounded_fraction: f64,
    constraint_active: bool,
    iterations: usize,
    objective: f64,
}

#[derive(Serialize)]
struct Table1Report {
    size: usize,
    volume_fraction: f64,
    k_low: f64,
    k_high: f64,
    q: f64,
    options: OptimizerOptions,
    all_match: bool,
    cells: Vec<VerdictRow>,
}

fn table1(size: usize) -> Result<(Vec<Artifact>, bool), Failure> {
    if size < 2 {
        return Err(Failure::Config(format!(
            "--size must be at least 2, got {size}"
        )));
    }
    let params = ScenarioParams::default();
    let table = run_table1(&canonical_ab(size)?, &canonical_cd(size)?, &params)?;
    let cells: Vec<VerdictRow> = table
        .cells
        .iter()
        .map(|c| VerdictRow {
            bound: c.bound,
            sense: c.sense,
            group: c.group,
            expected: c.expected,
            verdict: c.state.verdict,
            matches: c.matches(),
            bounded_fraction: c.state.bounded_fraction,
            constraint_active: c.state.constraint_active,
            iterations: c.state.iterations,
            objective: c.state.history.last().copied().unwrap_or(f64::NAN),
        })
        .collect();
    let all_match = table.all_match();
    let report = Table1Report {
        size,
        volume_fraction: params.volume_fraction,
        k_low: params.k_low,
        k_high: params.k_high,
        q: params.q,
        options: params.options,
        all_match,
        cells,
    };
    Ok((vec![Artifact::json("table1.json", &report)], all_match))
}

fn verify(options: VerifyOptions) -> Result<(Vec<Artifact>, bool), Failure> {
    if options.size < 3 || options.instances == 0 {
        return Err(Failure::Config(
            "verify needs --size >= 3 and --instances >= 1".into(),
        ));
    }
    let summary = run_verify(options)?;
    log::info!(
        "verify: {} instances, {} failures, max adjoint error {:.2e}, max fd error {:.2e}",
        summary.total,
        summary.failures,
        summary.max_adjoint_error,
        summary.max_fd_error
    );
    let passed = summary.passed;
    Ok((vec![Artifact::json("verify.json", &summary)], passed))
}
