use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::{Deserialize, Serialize};
use sl_spectra::casestudy::{
    observability_test, solve_case_study, transformed_problem, CaseStudySpectrum, ObservabilityReport,
    DEFAULT_OBSERVABILITY_TOL,
};
use sl_spectra::eigensolve::{coefficients_of, solve_spectrum, synthesize, SolverOptions, SpectralDecomposition};
use sl_spectra::fracspace::FractionalParams;
use sl_spectra::io::DecompositionRecord;
use sl_spectra::oracle::{assemble, crank_nicolson};
use sl_spectra::semigroup::{growth_bound, is_exponentially_stable, trajectory, GrowthReport, StabilityReport};
use sl_spectra::verify::{self, Suite};
use sl_spectra::{bc_residual, CoeffExpr, FractionalSpace, GridFunction};

use crate::config::ProblemConfig;
use crate::output::Sink;
use crate::{CliError, ProblemArgs};

const GRAM_TOL: f64 = 1e-8;
const BC_TOL: f64 = 1e-8;
const ROOT_RESIDUAL_TOL: f64 = 1e-10;
const SIMILARITY_TOL: f64 = 1e-7;

#[derive(Serialize)]
struct Manifest {
    command: String,
    parameters: serde_json::Value,
    config_hash: Option<String>,
    seeds: Vec<u64>,
    tolerances: serde_json::Value,
    tool_version: &'static str,
    wall_time_seconds: f64,
}

impl Manifest {
    fn write(
        sink: &Sink,
        command: &str,
        parameters: serde_json::Value,
        config: Option<&ProblemConfig>,
        seeds: Vec<u64>,
        tolerances: serde_json::Value,
        start: Instant,
    ) -> Result<(), CliError> {
        sink.write_json(
            "manifest.json",
            &Manifest {
                command: command.to_string(),
                parameters,
                config_hash: config.map(|c| c.hash()),
                seeds,
                tolerances,
                tool_version: env!("CARGO_PKG_VERSION"),
                wall_time_seconds: start.elapsed().as_secs_f64(),
            },
        )
    }
}

fn load_config(args: &ProblemArgs) -> Result<ProblemConfig, CliError> {
    match (&args.config, &args.preset) {
        (Some(path), None) => {
            if args.d.is_some() || args.k0.is_some() {
                return Err(CliError::Input("--D and --k0 apply only with --preset".into()));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            ProblemConfig::from_json(&text)
        }
        (None, Some(name)) => ProblemConfig::preset(name, args.d, args.k0),
        _ => Err(CliError::Input(
            "exactly one of --config or --preset is required".into(),
        )),
    }
}

fn solve(config: &ProblemConfig, modes: usize) -> Result<SpectralDecomposition<f64>, CliError> {
    if modes == 0 {
        return Err(CliError::Input("--modes must be at least 1".into()));
    }
    Ok(solve_spectrum::<f64>(
        &config.problem()?,
        modes,
        &SolverOptions::default(),
    )?)
}

#[derive(Serialize)]
struct CaseStudySection {
    spectrum: CaseStudySpectrum,
    /// Largest relative gap between the computed eigenvalues and `−s_n² − κ`.
    similarity_error: f64,
    max_root_residual: f64,
}

#[derive(Serialize)]
struct EigsReport {
    modes: usize,
    eigenvalues: Vec<f64>,
    gamma: f64,
    max_gram_error: f64,
    max_bc_residual: f64,
    max_scaled_bc_residual: f64,
    stability: StabilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    case_study: Option<CaseStudySection>,
    passed: bool,
}

pub fn eigs(args: &ProblemArgs, modes: usize, out: Option<PathBuf>) -> Result<bool, CliError> {
    let start = Instant::now();
    let config = load_config(args)?;
    let sink = Sink::new(out)?;
    let dec = solve(&config, modes)?;
    let prob = dec.problem();

    let mut max_gram = 0.0f64;
    for (i, row) in dec.gram().iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            max_gram = max_gram.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let mut csv = String::from("n,lambda,bc_residual_a,bc_residual_b,scaled_bc_residual\n");
    let (mut max_bc, mut max_scaled) = (0.0f64, 0.0f64);
    for (i, phi) in dec.eigenfunctions().iter().enumerate() {
        let (ra, rb) = bc_residual(prob, phi);
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let (fmax, dmax) = (sup(phi.values()), phi.d1().map(sup).unwrap_or(0.0));
        let size = fmax.max(dmax);
        let scale_a = (prob.bc_a.alpha.abs() + prob.bc_a.beta.abs()) * size;
        let scale_b = (prob.bc_b.alpha.abs() + prob.bc_b.beta.abs()) * size;
        let scaled = (ra.abs() / scale_a).max(rb.abs() / scale_b);
        max_bc = max_bc.max(ra.abs().max(rb.abs()));
        max_scaled = max_scaled.max(scaled);
        let _ = writeln!(
            csv,
            "{},{:?},{:?},{:?},{:?}",
            i + 1,
            dec.eigenvalues()[i],
            ra,
            rb,
            scaled
        );
    }

    let case_study = match config.dcr_model()? {
        Some(model) if (model.d - 1.0).abs() <= 1e-12 => {
            let cs = solve_case_study(&model, modes)?;
            let similarity_error = dec
                .eigenvalues()
                .iter()
                .zip(&cs.lambda)
                .map(|(l, c)| (l - (c - model.kappa)).abs() / l.abs())
                .fold(0.0, f64::max);
            let max_root_residual = cs.residuals.iter().copied().fold(0.0, f64::max);
            Some(CaseStudySection {
                spectrum: cs,
                similarity_error,
                max_root_residual,
            })
        }
        _ => None,
    };
    let passed = max_gram <= GRAM_TOL
        && max_scaled <= BC_TOL
        && case_study
            .as_ref()
            .is_none_or(|c| c.max_root_residual <= ROOT_RESIDUAL_TOL && c.similarity_error <= SIMILARITY_TOL);

    sink.write_json("decomposition.json", &DecompositionRecord::new(&dec, None))?;
    sink.write("residuals.csv", &csv)?;
    sink.write_json(
        "report.json",
        &EigsReport {
            modes,
            eigenvalues: dec.eigenvalues().to_vec(),
            gamma: dec.gamma(),
            max_gram_error: max_gram,
            max_bc_residual: max_bc,
            max_scaled_bc_residual: max_scaled,
            stability: is_exponentially_stable(dec.spectrum(), sl_spectra::semigroup::DEFAULT_STABILITY_TOL),
            case_study,
            passed,
        },
    )?;
    Manifest::write(
        &sink,
        "eigs",
        serde_json::json!({ "modes": modes }),
        Some(&config),
        vec![],
        serde_json::json!({
            "gram": GRAM_TOL,
            "bc": BC_TOL,
            "root_residual": ROOT_RESIDUAL_TOL,
            "similarity": SIMILARITY_TOL,
            "solver": SolverOptions::default(),
        }),
        start,
    )?;
    Ok(passed)
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Initial state as an expression in z.
    #[arg(long)]
    x0: String,
    /// Comma-separated output times, nonnegative and increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    times: Vec<f64>,
    #[arg(long, default_value_t = sl_spectra::eigensolve::DEFAULT_MODES)]
    modes: usize,
    /// Also report norms in the fractional space of this order.
    #[arg(long)]
    alpha: Option<f64>,
    /// Gap `μ − λ_1` for the fractional space.
    #[arg(long, default_value_t = 1.0, conflicts_with = "mu")]
    epsilon: f64,
    /// Explicit shift `μ` for the fractional space.
    #[arg(long)]
    mu: Option<f64>,
    /// Compare against a Crank–Nicolson finite-difference run.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = 2000)]
    fd_intervals: usize,
    #[arg(long, default_value_t = sl_spectra::oracle::DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = 1e-3)]
    verify_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct OracleComparison {
    intervals: usize,
    dt: f64,
    /// `‖x_modal(t) − x_fd(t)‖_{L²}` per output time.
    l2_discrepancy: Vec<f64>,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct SimulateReport {
    times: Vec<f64>,
    kappa: f64,
    rho_norms: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fractional: Option<FractionalParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_norms: Option<Vec<f64>>,
    /// Fractional norms never increase between output times.
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_norms_nonincreasing: Option<bool>,
    growth: GrowthReport,
    stability: StabilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleComparison>,
    passed: bool,
}

pub fn simulate(args: &SimulateArgs) -> Result<bool, CliError> {
    let start = Instant::now();
    let config = load_config(&args.problem)?;
    let x0 = CoeffExpr::parse(&args.x0)?;
    if args.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(CliError::Input("times must be finite and nonnegative".into()));
    }
    if args.times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::Input("times must be strictly increasing".into()));
    }
    let sink = Sink::new(args.out.clone())?;
    let dec = solve(&config, args.modes)?;
    let spectrum = dec.spectrum();
    let f0 = GridFunction::from_expr(dec.grid().clone(), &x0);
    let c0 = coefficients_of(&f0, &dec)?;
    let space = match args.alpha {
        None => None,
        Some(a) => Some(match args.mu {
            Some(mu) => FractionalSpace::with_mu(spectrum, a, mu)?,
            None => FractionalSpace::with_epsilon(spectrum, a, args.epsilon)?,
        }),
    };
    let traj = trajectory(spectrum, &c0, &args.times, 0.0, space.as_ref())?;
    let growth = growth_bound(spectrum, &traj, space.as_ref())?;
    let stability = is_exponentially_stable(spectrum, sl_spectra::semigroup::DEFAULT_STABILITY_TOL);

    let mut csv = String::from("t");
    for z in dec.grid().nodes.iter() {
        let _ = write!(csv, ",{z:?}");
    }
    csv.push('\n');
    let mut states = Vec::with_capacity(traj.states.len());
    for (t, c) in traj.times.iter().zip(&traj.states) {
        let f = synthesize(c, &dec)?;
        let _ = write!(csv, "{t:?}");
        for v in f.values() {
            let _ = write!(csv, ",{v:?}");
        }
        csv.push('\n');
        states.push(f);
    }

    let oracle = if args.verify {
        let op = assemble(dec.problem(), args.fd_intervals)?;
        let x_fd0 = op.sample(|z| x0.eval(z));
        let mut l2 = Vec::with_capacity(states.len());
        for (t, f) in traj.times.iter().zip(&states) {
            let x = crank_nicolson(&op, &x_fd0, *t, args.dt)?;
            let fd = op.to_grid_function(&x, dec.grid().clone());
            let diff = f.axpy(-1.0, &fd)?;
            l2.push(sl_spectra::grid::inner_product_l2(&diff, &diff)?.sqrt());
        }
        let passed = l2.iter().all(|d| *d <= args.verify_tol);
        Some(OracleComparison {
            intervals: args.fd_intervals,
            dt: args.dt,
            l2_discrepancy: l2,
            tolerance: args.verify_tol,
            passed,
        })
    } else {
        None
    };
    let alpha_norms_nonincreasing = traj.alpha_norms.as_ref().map(|n| n.windows(2).all(|w| w[1] <= w[0]));
    let passed = growth.holds
        && oracle.as_ref().is_none_or(|o| o.passed)
        && (!stability.stable || alpha_norms_nonincreasing.unwrap_or(true));

    sink.write("trajectory.csv", &csv)?;
    sink.write_json(
        "report.json",
        &SimulateReport {
            times: traj.times.clone(),
            kappa: traj.kappa,
            rho_norms: traj.rho_norms.clone(),
            fractional: space.as_ref().map(|s| s.params()),
            alpha_norms: traj.alpha_norms.clone(),
            alpha_norms_nonincreasing,
            growth,
            stability,
            oracle,
            passed,
        },
    )?;
    Manifest::write(
        &sink,
        "simulate",
        serde_json::json!({
            "x0": args.x0,
            "times": args.times,
            "modes": args.modes,
            "alpha": args.alpha,
            "epsilon": args.epsilon,
            "mu": args.mu,
            "verify": args.verify,
            "fd_intervals": args.fd_intervals,
            "dt": args.dt,
        }),
        Some(&config),
        vec![],
        serde_json::json!({ "verify": args.verify_tol, "solver": SolverOptions::default() }),
        start,
    )?;
    Ok(passed)
}

#[derive(Args, Debug)]
pub struct ObserveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Observation point, 0 or 1.
    #[arg(long, default_value_t = 0.0)]
    z0: f64,
    #[arg(long, default_value_t = 50)]
    modes: usize,
    #[arg(long, default_value_t = DEFAULT_OBSERVABILITY_TOL)]
    tol: f64,
    /// Trace values from a file `{"z0": .., "values": [..]}` instead of the model.
    #[arg(long, conflicts_with_all = ["config", "preset"])]
    synthetic: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SyntheticInput {
    z0: f64,
    values: Vec<f64>,
    #[serde(default = "half")]
    alpha: f64,
}

fn half() -> f64 {
    0.5
}

pub fn observe(args: &ObserveArgs) -> Result<bool, CliError> {
    let start = Instant::now();
    let sink = Sink::new(args.out.clone())?;
    let (report, config): (ObservabilityReport, Option<ProblemConfig>) = match &args.synthetic {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let input: SyntheticInput =
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid synthetic input: {e}")))?;
            (
                ObservabilityReport::from_values(input.z0, input.alpha, &input.values, args.tol)?,
                None,
            )
        }
        None => {
            let config = load_config(&args.problem)?;
            let model = config
                .dcr_model()?
                .ok_or_else(|| CliError::Input("observe needs the dcr preset".into()))?;
            sl_spectra::casestudy::Endpoint::from_z(args.z0)?;
            let cs = solve_case_study(&model, args.modes)?;
            let dec = solve_spectrum::<f64>(
                &transformed_problem(&model, false)?,
                args.modes,
                &SolverOptions::default(),
            )?;
            (
                observability_test(&cs, &dec, args.z0, args.modes, args.tol)?,
                Some(config),
            )
        }
    };
    sink.write_json("report.json", &report)?;
    Manifest::write(
        &sink,
        "observe",
        serde_json::json!({
            "z0": args.z0,
            "modes": args.modes,
            "synthetic": args.synthetic.as_ref().map(|p| p.display().to_string()),
        }),
        config.as_ref(),
        vec![],
        serde_json::json!({ "verdict": args.tol, "agreement": sl_spectra::casestudy::AGREEMENT_TOL }),
        start,
    )?;
    Ok(report.verdict)
}

pub fn verify(suite: &str, seed: u64, out: Option<PathBuf>) -> Result<bool, CliError> {
    let start = Instant::now();
    let suite: Suite = suite.parse()?;
    let sink = Sink::new(out)?;
    let report = verify::run(suite, seed);
    sink.write_json("report.json", &report)?;
    Manifest::write(
        &sink,
        "verify",
        serde_json::json!({ "suite": suite }),
        None,
        vec![seed],
        serde_json::Value::Null,
        start,
    )?;
    Ok(report.all_passed())
}
