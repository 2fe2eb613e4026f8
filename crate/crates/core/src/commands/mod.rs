//! The command pipeline behind the `lifted-mln` binary: configuration,
//! input loading, the five commands and their reports.

pub mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use serde_json::{json, Value};

use crate::learner::{self, LearnError, LearnOptions, LearnStatus, Optimizer};
use crate::logic::{injective_count, parse_database, parse_model, stat_vector, LogicError, ModelSpec, ParseError, World};
use crate::numerics::rational::{falling_factorial, to_f64};
use crate::numerics::Rational;
use crate::oracle::{BruteSpace, OracleError, DEFAULT_ATOM_CAP};
use crate::polytope::{self, FacetMode, Membership, Polytope, PolytopeError};
use crate::wfomc::{LiftedModel, WfomcError};
use report::{float, floats, fraction, fraction_rows, fractions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Wfomc,
    Stats,
    Polytope,
    Learn,
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Wfomc => "wfomc",
            Command::Stats => "stats",
            Command::Polytope => "polytope",
            Command::Learn => "learn",
            Command::Check => "check",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub model: PathBuf,
    pub database: Option<PathBuf>,
    pub domain_size: Option<usize>,
    pub epsilon: f64,
    pub eta: Option<f64>,
    pub optimizer: Optimizer,
    pub facets: FacetMode,
    /// Worker threads for internal reductions; `None` uses the global pool.
    pub threads: Option<usize>,
    pub brute_cap: usize,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Target statistics given directly instead of through a database.
    pub theta: Option<Vec<Rational>>,
    /// Count models with every soft weight set to zero.
    pub unweighted: bool,
    pub max_iterations: usize,
    /// Test hook: perturbs the lifted tables so that `check` must fail.
    pub corrupt_tables: bool,
}

impl RunConfig {
    pub fn new(command: Command, model: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            model: model.into(),
            database: None,
            domain_size: None,
            epsilon: 1e-3,
            eta: None,
            optimizer: Optimizer::Pgd,
            facets: FacetMode::Auto,
            threads: None,
            brute_cap: DEFAULT_ATOM_CAP,
            out: None,
            seed: 0,
            theta: None,
            unweighted: false,
            max_iterations: LearnOptions::default().max_iterations,
            corrupt_tables: false,
        }
    }
}

/// Process exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    CheckFailed,
    InvalidInput,
    Refused,
    BudgetExhausted,
    CapExceeded,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::CheckFailed => 1,
            ExitStatus::InvalidInput => 2,
            ExitStatus::Refused => 3,
            ExitStatus::BudgetExhausted => 4,
            ExitStatus::CapExceeded => 5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub status: ExitStatus,
}

impl Outcome {
    pub fn report_text(&self) -> String {
        report::render(&self.report)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Wfomc(#[from] WfomcError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

impl CommandError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CommandError::Wfomc(WfomcError::Unsatisfiable(_))
            | CommandError::Polytope(PolytopeError::Wfomc(WfomcError::Unsatisfiable(_))) => ExitStatus::Refused,
            CommandError::Polytope(PolytopeError::TooLarge) | CommandError::Oracle(OracleError::CapExceeded { .. }) => {
                ExitStatus::CapExceeded
            }
            CommandError::Learn(e) => match e {
                LearnError::Infeasible { .. } | LearnError::ZeroInteriority { .. } => ExitStatus::Refused,
                LearnError::Wfomc(WfomcError::Unsatisfiable(_))
                | LearnError::Polytope(PolytopeError::Wfomc(WfomcError::Unsatisfiable(_))) => ExitStatus::Refused,
                LearnError::Polytope(PolytopeError::TooLarge) => ExitStatus::CapExceeded,
                _ => ExitStatus::InvalidInput,
            },
            _ => ExitStatus::InvalidInput,
        }
    }
}

/// Parsed inputs shared by every command.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub model: ModelSpec,
    pub world: Option<World>,
    pub n: usize,
}

fn read(path: &Path) -> Result<String, CommandError> {
    std::fs::read_to_string(path).map_err(|source| CommandError::Io { path: path.to_path_buf(), source })
}

pub fn load(config: &RunConfig) -> Result<Inputs, CommandError> {
    if !(config.epsilon > 0.0 && config.epsilon.is_finite()) {
        return Err(CommandError::Invalid(format!("epsilon must be positive, got {}", config.epsilon)));
    }
    if let Some(eta) = config.eta {
        if eta.is_nan() || eta <= 0.0 {
            return Err(CommandError::Invalid(format!("eta must be positive, got {eta}")));
        }
    }
    let model = parse_model(&read(&config.model)?)
        .map_err(|source| CommandError::Parse { path: config.model.clone(), source })?;
    let world = match &config.database {
        Some(path) => Some(
            parse_database(&read(path)?, &model.vocabulary)
                .map_err(|source| CommandError::Parse { path: path.clone(), source })?,
        ),
        None => None,
    };
    let n = match (config.domain_size, &world) {
        (Some(n), Some(w)) if n != w.domain_size() => {
            return Err(CommandError::Invalid(format!(
                "domain size {n} disagrees with the database's {} constants",
                w.domain_size()
            )))
        }
        (Some(n), _) => n,
        (None, Some(w)) => w.domain_size(),
        (None, None) => return Err(CommandError::Invalid("a database or a domain size is required".into())),
    };
    let k = model.max_soft_vars();
    if n == 0 || n < k {
        return Err(LogicError::DomainTooSmall { n, k }.into());
    }
    Ok(Inputs { model, world, n })
}

/// Runs the command on a dedicated pool when a thread count is given and
/// writes the report to the output path.
pub fn run(config: &RunConfig) -> Result<Outcome, CommandError> {
    let outcome = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| CommandError::Invalid(format!("thread pool: {e}")))?
            .install(|| execute(config)),
        None => execute(config),
    }?;
    if let Some(path) = &config.out {
        std::fs::write(path, outcome.report_text()).map_err(|source| CommandError::Io { path: path.clone(), source })?;
    }
    Ok(outcome)
}

pub fn execute(config: &RunConfig) -> Result<Outcome, CommandError> {
    let inputs = load(config)?;
    match config.command {
        Command::Wfomc => cmd_wfomc(config, &inputs),
        Command::Stats => cmd_stats(config, &inputs),
        Command::Polytope => cmd_polytope(config, &inputs),
        Command::Learn => cmd_learn(config, &inputs),
        Command::Check => cmd_check(config, &inputs),
    }
}

/// Statistic-space weights `λ_i = w_i · n!/(n-k_i)!` of the model's per-grounding weights.
pub fn statistic_weights(model: &ModelSpec, n: usize) -> Vec<f64> {
    model
        .soft
        .iter()
        .map(|s| s.weight * falling_factorial(n as u64, s.formula.num_vars() as u64) as f64)
        .collect()
}

fn lifted_model(config: &RunConfig, inputs: &Inputs) -> Result<LiftedModel, CommandError> {
    let lifted = LiftedModel::new(&inputs.model, inputs.n)?;
    Ok(if config.corrupt_tables { lifted.corrupted() } else { lifted })
}

fn theta(config: &RunConfig, inputs: &Inputs) -> Result<Option<Vec<Rational>>, CommandError> {
    if let Some(t) = &config.theta {
        return Ok(Some(t.clone()));
    }
    match &inputs.world {
        Some(w) => Ok(Some(stat_vector(&inputs.model, w)?.0)),
        None => Ok(None),
    }
}

fn formula_texts(model: &ModelSpec) -> Vec<String> {
    model.soft.iter().map(|s| s.formula.display(&model.vocabulary).to_string()).collect()
}

pub fn cmd_wfomc(config: &RunConfig, inputs: &Inputs) -> Result<Outcome, CommandError> {
    let start = Instant::now();
    let lifted = lifted_model(config, inputs)?;
    let lambda = if config.unweighted { vec![0.0; inputs.model.num_soft()] } else { statistic_weights(&inputs.model, inputs.n) };
    let log_z = lifted.log_z(&lambda).ln();
    let exact = lambda.iter().all(|&l| l == 0.0).then(|| lifted.exact_world_count());
    let seconds = start.elapsed().as_secs_f64();
    let mut summary = format!("domain size {}: log Z = {log_z}", inputs.n);
    if let Some(c) = &exact {
        let _ = write!(summary, ", model count = {c}");
    }
    let report = json!({
        "command": "wfomc",
        "domain_size": inputs.n,
        "lambda": floats(&lambda),
        "log_z": float(log_z),
        "exact_count": exact.map(|c| Value::String(c.to_string())).unwrap_or(Value::Null),
        "seconds": float(seconds),
    });
    Ok(Outcome { report, summary, status: ExitStatus::Success })
}

pub fn cmd_stats(_config: &RunConfig, inputs: &Inputs) -> Result<Outcome, CommandError> {
    let world = inputs.world.as_ref().ok_or_else(|| CommandError::Invalid("stats needs a database".into()))?;
    let theta = stat_vector(&inputs.model, world)?;
    let mut summary = String::new();
    let mut formulas = Vec::new();
    for ((s, text), q) in inputs.model.soft.iter().zip(formula_texts(&inputs.model)).zip(&theta.0) {
        let groundings = falling_factorial(inputs.n as u64, s.formula.num_vars() as u64);
        let count = injective_count(&s.formula, world);
        let _ = writeln!(summary, "{text}: {} ({count} of {groundings} injective groundings)", crate::numerics::rational::fraction_string(q));
        formulas.push(json!({
            "formula": text,
            "groundings": groundings,
            "true_groundings": count,
            "statistic": fraction(q),
            "value": float(to_f64(q)),
        }));
    }
    let report = json!({ "command": "stats", "domain_size": inputs.n, "formulas": formulas });
    Ok(Outcome { report, summary: summary.trim_end().to_string(), status: ExitStatus::Success })
}

pub fn cmd_polytope(config: &RunConfig, inputs: &Inputs) -> Result<Outcome, CommandError> {
    let poly = Polytope::build(&inputs.model, inputs.n, config.facets)?;
    let mut summary = format!(
        "{} points, {} vertices, affine dimension {} in {} formulas",
        poly.points.len(),
        poly.vertices.len(),
        poly.dim(),
        poly.num_formulas
    );
    let rows = |pts: &[crate::logic::StatVector]| Value::Array(pts.iter().map(|p| fractions(&p.0)).collect());
    let facets = poly.facets.as_ref().map(|fs| {
        Value::Array(fs.iter().map(|f| json!({ "normal": fractions(&f.normal), "offset": fraction(&f.offset) })).collect())
    });
    let mut report = json!({
        "command": "polytope",
        "domain_size": inputs.n,
        "formulas": formula_texts(&inputs.model),
        "points": rows(&poly.points),
        "vertices": rows(&poly.vertices),
        "a_eq": fraction_rows(poly.a_eq()),
        "c_eq": fractions(poly.c_eq()),
        "dim": poly.dim(),
        "facets": facets.unwrap_or(Value::Null),
    });
    if let Some(theta) = theta(config, inputs)? {
        if theta.len() != poly.num_formulas {
            return Err(CommandError::Invalid(format!("theta has {} entries, expected {}", theta.len(), poly.num_formulas)));
        }
        let position = match poly.membership(&theta) {
            Membership::Inside { .. } => "inside",
            Membership::Boundary { .. } => "boundary",
            Membership::Outside { .. } => "outside",
        };
        let mut t = json!({ "theta": fractions(&theta), "membership": position });
        match poly.interiority(&theta) {
            Some(i) => {
                t["eta"] = float(i.eta);
                t["eta_squared"] = i.eta_squared.as_ref().map(fraction).unwrap_or(Value::Null);
                t["facet"] = i.facet.map(Value::from).unwrap_or(Value::Null);
                let _ = write!(summary, "; theta is {position}, eta = {}", i.eta);
            }
            None => {
                let bound = poly.interiority_upper_bound(&theta, 64, config.seed);
                t["eta_upper_bound"] = float(bound);
                let _ = write!(summary, "; theta is {position}, eta <= {bound} (facets not computed)");
            }
        }
        report["theta"] = t;
    }
    Ok(Outcome { report, summary, status: ExitStatus::Success })
}

pub fn cmd_learn(config: &RunConfig, inputs: &Inputs) -> Result<Outcome, CommandError> {
    let theta = theta(config, inputs)?.ok_or_else(|| CommandError::Invalid("learn needs a database or theta".into()))?;
    let options = LearnOptions {
        epsilon: config.epsilon,
        eta: config.eta,
        optimizer: config.optimizer,
        facets: config.facets,
        max_iterations: config.max_iterations,
    };
    let base = json!({
        "command": "learn",
        "domain_size": inputs.n,
        "formulas": formula_texts(&inputs.model),
        "theta": fractions(&theta),
        "epsilon": float(config.epsilon),
        "optimizer": config.optimizer.name(),
    });
    let mut report = base;
    match learner::learn(&inputs.model, inputs.n, &theta, &options) {
        Ok(r) => {
            let status = match r.status {
                LearnStatus::Converged => ExitStatus::Success,
                LearnStatus::BudgetExhausted => ExitStatus::BudgetExhausted,
            };
            report["status"] = Value::from(if status == ExitStatus::Success { "converged" } else { "budget-exhausted" });
            report["lambda"] = floats(&r.lambda);
            report["weights"] = floats(&r.weights);
            report["dual_value"] = float(r.value);
            report["expectations"] = floats(&r.expectations);
            report["moment_gap"] = float(r.moment_gap);
            report["certified_gap"] = float(r.certified_gap);
            report["eta"] = float(r.eta);
            report["radius"] = float(r.radius);
            report["log_world_count"] = float(r.log_world_count);
            report["iterations"] = Value::from(r.iterations);
            report["oracle_calls"] = Value::from(r.oracle_calls);
            let mut summary = format!(
                "{} after {} iterations ({} oracle calls): moment gap {:.3e}",
                report["status"].as_str().unwrap_or_default(),
                r.iterations,
                r.oracle_calls,
                r.moment_gap
            );
            for (text, w) in formula_texts(&inputs.model).iter().zip(&r.weights) {
                let _ = write!(summary, "\n{w:.6} :: {text}");
            }
            Ok(Outcome { report, summary, status })
        }
        Err(LearnError::Infeasible { normal, offset }) => {
            report["status"] = Value::from("infeasible");
            report["certificate"] = json!({ "normal": fractions(&normal), "offset": fraction(&offset) });
            let summary = "refused: infeasible statistics, no distribution over worlds attains theta".to_string();
            Ok(Outcome { report, summary, status: ExitStatus::Refused })
        }
        Err(LearnError::ZeroInteriority { facet }) => {
            report["status"] = Value::from("zero-interiority");
            report["eta"] = float(0.0);
            report["facet"] = facet
                .as_ref()
                .map(|f| json!({ "normal": fractions(&f.normal), "offset": fraction(&f.offset) }))
                .unwrap_or(Value::Null);
            let summary =
                "refused: theta lies on the polytope boundary (eta = 0), the optimal weights diverge".to_string();
            Ok(Outcome { report, summary, status: ExitStatus::Refused })
        }
        Err(e) => Err(e.into()),
    }
}

fn relative_difference(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }
}

fn max_abs_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

const CHECK_TOLERANCE: f64 = 1e-9;
const CHECK_SAMPLES: usize = 3;

/// Cross-checks the lifted pipeline against brute-force enumeration.
pub fn cmd_check(config: &RunConfig, inputs: &Inputs) -> Result<Outcome, CommandError> {
    let model = &inputs.model;
    let l = model.num_soft();
    let lifted = lifted_model(config, inputs)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let mut lambdas = vec![vec![0.0; l], statistic_weights(model, inputs.n)];
    for _ in 0..CHECK_SAMPLES {
        lambdas.push((0..l).map(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0)).collect());
    }
    let lifted_count = lifted.exact_world_count();
    let lifted_evals: Vec<_> = lambdas.iter().map(|lam| lifted.evaluate(lam)).collect();
    let lifted_points = polytope::enumerate_points(model, inputs.n);

    let brute = match BruteSpace::build(model, inputs.n, config.brute_cap) {
        Ok(b) => Some(b),
        Err(OracleError::CapExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut checks = Vec::new();
    let mut all_pass = true;
    let mut record = |entry: Value, pass: bool| {
        all_pass &= pass;
        checks.push(entry);
    };
    let brute_count = brute.as_ref().map(|b| b.world_count());
    let pass = brute_count.as_ref().map(|c| *c == lifted_count);
    record(
        json!({
            "quantity": "world_count",
            "lifted": lifted_count.to_string(),
            "brute": brute_count.map(|c| Value::String(c.to_string())).unwrap_or(Value::Null),
            "pass": pass,
        }),
        pass.unwrap_or(true),
    );
    for (lam, eval) in lambdas.iter().zip(&lifted_evals) {
        let lz = eval.log_z.ln();
        let bz = brute.as_ref().map(|b| b.log_z(lam));
        let diff = bz.map(|b| relative_difference(lz, b));
        let pass = diff.map(|d| d <= CHECK_TOLERANCE);
        record(
            json!({
                "quantity": "log_z",
                "lambda": floats(lam),
                "lifted": float(lz),
                "brute": bz.map(float).unwrap_or(Value::Null),
                "difference": diff.map(float).unwrap_or(Value::Null),
                "pass": pass,
            }),
            pass.unwrap_or(true),
        );
        let be = brute.as_ref().map(|b| b.expectations(lam).ok());
        let (diff, pass) = match (&eval.expectations, &be) {
            (_, None) => (None, None),
            (Some(a), Some(Some(b))) => {
                let d = max_abs_difference(a, b);
                (Some(d), Some(d <= CHECK_TOLERANCE))
            }
            (None, Some(None)) => (None, Some(true)),
            _ => (None, Some(false)),
        };
        record(
            json!({
                "quantity": "expectations",
                "lambda": floats(lam),
                "lifted": eval.expectations.as_deref().map(floats).unwrap_or(Value::Null),
                "brute": be.flatten().as_deref().map(floats).unwrap_or(Value::Null),
                "difference": diff.map(float).unwrap_or(Value::Null),
                "pass": pass,
            }),
            pass.unwrap_or(true),
        );
    }
    match &lifted_points {
        Ok(points) => {
            let brute_points: Option<Vec<_>> = brute.as_ref().map(|b| b.points().into_iter().collect());
            let pass = brute_points.as_ref().map(|b| b == points);
            record(
                json!({
                    "quantity": "points",
                    "lifted": points.len(),
                    "brute": brute_points.map(|b| Value::from(b.len())).unwrap_or(Value::Null),
                    "pass": pass,
                }),
                pass.unwrap_or(true),
            );
        }
        Err(PolytopeError::TooLarge) => record(json!({ "quantity": "points", "lifted": Value::Null, "pass": Value::Null }), true),
        Err(e) => return Err(e.clone().into()),
    }
    let failures = checks.iter().filter(|c| c["pass"] == Value::Bool(false)).count();
    let (status, verdict) = if brute.is_none() {
        (ExitStatus::CapExceeded, "lifted only: the brute-force side exceeds the atom cap")
    } else if all_pass {
        (ExitStatus::Success, "pass")
    } else {
        (ExitStatus::CheckFailed, "fail")
    };
    let mut summary = format!("{verdict} ({} checks, {failures} failed)", checks.len());
    for c in checks.iter().filter(|c| c["pass"] == Value::Bool(false)) {
        let _ = write!(
            summary,
            "\n  {}: lifted {} vs brute {}",
            c["quantity"].as_str().unwrap_or_default(),
            c["lifted"],
            c["brute"]
        );
    }
    let report = json!({
        "command": "check",
        "domain_size": inputs.n,
        "seed": config.seed,
        "brute_cap": config.brute_cap,
        "verdict": verdict,
        "checks": checks,
    });
    Ok(Outcome { report, summary, status })
}
