use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use lifted_mln::commands::{self, Command, RunConfig};
use lifted_mln::learner::Optimizer;
use lifted_mln::numerics::rational::parse_fraction;
use lifted_mln::numerics::Rational;
use lifted_mln::oracle::DEFAULT_ATOM_CAP;
use lifted_mln::polytope::FacetMode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CommandArg {
    Wfomc,
    Stats,
    Polytope,
    Learn,
    Check,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OptimizerArg {
    Pgd,
    Ellipsoid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FacetsArg {
    Auto,
    Full,
    Off,
}

/// Lifted weight learning and model counting for two-variable Markov logic networks.
#[derive(Debug, Parser)]
#[command(name = "lifted-mln", version)]
struct Cli {
    #[arg(value_enum)]
    command: CommandArg,
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// Training database (also fixes the domain).
    #[arg(long)]
    db: Option<PathBuf>,
    /// Domain size.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Interiority override; skips facet enumeration.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, value_enum, default_value = "pgd")]
    optimizer: OptimizerArg,
    #[arg(long, value_enum, default_value = "auto")]
    facets: FacetsArg,
    #[arg(long)]
    threads: Option<usize>,
    /// Machine-readable report path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest number of ground atoms the brute-force side will enumerate.
    #[arg(long, default_value_t = DEFAULT_ATOM_CAP)]
    brute_cap: usize,
    /// Target statistics as comma-separated fractions, instead of a database.
    #[arg(long, value_parser = parse_theta)]
    theta: Option<Theta>,
    /// Ignore soft weights when counting.
    #[arg(long)]
    unweighted: bool,
    /// Iteration cap for projected gradient descent.
    #[arg(long, default_value_t = 20_000)]
    max_iterations: usize,
    #[arg(long, hide = true)]
    corrupt_tables: bool,
}

#[derive(Clone, Debug)]
struct Theta(Vec<Rational>);

fn parse_theta(text: &str) -> Result<Theta, String> {
    text.split(',')
        .map(|s| parse_fraction(s).ok_or_else(|| format!("invalid fraction `{}`", s.trim())))
        .collect::<Result<_, _>>()
        .map(Theta)
}

impl Cli {
    fn config(self) -> RunConfig {
        let command = match self.command {
            CommandArg::Wfomc => Command::Wfomc,
            CommandArg::Stats => Command::Stats,
            CommandArg::Polytope => Command::Polytope,
            CommandArg::Learn => Command::Learn,
            CommandArg::Check => Command::Check,
        };
        let mut config = RunConfig::new(command, self.model);
        config.database = self.db;
        config.domain_size = self.n;
        config.epsilon = self.epsilon;
        config.eta = self.eta;
        config.optimizer = match self.optimizer {
            OptimizerArg::Pgd => Optimizer::Pgd,
            OptimizerArg::Ellipsoid => Optimizer::Ellipsoid,
        };
        config.facets = match self.facets {
            FacetsArg::Auto => FacetMode::Auto,
            FacetsArg::Full => FacetMode::Full,
            FacetsArg::Off => FacetMode::Off,
        };
        config.threads = self.threads;
        config.out = self.out;
        config.seed = self.seed;
        config.brute_cap = self.brute_cap;
        config.theta = self.theta.map(|t| t.0);
        config.unweighted = self.unweighted;
        config.max_iterations = self.max_iterations;
        config.corrupt_tables = self.corrupt_tables;
        config
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if matches!(cli.facets, FacetsArg::Full) {
        eprintln!("warning: full facet enumeration grows combinatorially with the number of vertices");
    }
    let config = cli.config();
    match commands::run(&config) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", outcome.summary);
            if config.out.is_none() {
                let _ = write!(stdout, "{}", outcome.report_text());
            }
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status().code() as u8)
        }
    }
}
