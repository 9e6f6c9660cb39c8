//! Command-line front end.
//!
//! Exit status: 0 on success, 2 when a checked claim fails, 64 on usage or
//! input errors.

mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::graph::{BoundaryPolicy, ModelSpec};
use crate::solver::SolverOptions;
use crate::Error;

pub use run::{
    execute, resolve_vertex, ClassifyConfig, EmbedConfig, EnergyConfig, GraphConfig, Outcome,
    PolysConfig, ResolventConfig, RunConfig, WalkRunConfig, CONFIG_PREFIX,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "resistnet", version, about = "Energy, harmonic and deficiency analysis of weighted graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deficiency polynomials p_n, q_n, their evaluations and identity checks.
    Polys(PolysArgs),
    /// Harmonic and deficiency dimension estimates for a line model.
    Classify(ClassifyArgs),
    /// Seeded random walk against the exact transition kernel.
    Walk(WalkArgs),
    /// Certificate for the tree-to-half-line compatible pair.
    Embed(EmbedArgs),
    /// Energy and Laplacian of a vector on a serialized graph.
    Energy(EnergyArgs),
    /// Solves (I + Δ)u = δ_x on a model truncation.
    Resolvent(ResolventArgs),
    /// Writes a model truncation in the graph text format.
    Graph(GraphArgs),
    /// Reruns the command recorded in a report or text output.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write curves or tables as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelKind {
    HalfLine,
    SymLine,
    AbLine,
    DyadicTree,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Boundary {
    Free,
    Absorbing,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Conductance ratio of the geometric chains (M > 1).
    #[arg(long = "M", value_parser = parse_ratio)]
    pub m: Option<f64>,
    /// Right-hand ratio of the ab-line (A > 1).
    #[arg(long = "A", value_parser = parse_ratio)]
    pub a: Option<f64>,
    /// Left-hand ratio of the ab-line (B > 1).
    #[arg(long = "B", value_parser = parse_ratio)]
    pub b: Option<f64>,
    /// Edge conductance of the dyadic tree.
    #[arg(long = "c", value_parser = parse_positive, default_value_t = 1.0)]
    pub conductance: f64,
}

#[derive(Debug, Args)]
pub struct PolysArgs {
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..=400))]
    pub n_max: u64,
    /// Evaluate at this rational ξ (`num/den`) instead of listing coefficients.
    #[arg(long)]
    pub xi: Option<String>,
    #[arg(long)]
    pub check_identities: bool,
    /// X-order of the identity checks [default: min(n-max, 16)].
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, requires = "xi")]
    pub q_limit: bool,
    #[arg(long, default_value_t = 1e-12)]
    pub q_tolerance: f64,
    #[arg(long, default_value_t = 10_000)]
    pub q_cap: usize,
    /// Growth bounds of p_n(ξ), q_n(ξ) up to n-max (needs n-max >= 10).
    #[arg(long, requires = "xi")]
    pub growth: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "N", default_value_t = 200)]
    pub depth: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Truncation depth [default: large enough that no walk reaches the frontier].
    #[arg(long = "N")]
    pub depth: Option<usize>,
    /// Start position: line coordinate, or heap index on the tree.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub start: i64,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, env = "RESISTNET_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long = "N", default_value_t = 8, value_parser = clap::value_parser!(u64).range(2..=20))]
    pub depth: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, env = "RESISTNET_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Use the weight ψ ≡ 1, which breaks intertwining.
    #[arg(long, hide = true)]
    pub wrong_psi: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Graph in the text format.
    #[arg(long)]
    pub graph: PathBuf,
    /// CSV `vertex,value`.
    #[arg(long)]
    pub vector: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ResolventArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "N", default_value_t = 40)]
    pub depth: usize,
    /// Position of the point mass (line coordinate or tree heap index).
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub x: i64,
    /// Frontier treatment: `absorbing` pins frontier values to 0.
    #[arg(long, value_enum, default_value_t = Boundary::Absorbing)]
    pub boundary: Boundary,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "N", default_value_t = 10)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A JSON report or text output carrying a config echo.
    pub file: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_ratio(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 1.0 {
        Ok(v)
    } else {
        Err(format!("expected a finite real greater than 1, got {s}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a finite positive real, got {s}"))
    }
}

/// A usage problem found after parsing; exits with status 64.
#[derive(Debug)]
pub struct UsageError(pub String);

impl ModelArgs {
    fn spec(&self, depth: usize) -> Result<ModelSpec, UsageError> {
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| UsageError(format!("--model {} needs --{flag}", self.name())));
        Ok(match self.model {
            ModelKind::HalfLine => ModelSpec::half_line(need(self.m, "M")?, depth),
            ModelKind::SymLine => ModelSpec::sym_line(need(self.m, "M")?, depth),
            ModelKind::AbLine => ModelSpec::ab_line(need(self.a, "A")?, need(self.b, "B")?, depth),
            ModelKind::DyadicTree => ModelSpec::dyadic_tree(self.conductance, depth),
        })
    }

    fn name(&self) -> &'static str {
        match self.model {
            ModelKind::HalfLine => "half-line",
            ModelKind::SymLine => "sym-line",
            ModelKind::AbLine => "ab-line",
            ModelKind::DyadicTree => "dyadic-tree",
        }
    }
}

/// Resolves parsed arguments into a config; `None` for `replay`.
pub fn resolve(command: &Command) -> Result<Option<RunConfig>, UsageError> {
    let config = match command {
        Command::Polys(a) => {
            let n_max = a.n_max as usize;
            let xi = match &a.xi {
                Some(text) => {
                    let r = crate::exact::parse_rational(text).map_err(|e| UsageError(e.to_string()))?;
                    Some(crate::exact::format_rational(&r))
                }
                None => None,
            };
            if a.growth && n_max < 10 {
                return Err(UsageError("--growth needs --n-max of at least 10".into()));
            }
            RunConfig::Polys(PolysConfig {
                n_max,
                xi,
                check_identities: a.check_identities,
                order: a.order.unwrap_or(n_max.min(16)),
                q_limit: a.q_limit,
                q_tolerance: a.q_tolerance,
                q_cap: a.q_cap,
                growth: a.growth,
            })
        }
        Command::Classify(a) => {
            if !matches!(a.model.model, ModelKind::HalfLine | ModelKind::SymLine) {
                return Err(UsageError("classify supports --model half-line and sym-line".into()));
            }
            RunConfig::Classify(ClassifyConfig {
                model: a.model.spec(a.depth)?,
            })
        }
        Command::Walk(a) => {
            let reach = a.start.unsigned_abs() as usize + a.steps + 1;
            let depth = a.depth.unwrap_or(match a.model.model {
                ModelKind::DyadicTree => (64 - (a.start.max(0) as u64 + 1).leading_zeros() as usize + a.steps + 1).min(20),
                _ => reach.max(16),
            });
            RunConfig::Walk(WalkRunConfig {
                model: a.model.spec(depth)?,
                start: a.start,
                steps: a.steps,
                trials: a.trials,
                seed: a.seed,
            })
        }
        Command::Embed(a) => RunConfig::Embed(EmbedConfig {
            depth: a.depth as usize,
            trials: a.trials,
            seed: a.seed,
            wrong_psi: a.wrong_psi,
        }),
        Command::Energy(a) => RunConfig::Energy(EnergyConfig {
            graph: a.graph.clone(),
            vector: a.vector.clone(),
        }),
        Command::Resolvent(a) => RunConfig::Resolvent(ResolventConfig {
            model: a.model.spec(a.depth)?,
            boundary: match a.boundary {
                Boundary::Free => BoundaryPolicy::Free,
                Boundary::Absorbing => BoundaryPolicy::Absorbing,
            },
            vertex: a.x,
            solver: SolverOptions {
                tolerance: a.tolerance,
                ..SolverOptions::default()
            },
        }),
        Command::Graph(a) => RunConfig::Graph(GraphConfig {
            model: a.model.spec(a.depth)?,
        }),
        Command::Replay(_) => return Ok(None),
    };
    Ok(Some(config))
}

fn exit_for(error: &Error) -> i32 {
    match error {
        Error::NotConverged { .. }
        | Error::SingularGram { .. }
        | Error::IterationCap { .. }
        | Error::NonUnitSeries
        | Error::OrderMismatch { .. } => EXIT_CLAIM_FAILED,
        _ => EXIT_USAGE,
    }
}

fn write_outputs(outcome: &Outcome, output: &OutputArgs) -> std::io::Result<()> {
    if let Some(path) = &output.report {
        std::fs::write(path, &outcome.report)?;
    }
    if let (Some(path), Some(csv)) = (&output.csv, &outcome.csv) {
        std::fs::write(path, csv)?;
    }
    Ok(())
}

fn output_args(command: &Command) -> Option<&OutputArgs> {
    match command {
        Command::Polys(a) => Some(&a.output),
        Command::Classify(a) => Some(&a.output),
        Command::Walk(a) => Some(&a.output),
        Command::Embed(a) => Some(&a.output),
        Command::Energy(a) => Some(&a.output),
        Command::Resolvent(a) => Some(&a.output),
        Command::Replay(a) => Some(&a.output),
        Command::Graph(_) => None,
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let config = match resolve(&cli.command) {
        Ok(Some(config)) => config,
        Ok(None) => {
            let Command::Replay(a) = &cli.command else { unreachable!() };
            match std::fs::read_to_string(&a.file).map_err(Error::from).and_then(|t| RunConfig::from_echo(&t)) {
                Ok(config) => config,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            }
        }
        Err(UsageError(message)) => {
            eprintln!("error: {message}");
            return EXIT_USAGE;
        }
    };
    let outcome = match execute(&config) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    print!("{}", outcome.stdout);
    for line in &outcome.diagnostics {
        eprintln!("{line}");
    }
    if let Some(output) = output_args(&cli.command) {
        if let Err(e) = write_outputs(&outcome, output) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    if outcome.claims_hold {
        EXIT_OK
    } else {
        EXIT_CLAIM_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ModelFamily;

    #[test]
    fn ratio_must_exceed_one() {
        assert!(parse_ratio("1.0").is_err());
        assert!(parse_ratio("nan").is_err());
        assert_eq!(parse_ratio("2").unwrap(), 2.0);
    }

    #[test]
    fn usage_errors_map_to_64() {
        assert_eq!(main_with_args(["resistnet", "classify", "--model", "half-line", "--M", "1.0"]), EXIT_USAGE);
        assert_eq!(main_with_args(["resistnet", "classify", "--model", "half-line"]), EXIT_USAGE);
        assert_eq!(main_with_args(["resistnet", "nope"]), EXIT_USAGE);
        assert_eq!(main_with_args(["resistnet", "--help"]), EXIT_OK);
    }

    #[test]
    fn walk_depth_covers_reach() {
        let cli = Cli::try_parse_from(["resistnet", "walk", "--model", "sym-line", "--M", "2", "--start", "-5", "--steps", "30"]).unwrap();
        let Some(RunConfig::Walk(c)) = resolve(&cli.command).unwrap() else { panic!() };
        assert!(c.model.depth >= 36);
        assert_eq!(c.model.family, ModelFamily::LineGeomSym);
    }
}
