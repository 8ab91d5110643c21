use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hierarch_cli::{parse_state, run_command, Command, LevelSpec, OutputFormat, RunConfig};
use hierarch_core::rational::{parse_rational, Rational};

#[derive(Parser)]
#[command(name = "hierarch", version, about = "Level-k type solvers for two-player games")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// One-by-one cognitive hierarchy
    Ch(Common),
    /// Iterated elimination under the level belief restrictions
    Dkr(Common),
    /// Dynamic cognitive hierarchy
    Dch(Common),
    /// Dynamic elimination with strong belief
    Ddkr(Common),
    /// Run the one-by-one and the elimination procedure and compare them
    Compare(Common),
    /// Break cognitive hierarchy ties with small payoff changes
    Perturb(Common),
    /// Check the cognitive hierarchy rule as a Bayesian equilibrium
    Bayes(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct Common {
    /// Game file (static matrix or game tree, JSON)
    #[arg(long)]
    game: PathBuf,
    /// Poisson rate of the level distribution, e.g. 3/2
    #[arg(long, value_parser = rational_arg, conflicts_with = "weights", required_unless_present = "weights")]
    poisson: Option<Rational>,
    /// Explicit positive level weights w0,w1,...
    #[arg(long, value_parser = rational_arg, value_delimiter = ',')]
    weights: Option<Vec<Rational>>,
    /// Highest level L
    #[arg(long)]
    levels: Option<usize>,
    /// Include per-step snapshots
    #[arg(long)]
    trace: bool,
    /// Condition step n+1 on the survivors of step n-1
    #[arg(long)]
    belief_lag: bool,
    /// Perturbation budget (perturb) or weight of the common-knowledge state (bayes)
    #[arg(long, value_parser = rational_arg)]
    eps: Option<Rational>,
    /// State m,n whose play to report (bayes)
    #[arg(long, value_parser = parse_state)]
    state: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Ch(c) => (Command::Ch, c),
        Sub::Dkr(c) => (Command::Dkr, c),
        Sub::Dch(c) => (Command::Dch, c),
        Sub::Ddkr(c) => (Command::Ddkr, c),
        Sub::Compare(c) => (Command::Compare, c),
        Sub::Perturb(c) => (Command::Perturb, c),
        Sub::Bayes(c) => (Command::Bayes, c),
    };
    let levels = match (common.poisson, common.weights) {
        (Some(tau), None) => match common.levels {
            Some(max_level) => LevelSpec::Poisson { tau, max_level },
            None => {
                eprintln!("error: --poisson needs --levels");
                return ExitCode::from(2);
            }
        },
        (None, Some(weights)) => LevelSpec::Weights { weights, max_level: common.levels },
        _ => unreachable!("clap enforces exactly one level source"),
    };
    let config = RunConfig {
        command,
        game: common.game,
        levels,
        trace: common.trace,
        belief_lag: common.belief_lag,
        eps: common.eps,
        state: common.state,
        format: match common.format {
            Format::Json => OutputFormat::Json,
            Format::Text => OutputFormat::Text,
        },
    };
    let outcome = run_command(&config);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.exit_code as u8)
}
