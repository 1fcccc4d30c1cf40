//! `twofluid`: tabulate the equation of state, inspect spectra, trace shock
//! curves and run Riemann problems.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;
mod output;


#[derive(Debug, Parser)]
#[command(name = "twofluid", version, about = "Two-fluid Bose gas model toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate F0, F2, S and S' on a fugacity grid as CSV.
    Eos(EosArgs),
    /// Report hyperbolicity of one state.
    Hyp(HypArgs),
    /// Trace a shock curve from a left state.
    Shock(ShockArgs),
    /// Run a Riemann problem from a config file.
    Simulate(SimulateArgs),
    /// Count constant states in a frame CSV.
    Waves(WavesArgs),
}

#[derive(Debug, Args)]
pub struct EosArgs {
    #[arg(long, default_value_t = 0.01)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 0.99)]
    pub beta_max: f64,
    /// Number of rows.
    #[arg(short, long, default_value_t = 99)]
    pub n: usize,
    /// Velocity-space dimension.
    #[arg(long = "dim", default_value_t = 3)]
    pub dim: u32,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.6)]
    pub c_tilde: f64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub rho_n: f64,
    #[arg(long)]
    pub rho_s: f64,
    #[arg(long)]
    pub u_n: f64,
    #[arg(long)]
    pub u_s: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct HypArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DirectionArg {
    Increasing,
    Decreasing,
    Both,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ShockArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Starting speed; must be an eigenvalue of the left state.
    #[arg(long, conflicts_with = "family")]
    pub sigma0: Option<f64>,
    /// Start from the k-th eigenvalue (1-based) instead of --sigma0.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub family: Option<u8>,
    #[arg(long, default_value_t = 0.2)]
    pub span: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
    pub direction: DirectionArg,
    /// Fallback predictor size when the field is degenerate at the seed.
    #[arg(long, default_value_t = 1e-3)]
    pub kick: f64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<std::path::PathBuf>,
    /// Also write a gnuplot script next to the output file.
    #[arg(long, requires = "output")]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    /// Experiment file of `key = value` lines.
    pub config: Option<std::path::PathBuf>,
    /// Override a config key, e.g. `--set n_cells=5000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub n_cells: Option<usize>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub output_every: Option<usize>,
    /// Directory for frame and monitor files.
    #[arg(short, long, default_value = "out")]
    pub out: std::path::PathBuf,
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
pub struct WavesArgs {
    pub frame: std::path::PathBuf,
    #[arg(long, default_value_t = twofluid::fvm::DEFAULT_SLOPE_TOL)]
    pub slope_tol: f64,
    /// Minimum plateau width in cells; defaults to max(5, n/100).
    #[arg(long)]
    pub min_width: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { error::EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::Eos(a) => commands::eos(&a, &mut stdout),
        Command::Hyp(a) => commands::hyp(&a, &mut stdout),
        Command::Shock(a) => commands::shock(&a, &mut stdout),
        Command::Simulate(a) => commands::simulate(&a, &mut stdout),
        Command::Waves(a) => commands::waves(&a, &mut stdout),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("twofluid: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
