//! `coreshell`: command-line front end for forward solves, DN multipliers,
//! inversion experiments and camouflage pairs.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use coreshell::specfun::BesselKind;

use config::{ConfigFile, Resolver};
use error::CliError;
use output::{emit, Format};

#[derive(Parser, Debug)]
#[command(name = "coreshell", version, about = "Core-shell potentials: DN multipliers, FD forward solves, inversion, camouflage pairs")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, global = true, value_enum, conflicts_with_all = ["json", "csv"])]
    format: Option<Format>,
    /// Same as --format json.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Same as --format csv.
    #[arg(long, global = true)]
    csv: bool,
    /// Write to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form DN multiplier, its sigma1 derivative and the shell coefficients.
    Dn(ProfileArgs),
    /// Finite-difference forward solve; --csv prints the nodal solution.
    ForwardFd(ForwardArgs),
    /// Reconstruct sigma1 from synthetic noisy flux data.
    Invert(InvertArgs),
    /// Find sigma2 such that (r2, sigma2) has the same DN map as (r1, sigma1).
    Camouflage(CamouflageArgs),
    /// DN multiplier over an (r1, sigma1) grid.
    Sweep(SweepArgs),
    /// Rebuild one of the four reference tables.
    Reproduce(ReproduceArgs),
    #[command(hide = true)]
    Specfun {
        #[command(subcommand)]
        command: SpecfunCommand,
    },
}

#[derive(Subcommand, Debug)]
enum SpecfunCommand {
    /// Evaluate i0, i1, k0 or k1 at x.
    Eval { kind: BesselKind, x: f64 },
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    /// Core radius in (0, 1).
    #[arg(long)]
    pub r1: Option<f64>,
    /// Core coefficient, positive.
    #[arg(long)]
    pub sigma1: Option<f64>,
    /// Dirichlet value on the outer boundary [default: 1].
    #[arg(long = "f", value_name = "F", allow_negative_numbers = true)]
    pub f: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Grid intervals [default: 1000].
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid step; 1/dr must be an integer.
    #[arg(long)]
    pub dr: Option<f64>,
    /// Fix psi(0) instead of using the symmetry closure at r = 0.
    #[arg(long, value_name = "PSI0", allow_negative_numbers = true)]
    pub pin_center: Option<f64>,
}

#[derive(Args, Debug)]
pub struct InvertArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Grid intervals of the synthetic data [default: 10000].
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub dr: Option<f64>,
    /// Relative noise level [default: 0].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Noise seed, or the first seed of an ensemble [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of consecutive seeds [default: 1].
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Fixed regularisation parameter; skips the discrepancy search.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Discrepancy factor [default: 1.1].
    #[arg(long)]
    pub tau: Option<f64>,
    /// Newton starting point [default: 1].
    #[arg(long)]
    pub sigma_init: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CamouflageArgs {
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub sigma1: Option<f64>,
    /// Core radius of the second configuration.
    #[arg(long)]
    pub r2: Option<f64>,
    #[arg(long = "f", value_name = "F", allow_negative_numbers = true)]
    pub f: Option<f64>,
    /// Search sigma2 in LO,HI only; by default every root in (1e-4, 1e3) is listed.
    #[arg(long, value_name = "LO,HI")]
    pub bracket: Option<String>,
    /// Compare FD fluxes of each pair on these grids, e.g. 100,200,400,800.
    #[arg(long, value_name = "N,...")]
    pub fd_check: Option<String>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub r1_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r1_max: Option<f64>,
    #[arg(long)]
    pub r1_steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma1_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma1_max: Option<f64>,
    #[arg(long)]
    pub sigma1_steps: Option<usize>,
    /// Space sigma1 logarithmically.
    #[arg(long)]
    pub log_sigma: bool,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Table number, 1 to 4.
    #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
    pub table: u8,
    /// Ensemble size for tables 1 and 2 [default: 100].
    #[arg(long)]
    pub seeds: Option<usize>,
    /// First seed for tables 1 and 2 [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid intervals of the synthetic data for tables 1 and 2 [default: 10000].
    #[arg(long)]
    pub n: Option<usize>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = cli.output.config.as_deref().map(ConfigFile::load).transpose()?;
    let res = Resolver::new(file);

    let explicit = if cli.output.json {
        Some(Format::Json)
    } else if cli.output.csv {
        Some(Format::Csv)
    } else {
        res.get("format", cli.output.format)?
    };
    let out = res.get::<PathBuf>("out", cli.output.out.clone())?;

    let (report, default_format) = match &cli.command {
        Command::Dn(a) => (commands::dn(&res, a)?, Format::Table),
        Command::ForwardFd(a) => (commands::forward_fd(&res, a)?, Format::Table),
        Command::Invert(a) => (commands::invert(&res, a)?, Format::Table),
        Command::Camouflage(a) => (commands::camouflage(&res, a)?, Format::Table),
        Command::Sweep(a) => (commands::sweep(&res, a)?, Format::Csv),
        Command::Reproduce(a) => (commands::reproduce(&res, a)?, Format::Table),
        Command::Specfun {
            command: SpecfunCommand::Eval { kind, x },
        } => (commands::specfun_eval(*kind, *x)?, Format::Table),
    };
    let text = report.render(explicit.unwrap_or(default_format));
    emit(&text, out.as_deref()).map_err(|e| match &out {
        Some(p) => CliError::Io(format!("cannot write {}: {e}", p.display())),
        None => CliError::Io(e.to_string()),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", CliError::BadInput(first.trim_start_matches("error: ").to_string()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
