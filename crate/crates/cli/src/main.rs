mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quadric_cto::cto::{Family, DEFAULT_MAX_RESAMPLE};

use commands::CliError;

#[derive(Parser)]
#[command(name = "quadric-cto", version, about = "Exact construction and verification of quadric arrangements and quadric bundle models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    C,
    Cprime,
    Ctilde,
    Ctildeprime,
}

impl From<Variant> for Family {
    fn from(v: Variant) -> Self {
        match v {
            Variant::C => Family::C,
            Variant::Cprime => Family::CPrime,
            Variant::Ctilde => Family::CTilde,
            Variant::Ctildeprime => Family::CTildePrime,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample an arrangement and write its coefficient ledger and diagonal bundle model.
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value = "c")]
        variant: Variant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_RESAMPLE)]
        max_resample: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify an arrangement and write its certificate.
    Verify {
        /// Arrangement file: a `cto/1` config or a `construct` output.
        #[arg(long, conflicts_with_all = ["n", "seed"])]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_MAX_RESAMPLE)]
        max_resample: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the parameter region and degree thresholds of (n, r[, d]).
    Classify {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random hypersurface with multiplicity d along an r-plane, and its bundle matrix.
    Hypersurface {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random double cover branch form with multiplicity d along an (r-1)-plane, and its bundle matrix.
    Doublecover {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residue of a class along one of its linear factors.
    Residue {
        #[arg(long)]
        class: PathBuf,
        /// Index of the divisor among the file's factors.
        #[arg(long)]
        divisor: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Construct { n, r, variant, seed, max_resample, out } => {
            commands::construct(n, r, variant.into(), seed, max_resample, out.as_deref())
        }
        Command::Verify { config, n, seed, max_resample, out } => {
            let source = match (config, n) {
                (Some(path), _) => commands::ConfigSource::File(path),
                (None, Some(n)) => commands::ConfigSource::Seeded { n, seed: seed.unwrap_or(0), max_resample },
                (None, None) => return Err(CliError::Usage("either --config or --n is required".into())),
            };
            commands::verify(source, out.as_deref())
        }
        Command::Classify { n, r, d, out } => commands::classify(n, r, d, out.as_deref()),
        Command::Hypersurface { n, r, d, seed, out } => commands::hypersurface(n, r, d, seed, out.as_deref()),
        Command::Doublecover { n, r, d, seed, out } => commands::double_cover(n, r, d, seed, out.as_deref()),
        Command::Residue { class, divisor, out } => commands::residue(&class, divisor, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            // Help and version requests are not errors.
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
