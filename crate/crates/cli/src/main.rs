//! `pjring`: pseudo-Jacobi rings of hypersurfaces in Grassmannians.
//!
//! Exit codes: 0 success, 2 oracle mismatch, 3 hypothesis gate, 4 theorem
//! equivalence violation, 5 internal inconsistency, 1 any other error,
//! 64 bad usage.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use pjring::cache::Cache;

use commands::{Env, Outcome, PrimePolicy, EXIT_GATE, EXIT_ORACLE};
use report::{emit, Format};

const EXIT_OTHER: u8 = 1;
const EXIT_INTERNAL: u8 = 5;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "pjring", version, about = "Pseudo-Jacobi rings, Macaulay pairings and adjoint tests on Grassmannians")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for sections, primes and trial draws.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// How the working primes are chosen.
    #[arg(long, global = true, value_enum, default_value_t = PrimePolicy::Certify)]
    prime_policy: PrimePolicy,

    /// The prime for `--prime-policy fixed`.
    #[arg(long, global = true)]
    prime: Option<u64>,

    /// Cache directory for graded pieces; falls back to $PJRING_CACHE_DIR.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions of the graded pieces of the Plücker coordinate ring.
    RingDims {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "l")]
        l: usize,
        #[arg(long)]
        dmax: u32,
    },
    /// Multiplication pairing of the pseudo-Jacobi ring into its socle.
    MacaulayCheck {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "l")]
        l: usize,
        #[arg(long = "a")]
        a: u32,
        #[arg(long = "c", default_value_t = 1)]
        c: u32,
        /// Probability that a standard monomial appears in the section.
        #[arg(long, default_value_t = 1.0)]
        sparsity: f64,
    },
    /// Compare deformation triviality with adjoint membership on random trials.
    TorelliTest {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "l")]
        l: usize,
        #[arg(long = "a")]
        a: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1.0)]
        sparsity: f64,
        /// Where a reproducer is written if the two tests disagree.
        #[arg(long, default_value_os_t = commands::default_bundle_dir())]
        bundle_dir: PathBuf,
    },
    /// Adjoint membership of one R with one choice of one-forms.
    AdjointTest {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "l")]
        l: usize,
        #[arg(long = "a")]
        a: u32,
        #[arg(long, default_value_t = 1.0)]
        sparsity: f64,
        /// `sigma`, `random`, or a polynomial such as `2*p_{0 1}^2*p_{2 3}^2 + -1*p_{0 2}^4`.
        #[arg(long = "r", default_value = "sigma")]
        r: String,
        /// N comma-separated indices into the one-form basis; random if omitted.
        #[arg(long, value_delimiter = ',')]
        forms: Option<Vec<usize>>,
    },
    /// Span of sampled decomposable wedges of twisted one-forms.
    WedgeCheck {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "l")]
        l: usize,
        #[arg(long, default_value_t = 300)]
        samples: usize,
    },
    /// Vanishing verdicts for h^i(Ω^p(m)).
    CohomologyTable {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "l")]
        l: usize,
        #[arg(long, default_value_t = -4, allow_hyphen_values = true)]
        mmin: i64,
        #[arg(long, default_value_t = 8, allow_hyphen_values = true)]
        mmax: i64,
    },
    /// Surjectivity of the multiplication map used in the Torelli argument.
    SurjectivityCheck {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "l")]
        l: usize,
        #[arg(long = "a")]
        a: u32,
    },
    /// Table of dim S_m, dim J_m, dim R_m.
    JacobiDims {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "l")]
        l: usize,
        #[arg(long = "a")]
        a: u32,
        #[arg(long)]
        mmax: u32,
        #[arg(long, default_value_t = 1.0)]
        sparsity: f64,
    },
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let env = Env {
        seed: cli.seed,
        policy: cli.prime_policy,
        fixed_prime: cli.prime,
        cache: Cache::resolve(cli.cache_dir.clone()),
    };
    let start = Instant::now();
    let Outcome { mut report, exit } = match &cli.command {
        Command::RingDims { s, l, dmax } => commands::ring_dims(&env, *s, *l, *dmax)?,
        Command::MacaulayCheck { s, l, a, c, sparsity } => commands::macaulay_check(&env, *s, *l, *a, *c, *sparsity)?,
        Command::TorelliTest { s, l, a, trials, sparsity, bundle_dir } => {
            commands::torelli_test(&env, *s, *l, *a, *trials, *sparsity, bundle_dir)?
        }
        Command::AdjointTest { s, l, a, sparsity, r, forms } => {
            commands::adjoint_test(&env, *s, *l, *a, *sparsity, r, forms.clone())?
        }
        Command::WedgeCheck { s, l, samples } => commands::wedge_check(&env, *s, *l, *samples)?,
        Command::CohomologyTable { s, l, mmin, mmax } => commands::cohomology_table(*s, *l, *mmin, *mmax)?,
        Command::SurjectivityCheck { s, l, a } => commands::surjectivity_check(&env, *s, *l, *a)?,
        Command::JacobiDims { s, l, a, mmax, sparsity } => commands::jacobi_dims(&env, *s, *l, *a, *mmax, *sparsity)?,
    };
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    emit(&report.render(cli.format)?, cli.output.as_deref())?;
    if let Some(cache) = &env.cache {
        let (hits, misses, rejected) = cache.stats();
        eprintln!("cache {}: {hits} hits, {misses} misses, {rejected} rejected", cache.dir().display());
    }
    Ok(exit)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use pjring::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::OracleMismatch { .. }) => EXIT_ORACLE,
        Some(Error::Hypothesis(_) | Error::Degenerate(_)) => EXIT_GATE,
        Some(Error::Inconsistent(_) | Error::NoSolution(_) | Error::NotContained { .. } | Error::UnluckyPrime { .. }) => {
            EXIT_INTERNAL
        }
        _ => EXIT_OTHER,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
