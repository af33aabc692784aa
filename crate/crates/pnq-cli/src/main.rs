//! `pnq`: probabilistic neighborhood queries over polar quadtrees.
//!
//! Subcommands: `generate` (random hyperbolic graphs), `spread`
//! (SIR spreading over raster-derived points), `validate` (three-way
//! frequency comparison against the probing oracle), `bench` (timing
//! records).
//!
//! Exit codes: 0 success or validation pass, 1 validation fail, 2 usage
//! error, 3 I/O or parse error.

use clap::{Parser, Subcommand};

mod bench;
mod generate;
mod spread;
mod validate;

#[derive(Parser)]
#[command(name = "pnq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random hyperbolic graph and write its edge list.
    Generate(generate::GenerateArgs),
    /// Run the spreading simulation over a population raster.
    Spread(spread::SpreadArgs),
    /// Compare PDP, baseline, and aggregated query frequencies.
    Validate(validate::ValidateArgs),
    /// Time PDP, baseline, and aggregated queries over point-set sizes.
    Bench(bench::BenchArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => generate::run(&args),
        Command::Spread(args) => spread::run(&args),
        Command::Validate(args) => validate::run(&args),
        Command::Bench(args) => bench::run(&args),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    };
    std::process::exit(code);
}

/// Maps library errors onto the documented exit codes: bad parameter
/// combinations count as usage errors, everything touching files or
/// formats as I/O errors.
fn exit_code(err: &pnq::Error) -> i32 {
    match err {
        pnq::Error::InvalidParameter(_)
        | pnq::Error::ZeroTemperature
        | pnq::Error::ProbabilityOutOfRange(_)
        | pnq::Error::ZeroCapacity
        | pnq::Error::EmptyDensityDomain(_) => 2,
        _ => 3,
    }
}

/// Runs `body` on a rayon pool with the requested thread count.
fn with_threads<T>(threads: usize, body: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool construction cannot fail for a positive count")
        .install(body)
}
