use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use clap::Args;

use pnq::geometry::Geometry;
use pnq::query::{ProbabilityFn, QueryBackend, RandomSource};
use pnq::spread::{raster_to_points, simulate, write_series_csv, RasterGrid, SpreadParams};
use pnq::Result;

#[derive(Args)]
pub struct SpreadArgs {
    /// Population raster file (plain-text header plus count rows).
    #[arg(long)]
    pub raster: PathBuf,
    /// Fraction of the population to synthesize as points.
    #[arg(long, default_value_t = 0.05)]
    pub fraction: f64,
    /// Maximum number of rounds.
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// Per-round recovery probability.
    #[arg(long, default_value_t = 0.8)]
    pub recovery: f64,
    /// Scale of the inverse-distance infection kernel `min(1, scale/d)`.
    /// Defaults to `e^7 / n` for the synthesized point count `n`.
    #[arg(long)]
    pub f_scale: Option<f64>,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output time-series CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads for the per-round queries.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

pub fn run(args: &SpreadArgs) -> Result<i32> {
    let grid = RasterGrid::parse(BufReader::new(File::open(&args.raster)?))?;
    let master = RandomSource::from_seed(args.seed);
    let sampled = raster_to_points(&grid, args.fraction, &mut master.derive(0))?;
    let scale = args
        .f_scale
        .unwrap_or_else(|| 7.0f64.exp() / sampled.points.len().max(1) as f64);
    let params = SpreadParams {
        recovery_rate: args.recovery,
        f: ProbabilityFn::scaled_inverse(scale)?,
        initial_infected: 0,
        steps: args.steps,
    };
    let series = super::with_threads(args.threads, || {
        simulate(
            &sampled.points,
            Geometry::Euclidean,
            &params,
            QueryBackend::Aggregated,
            &master.derive(1),
        )
    })?;

    let file = File::create(&args.out)?;
    write_series_csv(BufWriter::new(file), &series)?;
    println!("queries executed: {}", series.total_queries);
    Ok(0)
}
