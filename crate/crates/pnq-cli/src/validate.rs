use std::f64::consts::TAU;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use pnq::geometry::{distance, Geometry, PolarPoint};
use pnq::quadtree::{PolarQuadtree, RadialDensity};
use pnq::query::{ProbabilityFn, RandomSource};
use pnq::reference::{
    bonferroni_threshold, frequency_compare, three_way_tables, write_validation_csv,
    ValidationRow,
};
use pnq::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Euclidean,
    Hyperbolic,
}

#[derive(Args)]
pub struct ValidateArgs {
    /// Geometry of the validation scenario.
    #[arg(long, value_enum, default_value_t = GeometryArg::Hyperbolic)]
    pub geometry: GeometryArg,
    /// Number of points.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Trials per algorithm.
    #[arg(long, default_value_t = 20_000)]
    pub trials: u64,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Report CSV destination (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Corrupt the aggregated table before comparing; the run must then
    /// fail. Debug aid for the comparison machinery.
    #[arg(long)]
    pub inject_bias: bool,
}

pub fn run(args: &ValidateArgs) -> Result<i32> {
    let (geometry, density, f, q) = match args.geometry {
        GeometryArg::Hyperbolic => {
            let radius = 7.78;
            (
                Geometry::Hyperbolic,
                RadialDensity::hyperbolic_alpha(1.0, radius)?,
                ProbabilityFn::new(|d| 1.0 / ((d - 7.78).exp() + 1.0)),
                PolarPoint::new(0.0, radius / 2.0)?,
            )
        }
        GeometryArg::Euclidean => (
            Geometry::Euclidean,
            RadialDensity::euclidean_uniform(1.0)?,
            ProbabilityFn::new(|d| 1.0 / ((8.0 * (d - 0.5)).exp() + 1.0)),
            PolarPoint::new(0.0, 0.5)?,
        ),
    };

    let master = RandomSource::from_seed(args.seed);
    let mut point_rng = master.derive(0);
    let points: Vec<PolarPoint> = (0..args.n)
        .map(|_| {
            Ok(PolarPoint::new(
                point_rng.next_unit() * TAU,
                density.inverse_cdf(point_rng.next_unit())?,
            )?)
        })
        .collect::<Result<_>>()?;
    let tree = PolarQuadtree::build(&points, geometry, density, 32)?;

    let [pdp, baseline, mut aggregated] =
        three_way_tables(&points, &tree, q, &f, args.trials, &master.derive(1))?;
    if args.inject_bias {
        let shift = (0.2 * args.trials as f64).ceil() as u64;
        aggregated.set_inclusions(0, aggregated.inclusions(0) + shift);
    }

    // The oracle validates itself against the closed form before
    // validating the others.
    let threshold = bonferroni_threshold(4.0, args.n.max(1));
    let mut oracle_failures = 0usize;
    let expected: Vec<f64> = points
        .iter()
        .map(|&p| f.eval(distance(geometry, q, p)))
        .collect::<Result<_>>()?;
    for (i, &p) in expected.iter().enumerate() {
        let band = threshold * (p * (1.0 - p) / args.trials as f64).sqrt();
        if (pdp.frequency(i) - p).abs() > band {
            oracle_failures += 1;
        }
    }

    let base_report = frequency_compare(&pdp, &baseline)?;
    let aggr_report = frequency_compare(&pdp, &aggregated)?;

    let mut underpowered = vec![false; args.n];
    for &i in base_report.underpowered.iter().chain(&aggr_report.underpowered) {
        underpowered[i] = true;
    }
    let rows: Vec<ValidationRow> = (0..args.n)
        .map(|i| ValidationRow {
            point_id: i,
            distance: distance(geometry, q, points[i]),
            expected_p: expected[i],
            freq_pdp: pdp.frequency(i),
            freq_baseline: baseline.frequency(i),
            freq_aggregated: aggregated.frequency(i),
            z_base: base_report.z_scores[i],
            z_aggr: aggr_report.z_scores[i],
            warning: if underpowered[i] {
                "insufficient_power".to_string()
            } else {
                String::new()
            },
        })
        .collect();

    match &args.out {
        Some(path) => write_validation_csv(BufWriter::new(File::create(path)?), &rows)?,
        None => write_validation_csv(std::io::stdout().lock(), &rows)?,
    }

    let failures =
        oracle_failures + base_report.failures.len() + aggr_report.failures.len();
    eprintln!(
        "oracle self-check: {oracle_failures} failures; baseline vs pdp: {} failures \
         (max_z={:.3}); aggregated vs pdp: {} failures (max_z={:.3}); threshold {:.3}; \
         {} underpowered points",
        base_report.failures.len(),
        base_report.max_z,
        aggr_report.failures.len(),
        aggr_report.max_z,
        threshold,
        underpowered.iter().filter(|&&u| u).count(),
    );
    if failures == 0 {
        eprintln!("validation: PASS");
        Ok(0)
    } else {
        eprintln!("validation: FAIL ({failures} failures)");
        Ok(1)
    }
}
