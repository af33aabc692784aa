use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;

use pnq::geometry::{Geometry, PolarPoint};
use pnq::quadtree::{PolarQuadtree, RadialDensity};
use pnq::query::{query_aggregated, query_baseline, ProbabilityFn, RandomSource};
use pnq::reference::pdp_query;
use pnq::{Error, Result};

const DISK_RADIUS: f64 = 100.0;
const CAPACITY_SWEEP: [usize; 4] = [8, 32, 128, 1024];

#[derive(Args)]
pub struct BenchArgs {
    /// Point-set sizes: comma-separated integers, `2^k` powers, or an
    /// inclusive power range such as `2^10..2^18`.
    #[arg(long, default_value = "2^10..2^18")]
    pub sizes: String,
    /// Queries per point set.
    #[arg(long, default_value_t = 5000)]
    pub queries: usize,
    /// Sweep leaf capacities 8, 32, 128, 1024 instead of the default 32.
    #[arg(long)]
    pub capacity_sweep: bool,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Repetitions per configuration; reported values are medians.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (the library queries themselves run sequentially;
    /// this is reported with the records).
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

/// One benchmark configuration's medians.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub scenario: String,
    pub n: usize,
    pub capacity: usize,
    pub queries: usize,
    pub reps: usize,
    pub threads: usize,
    pub build_ms: f64,
    pub pdp_ms: f64,
    pub baseline_ms: f64,
    pub aggregated_ms: f64,
    pub mean_candidates: f64,
    pub mean_cells: f64,
}

pub const BENCH_HEADER: &str = "scenario,n,capacity,queries,reps,threads,build_ms,pdp_ms,\
baseline_ms,aggregated_ms,mean_candidates,mean_cells";

pub fn run(args: &BenchArgs) -> Result<i32> {
    if args.queries == 0 || args.reps == 0 {
        return Err(Error::InvalidParameter(
            "--queries and --reps must be at least 1".to_string(),
        ));
    }
    let sizes = parse_sizes(&args.sizes)?;
    let capacities: &[usize] = if args.capacity_sweep { &CAPACITY_SWEEP } else { &[32] };

    let mut records = Vec::new();
    for &n in &sizes {
        for &capacity in capacities {
            records.push(measure(args, n, capacity)?);
        }
    }
    match &args.out {
        Some(path) => write_bench_csv(BufWriter::new(File::create(path)?), &records)?,
        None => write_bench_csv(std::io::stdout().lock(), &records)?,
    }
    Ok(0)
}

fn measure(args: &BenchArgs, n: usize, capacity: usize) -> Result<BenchRecord> {
    let density = RadialDensity::euclidean_uniform(DISK_RADIUS)?;
    let f = ProbabilityFn::scaled_inverse(7.0f64.exp() / n as f64)?;
    let master = RandomSource::from_seed(args.seed);

    let mut build_times = Vec::new();
    let mut pdp_times = Vec::new();
    let mut baseline_times = Vec::new();
    let mut aggregated_times = Vec::new();
    let mut candidate_means = Vec::new();
    let mut cell_means = Vec::new();

    for rep in 0..args.reps {
        let rep_source = master
            .derive(n as u64)
            .derive(capacity as u64)
            .derive(rep as u64);
        let mut point_rng = rep_source.derive(0);
        let points: Vec<PolarPoint> = (0..n)
            .map(|_| {
                Ok(PolarPoint::new(
                    point_rng.next_unit() * TAU,
                    density.inverse_cdf(point_rng.next_unit())?,
                )?)
            })
            .collect::<Result<_>>()?;

        let start = Instant::now();
        let tree = PolarQuadtree::build(&points, Geometry::Euclidean, density, capacity)?;
        build_times.push(ms_since(start));

        // Query points drawn uniformly from the point set.
        let mut pick = rep_source.derive(1);
        let query_points: Vec<PolarPoint> = (0..args.queries)
            .map(|_| points[(pick.next_unit() * n as f64) as usize % n])
            .collect();

        let start = Instant::now();
        for (i, &q) in query_points.iter().enumerate() {
            let mut rng = rep_source.derive(2).derive(i as u64);
            pdp_query(&points, Geometry::Euclidean, q, &f, &mut rng)?;
        }
        pdp_times.push(ms_since(start));

        let start = Instant::now();
        for (i, &q) in query_points.iter().enumerate() {
            let mut rng = rep_source.derive(3).derive(i as u64);
            query_baseline(&tree, q, &f, &mut rng)?;
        }
        baseline_times.push(ms_since(start));

        let mut candidates = 0u64;
        let mut cells = 0u64;
        let start = Instant::now();
        for (i, &q) in query_points.iter().enumerate() {
            let mut rng = rep_source.derive(4).derive(i as u64);
            let outcome = query_aggregated(&tree, q, &f, &mut rng)?;
            candidates += outcome.stats.candidates_examined;
            cells += outcome.stats.cells_examined;
        }
        aggregated_times.push(ms_since(start));
        candidate_means.push(candidates as f64 / args.queries as f64);
        cell_means.push(cells as f64 / args.queries as f64);
    }

    Ok(BenchRecord {
        scenario: format!("uniform-euclidean-R{DISK_RADIUS}"),
        n,
        capacity,
        queries: args.queries,
        reps: args.reps,
        threads: args.threads,
        build_ms: median(&mut build_times),
        pdp_ms: median(&mut pdp_times),
        baseline_ms: median(&mut baseline_times),
        aggregated_ms: median(&mut aggregated_times),
        mean_candidates: median(&mut candidate_means),
        mean_cells: median(&mut cell_means),
    })
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Parses the `--sizes` grammar: entries are integers or `2^k`, ranges
/// `a..b` run over powers of two between two such entries.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    fn entry(text: &str) -> Result<usize> {
        let text = text.trim();
        if let Some(exp) = text.strip_prefix("2^") {
            let exp: u32 = exp.parse().map_err(|e| {
                Error::InvalidParameter(format!("bad exponent in `{text}`: {e}"))
            })?;
            if exp >= usize::BITS {
                return Err(Error::InvalidParameter(format!("`{text}` overflows")));
            }
            Ok(1usize << exp)
        } else {
            text.parse()
                .map_err(|e| Error::InvalidParameter(format!("bad size `{text}`: {e}")))
        }
    }

    let mut sizes = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = part.split_once("..") {
            let (lo, hi) = (entry(lo)?, entry(hi)?);
            if !lo.is_power_of_two() || !hi.is_power_of_two() || lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "range `{part}` must run over increasing powers of two"
                )));
            }
            let mut n = lo;
            while n <= hi {
                sizes.push(n);
                n *= 2;
            }
        } else {
            sizes.push(entry(part)?);
        }
    }
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("no sizes given".to_string()));
    }
    Ok(sizes)
}

pub fn write_bench_csv<W: Write>(mut w: W, records: &[BenchRecord]) -> Result<()> {
    writeln!(w, "{BENCH_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.n,
            r.capacity,
            r.queries,
            r.reps,
            r.threads,
            r.build_ms,
            r.pdp_ms,
            r.baseline_ms,
            r.aggregated_ms,
            r.mean_candidates,
            r.mean_cells
        )?;
    }
    Ok(())
}

#[allow(dead_code)]
pub fn read_bench_csv<R: BufRead>(reader: R) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if line_no == 1 {
            if text != BENCH_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected header `{text}`"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 12 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 12 fields, got {}", fields.len()),
            });
        }
        let uint = |s: &str| -> Result<usize> {
            s.parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad integer `{s}`: {e}"),
            })
        };
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad number `{s}`: {e}"),
            })
        };
        records.push(BenchRecord {
            scenario: fields[0].to_string(),
            n: uint(fields[1])?,
            capacity: uint(fields[2])?,
            queries: uint(fields[3])?,
            reps: uint(fields[4])?,
            threads: uint(fields[5])?,
            build_ms: num(fields[6])?,
            pdp_ms: num(fields[7])?,
            baseline_ms: num(fields[8])?,
            aggregated_ms: num(fields[9])?,
            mean_candidates: num(fields[10])?,
            mean_cells: num(fields[11])?,
        });
    }
    Ok(records)
}
