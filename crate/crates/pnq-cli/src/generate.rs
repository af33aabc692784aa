use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;

use pnq::query::RandomSource;
use pnq::rhg::{generate, graph_metrics, RadiusSpec, RhgParams};
use pnq::Result;

#[derive(Args)]
#[command(group = clap::ArgGroup::new("radius_spec").required(true).args(["radius", "avg_degree"]))]
pub struct GenerateArgs {
    /// Number of nodes.
    #[arg(long)]
    pub n: usize,
    /// Radial growth parameter of the point density.
    #[arg(long)]
    pub alpha: f64,
    /// Temperature of the connection probability (must be positive; the
    /// threshold model is not expressible here).
    #[arg(long)]
    pub temperature: f64,
    /// Disk radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Target average degree; the radius is calibrated to match.
    #[arg(long)]
    pub avg_degree: Option<f64>,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output edge-list file.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads for the per-node queries.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

pub fn run(args: &GenerateArgs) -> Result<i32> {
    let params = RhgParams {
        n: args.n,
        alpha: args.alpha,
        temperature: args.temperature,
        radius: match (args.radius, args.avg_degree) {
            (Some(r), None) => RadiusSpec::Radius(r),
            (None, Some(k)) => RadiusSpec::TargetAvgDegree(k),
            _ => unreachable!("clap enforces exactly one of --radius/--avg-degree"),
        },
    };
    let master = RandomSource::from_seed(args.seed);
    let edges = super::with_threads(args.threads, || generate(&params, &master))?;

    let file = File::create(&args.out)?;
    edges.write_tsv(BufWriter::new(file))?;

    let metrics = graph_metrics(&edges);
    println!("n,edges,avg_degree,clustering_coefficient");
    println!(
        "{},{},{},{}",
        edges.n(),
        edges.edge_count(),
        metrics.avg_degree,
        metrics.clustering_coefficient
    );
    Ok(0)
}
