use pnq::quadtree::RadialDensity;
use pnq::query::{QueryBackend, RandomSource};
use pnq::rhg::{calibrate_radius, generate_over_points, graph_metrics, sample_points};

fn main() {
    let n = 1 << 14;
    let master = RandomSource::from_seed(0xDE64);
    let start = std::time::Instant::now();
    let cal = calibrate_radius(n, 1.0, 0.5, 6.0, &master.derive(0)).unwrap();
    println!(
        "calibration: R={:.4} est={:.4} se={:.4} in {:.2}s",
        cal.radius,
        cal.estimated_degree,
        cal.std_error,
        start.elapsed().as_secs_f64()
    );
    let density = RadialDensity::hyperbolic_alpha(1.0, cal.radius).unwrap();
    let mut degrees = Vec::new();
    for seed in 0..5u64 {
        let source = master.derive(1 + seed);
        let points = sample_points(n, 1.0, cal.radius, &mut source.derive(0)).unwrap();
        let graph = generate_over_points(
            &points,
            &density,
            0.5,
            QueryBackend::Aggregated,
            &source.derive(1),
        )
        .unwrap();
        degrees.push(graph_metrics(&graph).avg_degree);
    }
    println!("degrees: {degrees:?}");
}
