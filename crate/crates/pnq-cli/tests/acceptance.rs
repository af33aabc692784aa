//! Acceptance suite. Runs every criterion in order, prints one pass/fail
//! line per criterion, and fails at the end if any criterion failed.
//!
//! The timing criteria are measured inside a single-threaded rayon pool;
//! run this target alone for clean numbers:
//!
//! ```text
//! cargo test -p pnq-cli --test acceptance -- --nocapture
//! ```

use std::f64::consts::TAU;
use std::sync::OnceLock;
use std::time::Instant;

use pnq::geometry::{cell_distance_bounds, distance, CellBounds, Geometry, PolarPoint};
use pnq::quadtree::{PolarQuadtree, RadialDensity};
use pnq::query::{
    query_aggregated, skip_delta, ProbabilityFn, QueryBackend, RandomSource, SkipDelta,
};
use pnq::reference::{
    binomial_sigma_bound, chi_square_gof, frequency_compare, pdp_query, three_way_tables,
    FrequencyTable,
};
use pnq::rhg::{calibrate_radius, generate_over_points, graph_metrics, sample_points};
use pnq::spread::{raster_to_points, simulate, RasterGrid, SpreadParams};

type CriterionResult = Result<String, String>;

fn pt(phi: f64, r: f64) -> PolarPoint {
    PolarPoint::new(phi, r).unwrap()
}

fn sample_cloud(density: &RadialDensity, n: usize, seed: u64) -> Vec<PolarPoint> {
    let mut rng = RandomSource::from_seed(seed);
    (0..n)
        .map(|_| {
            pt(
                rng.next_unit() * TAU,
                density.inverse_cdf(rng.next_unit()).unwrap(),
            )
        })
        .collect()
}

fn single_thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
}

/// Least-squares slope of y against x.
fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

// ---------------------------------------------------------------------
// Criteria 1 and 2 share the Fig-1-style configuration and its tables.

struct MarginalData {
    points: Vec<PolarPoint>,
    query: PolarPoint,
    f: ProbabilityFn,
    trials: u64,
    tables: [FrequencyTable; 3],
}

fn marginal_data() -> &'static MarginalData {
    static DATA: OnceLock<MarginalData> = OnceLock::new();
    DATA.get_or_init(|| {
        let radius = 7.78;
        let density = RadialDensity::hyperbolic_alpha(1.0, radius).unwrap();
        let points = sample_cloud(&density, 200, 0xF161);
        let tree = PolarQuadtree::build(&points, Geometry::Hyperbolic, density, 32).unwrap();
        let f = ProbabilityFn::new(|d| 1.0 / ((d - 7.78).exp() + 1.0));
        let query = pt(0.0, radius / 2.0);
        let trials = 20_000u64;
        let tables = three_way_tables(
            &points,
            &tree,
            query,
            &f,
            trials,
            &RandomSource::from_seed(0xF162),
        )
        .unwrap();
        MarginalData {
            points,
            query,
            f,
            trials,
            tables,
        }
    })
}

/// Criterion 1: per-point inclusion frequencies of all three algorithms
/// within four binomial sigmas of f(dist), 200 points, 2e4 trials.
fn criterion_01_marginal_correctness() -> CriterionResult {
    let start = Instant::now();
    let data = marginal_data();
    let mut worst: f64 = 0.0;
    for (name, table) in ["pdp", "baseline", "aggregated"].iter().zip(&data.tables) {
        for (i, &p) in data.points.iter().enumerate() {
            let expect = data
                .f
                .eval(distance(Geometry::Hyperbolic, data.query, p))
                .unwrap();
            let band = binomial_sigma_bound(expect, data.trials, 4.0);
            let gap = (table.frequency(i) - expect).abs();
            if band > 0.0 {
                worst = worst.max(gap / band);
            }
            if gap > band {
                return Err(format!(
                    "{name}: point {i} frequency {} vs f(dist) = {expect} (4-sigma band {band})",
                    table.frequency(i)
                ));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 120.0 {
        return Err(format!("took {elapsed:.1} s, budget is 2 minutes"));
    }
    Ok(format!(
        "600 frequency checks, worst deviation {worst:.2} of the 4-sigma band, {elapsed:.1} s"
    ))
}

/// Criterion 2: three-way frequency_compare on the criterion-1 tables
/// reports zero failures at the Bonferroni-corrected 4-sigma threshold.
fn criterion_02_oracle_equivalence() -> CriterionResult {
    let data = marginal_data();
    let [pdp, baseline, aggregated] = &data.tables;
    let mut max_z: f64 = 0.0;
    for (label, a, b) in [
        ("pdp vs baseline", pdp, baseline),
        ("pdp vs aggregated", pdp, aggregated),
        ("baseline vs aggregated", baseline, aggregated),
    ] {
        let report = frequency_compare(a, b).map_err(|e| e.to_string())?;
        max_z = max_z.max(report.max_z);
        if !report.failures.is_empty() {
            return Err(format!(
                "{label}: {} failures beyond z = {:.2}",
                report.failures.len(),
                report.threshold
            ));
        }
    }
    Ok(format!("zero failures in three comparisons, max |z| = {max_z:.2}"))
}

/// Criterion 3: 1e6 skip draws at b = 0.3 fit the geometric law
/// (0.7)^i * 0.3 with chi-square p > 1e-3.
fn criterion_03_jump_width_law() -> CriterionResult {
    let b = 0.3f64;
    let draws = 1_000_000u64;
    let mut rng = RandomSource::from_seed(0x5C1F);
    const TAIL: usize = 32;
    let mut observed = vec![0u64; TAIL + 1];
    for _ in 0..draws {
        match skip_delta(b, &mut rng).map_err(|e| e.to_string())? {
            SkipDelta::Finite(d) => observed[(d as usize).min(TAIL)] += 1,
            SkipDelta::All => return Err("unexpected skip-all for b = 0.3".to_string()),
        }
    }
    let mut expected: Vec<f64> = (0..TAIL)
        .map(|i| draws as f64 * (1.0 - b).powi(i as i32) * b)
        .collect();
    expected.push(draws as f64 * (1.0 - b).powi(TAIL as i32));
    let test = chi_square_gof(&observed, &expected).map_err(|e| e.to_string())?;
    if test.p_value > 1e-3 {
        Ok(format!(
            "chi-square {:.1} on {} dof, p = {:.3}",
            test.statistic, test.dof, test.p_value
        ))
    } else {
        Err(format!(
            "chi-square {:.1} on {} dof, p = {:.2e} <= 1e-3",
            test.statistic, test.dof, test.p_value
        ))
    }
}

/// Criterion 4: depth-2 occupancy of 4e5 sampled points is uniform to
/// four binomial sigmas for both density presets.
fn criterion_04_mass_balance() -> CriterionResult {
    let mut summary = Vec::new();
    for (label, density, geometry) in [
        (
            "euclidean-uniform",
            RadialDensity::euclidean_uniform(1.0).unwrap(),
            Geometry::Euclidean,
        ),
        (
            "hyperbolic-0.75",
            RadialDensity::hyperbolic_alpha(0.75, 10.0).unwrap(),
            Geometry::Hyperbolic,
        ),
    ] {
        let sample = sample_cloud(&density, 400_000, 0xBA55);
        let tree = PolarQuadtree::build(&sample, geometry, density, 32)
            .map_err(|e| e.to_string())?;
        let report = tree
            .mass_fraction_check(2, &sample)
            .map_err(|e| e.to_string())?;
        let expect = 1.0 / 16.0;
        let band = binomial_sigma_bound(expect, report.total(), 4.0);
        let mut worst: f64 = 0.0;
        for (i, fraction) in report.fractions().iter().enumerate() {
            let gap = (fraction - expect).abs();
            worst = worst.max(gap / band);
            if gap > band {
                return Err(format!(
                    "{label}: depth-2 cell {i} holds fraction {fraction} \
                     (expected {expect} within {band})"
                ));
            }
        }
        summary.push(format!("{label} worst {worst:.2} of band"));
    }
    Ok(summary.join(", "))
}

/// Criterion 5: one million hyperbolic points stay within height 30
/// across 20 seeds.
fn criterion_05_height_bound() -> CriterionResult {
    let bound = 30usize;
    let mut max_seen = 0usize;
    for seed in 0..20u64 {
        let density = RadialDensity::hyperbolic_alpha(1.0, 20.0).unwrap();
        let points = sample_cloud(&density, 1_000_000, 0x4E16 + seed);
        let tree = PolarQuadtree::build(&points, Geometry::Hyperbolic, density, 32)
            .map_err(|e| e.to_string())?;
        max_seen = max_seen.max(tree.height());
        if tree.height() > bound {
            return Err(format!(
                "seed {seed}: height {} exceeds 3*ceil(log4 n) = {bound}",
                tree.height()
            ));
        }
    }
    Ok(format!("20 trees of 1e6 points, max height {max_seen} <= {bound}"))
}

/// Criterion 6: distance bounds are sound on 1e3 random (cell, query)
/// pairs per geometry with 1e4 in-cell samples each, and the sampled
/// minimum approaches the infimum within 1e-2.
fn criterion_06_distance_bound_soundness() -> CriterionResult {
    let mut rng = RandomSource::from_seed(0xD157);
    let mut worst_gap: f64 = 0.0;
    for g in [Geometry::Euclidean, Geometry::Hyperbolic] {
        for pair in 0..1000 {
            // Cells small enough that 1e4 samples resolve the boundary
            // minimum to well under 1e-2 in either metric.
            let min_r = rng.next_unit() * 3.0;
            let dr = 0.05 + rng.next_unit() * 0.15;
            let arc_scale = match g {
                Geometry::Euclidean => (min_r + dr).max(0.3),
                Geometry::Hyperbolic => (min_r + dr).sinh().max(0.3),
            };
            let dphi = (0.05 + rng.next_unit() * 0.20) / arc_scale;
            let min_phi = rng.next_unit() * (TAU - dphi);
            let cell = CellBounds::new(min_phi, min_phi + dphi, min_r, min_r + dr)
                .map_err(|e| e.to_string())?;
            let q = pt(rng.next_unit() * TAU, rng.next_unit() * 4.0);
            let bounds = cell_distance_bounds(g, &cell, q);

            let mut min_seen = f64::INFINITY;
            for _ in 0..10_000 {
                let phi = min_phi + rng.next_unit() * dphi;
                let r = min_r + rng.next_unit() * dr;
                let d = distance(g, q, pt(phi, r));
                if d < bounds.infimum() - 1e-9 || d > bounds.supremum() + 1e-9 {
                    return Err(format!(
                        "{g:?} pair {pair}: sampled distance {d} outside \
                         [{}, {}]",
                        bounds.infimum(),
                        bounds.supremum()
                    ));
                }
                min_seen = min_seen.min(d);
            }
            let gap = min_seen - bounds.infimum();
            worst_gap = worst_gap.max(gap);
            if gap > 1e-2 {
                return Err(format!(
                    "{g:?} pair {pair}: sampled minimum {min_seen} is {gap} above \
                     the infimum {}",
                    bounds.infimum()
                ));
            }
        }
    }
    Ok(format!(
        "2000 pairs, 1e4 samples each, worst sampling gap {worst_gap:.2e}"
    ))
}

/// Criterion 7: aggregated queries at least 10x faster than pairwise
/// probing on 1e5 uniform Euclidean points with 5000 queries.
fn criterion_07_speedup() -> CriterionResult {
    let n = 100_000usize;
    let queries = 5000usize;
    let density = RadialDensity::euclidean_uniform(100.0).unwrap();
    let points = sample_cloud(&density, n, 0x5B7D);
    let tree = PolarQuadtree::build(&points, Geometry::Euclidean, density, 32)
        .map_err(|e| e.to_string())?;
    let f = ProbabilityFn::scaled_inverse(7.0f64.exp() / n as f64).map_err(|e| e.to_string())?;
    let master = RandomSource::from_seed(0x5B7E);
    let mut pick = master.derive(0);
    let query_points: Vec<PolarPoint> = (0..queries)
        .map(|_| points[(pick.next_unit() * n as f64) as usize % n])
        .collect();

    let start = Instant::now();
    for (i, &q) in query_points.iter().enumerate() {
        let mut rng = master.derive(1).derive(i as u64);
        pdp_query(&points, Geometry::Euclidean, q, &f, &mut rng).map_err(|e| e.to_string())?;
    }
    let pdp_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    for (i, &q) in query_points.iter().enumerate() {
        let mut rng = master.derive(2).derive(i as u64);
        query_aggregated(&tree, q, &f, &mut rng).map_err(|e| e.to_string())?;
    }
    let aggregated_s = start.elapsed().as_secs_f64();

    let ratio = pdp_s / aggregated_s;
    if ratio >= 10.0 {
        Ok(format!(
            "pdp {pdp_s:.2} s, aggregated {aggregated_s:.2} s, speedup {ratio:.1}x"
        ))
    } else {
        Err(format!(
            "speedup only {ratio:.1}x (pdp {pdp_s:.2} s, aggregated {aggregated_s:.2} s)"
        ))
    }
}

/// Criterion 8: generation-time scaling exponents over 2^10..2^16 at
/// calibrated degree 6: tree-backed slope < 1.8, probing-backed >= 1.9.
fn criterion_08_scaling_exponent() -> CriterionResult {
    let pool = single_thread_pool();
    pool.install(|| {
        let sizes: Vec<usize> = (10..=16).map(|k| 1usize << k).collect();
        let master = RandomSource::from_seed(0x5CA1);
        let mut log_n = Vec::new();
        let mut log_tree = Vec::new();
        let mut log_pdp = Vec::new();
        for (idx, &n) in sizes.iter().enumerate() {
            let cal = calibrate_radius(n, 1.0, 0.5, 6.0, &master.derive(idx as u64))
                .map_err(|e| e.to_string())?;
            let density = RadialDensity::hyperbolic_alpha(1.0, cal.radius)
                .map_err(|e| e.to_string())?;

            let mut tree_times = Vec::new();
            for rep in 0..3u64 {
                let seed = master.derive(100 + idx as u64).derive(rep);
                let start = Instant::now();
                let points = sample_points(n, 1.0, cal.radius, &mut seed.derive(0))
                    .map_err(|e| e.to_string())?;
                generate_over_points(
                    &points,
                    &density,
                    0.5,
                    QueryBackend::Aggregated,
                    &seed.derive(1),
                )
                .map_err(|e| e.to_string())?;
                tree_times.push(start.elapsed().as_secs_f64());
            }
            tree_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let tree_s = tree_times[1];

            let seed = master.derive(200 + idx as u64);
            let start = Instant::now();
            let points = sample_points(n, 1.0, cal.radius, &mut seed.derive(0))
                .map_err(|e| e.to_string())?;
            generate_over_points(&points, &density, 0.5, QueryBackend::Pdp, &seed.derive(1))
                .map_err(|e| e.to_string())?;
            let pdp_s = start.elapsed().as_secs_f64();

            log_n.push((n as f64).ln());
            log_tree.push(tree_s.ln());
            log_pdp.push(pdp_s.ln());
        }
        let tree_slope = fitted_slope(&log_n, &log_tree);
        let pdp_slope = fitted_slope(&log_n, &log_pdp);
        if tree_slope < 1.8 && pdp_slope >= 1.9 {
            Ok(format!(
                "tree slope {tree_slope:.2} < 1.8, probing slope {pdp_slope:.2} >= 1.9"
            ))
        } else {
            Err(format!(
                "tree slope {tree_slope:.2} (need < 1.8), probing slope {pdp_slope:.2} \
                 (need >= 1.9)"
            ))
        }
    })
}

/// Criterion 9: calibrated radius controls the average degree: n = 2^14,
/// target 6, median of 5 seeds within 10%.
fn criterion_09_degree_control() -> CriterionResult {
    let n = 1usize << 14;
    let master = RandomSource::from_seed(0xDE64);
    let cal =
        calibrate_radius(n, 1.0, 0.5, 6.0, &master.derive(0)).map_err(|e| e.to_string())?;
    let density =
        RadialDensity::hyperbolic_alpha(1.0, cal.radius).map_err(|e| e.to_string())?;
    let mut degrees = Vec::new();
    for seed in 0..5u64 {
        let source = master.derive(1 + seed);
        let points = sample_points(n, 1.0, cal.radius, &mut source.derive(0))
            .map_err(|e| e.to_string())?;
        let graph = generate_over_points(
            &points,
            &density,
            0.5,
            QueryBackend::Aggregated,
            &source.derive(1),
        )
        .map_err(|e| e.to_string())?;
        degrees.push(graph_metrics(&graph).avg_degree);
    }
    degrees.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = degrees[2];
    if (median - 6.0).abs() <= 0.6 {
        Ok(format!(
            "radius {:.3}, median degree {median:.3} within 10% of 6 \
             (all seeds: {degrees:?})",
            cal.radius
        ))
    } else {
        Err(format!(
            "median degree {median:.3} outside [5.4, 6.6] (radius {:.3})",
            cal.radius
        ))
    }
}

/// Criterion 10: mean candidates for small-|N| queries grow sublinearly:
/// log-log slope <= 0.7 over n in 2^10..2^18.
fn criterion_10_candidate_scaling() -> CriterionResult {
    let sizes: Vec<usize> = (10..=18).map(|k| 1usize << k).collect();
    let disk = 100.0f64;
    let master = RandomSource::from_seed(0xCA4D);
    let mut log_n = Vec::new();
    let mut log_candidates = Vec::new();
    for (idx, &n) in sizes.iter().enumerate() {
        let density = RadialDensity::euclidean_uniform(disk).unwrap();
        let points = sample_cloud(&density, n, 0xCA4E + idx as u64);
        let tree = PolarQuadtree::build(&points, Geometry::Euclidean, density, 32)
            .map_err(|e| e.to_string())?;
        // Scale f to hold the expected neighborhood size around ten.
        let f = ProbabilityFn::scaled_inverse(5.0 * disk / n as f64).map_err(|e| e.to_string())?;
        let source = master.derive(idx as u64);
        let mut pick = source.derive(0);
        let mut kept = 0usize;
        let mut total_candidates = 0u64;
        let mut attempts = 0u64;
        while kept < 200 && attempts < 2000 {
            let q = points[(pick.next_unit() * n as f64) as usize % n];
            let mut rng = source.derive(1).derive(attempts);
            let outcome = query_aggregated(&tree, q, &f, &mut rng).map_err(|e| e.to_string())?;
            attempts += 1;
            if outcome.neighbors.len() <= 20 {
                kept += 1;
                total_candidates += outcome.stats.candidates_examined;
            }
        }
        if kept < 200 {
            return Err(format!(
                "n = {n}: only {kept} of the queries had |N| <= 20"
            ));
        }
        log_n.push((n as f64).ln());
        log_candidates.push((total_candidates as f64 / kept as f64).ln());
    }
    let slope = fitted_slope(&log_n, &log_candidates);
    if slope <= 0.7 {
        Ok(format!("candidate-count slope {slope:.3} <= 0.7"))
    } else {
        Err(format!("candidate-count slope {slope:.3} exceeds 0.7"))
    }
}

/// Criterion 11: raster-driven SIR run conserves the population, and the
/// identically-seeded probing-backed twin engine reproduces its series
/// exactly.
fn criterion_11_sir_twin() -> CriterionResult {
    let (ncols, nrows) = (50usize, 50usize);
    let mut counts = vec![0.0f64; ncols * nrows];
    for row in 0..nrows {
        for col in 0..ncols {
            counts[row * ncols + col] = if row < nrows / 2 { 120.0 } else { 40.0 };
        }
    }
    let grid =
        RasterGrid::new(ncols, nrows, 1.0, (0.0, 0.0), counts).map_err(|e| e.to_string())?;
    let mut rng = RandomSource::from_seed(0x51B1);
    let sampled = raster_to_points(&grid, 1.0 / 20.0, &mut rng).map_err(|e| e.to_string())?;
    let n = sampled.points.len();
    if n != 10_000 {
        return Err(format!("expected 1e4 synthetic points, got {n}"));
    }
    let params = SpreadParams {
        recovery_rate: 0.8,
        f: ProbabilityFn::scaled_inverse(7.0f64.exp() / n as f64).map_err(|e| e.to_string())?,
        initial_infected: 0,
        steps: 30,
    };
    let master = RandomSource::from_seed(0x51B2);

    let main_run = simulate(
        &sampled.points,
        Geometry::Euclidean,
        &params,
        QueryBackend::Aggregated,
        &master,
    )
    .map_err(|e| e.to_string())?;
    for row in &main_run.rows {
        if row.susceptible + row.infected + row.recovered != n {
            return Err(format!("conservation violated at step {}", row.step));
        }
    }

    let twin_a = simulate(
        &sampled.points,
        Geometry::Euclidean,
        &params,
        QueryBackend::Pdp,
        &master,
    )
    .map_err(|e| e.to_string())?;
    let twin_b = simulate(
        &sampled.points,
        Geometry::Euclidean,
        &params,
        QueryBackend::Pdp,
        &master,
    )
    .map_err(|e| e.to_string())?;
    if twin_a != twin_b {
        return Err("identically-seeded oracle twins diverged".to_string());
    }
    for row in &twin_a.rows {
        if row.susceptible + row.infected + row.recovered != n {
            return Err(format!("twin conservation violated at step {}", row.step));
        }
    }
    Ok(format!(
        "conservation over {} steps, identical twin series of {} rows",
        main_run.rows.len(),
        twin_a.rows.len()
    ))
}

/// Criterion 12: the generate and spread commands are byte-deterministic
/// across reruns and across thread counts 1 and 4.
fn criterion_12_cli_determinism() -> CriterionResult {
    use std::process::Command;
    let dir = std::env::temp_dir().join(format!("pnq-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;

    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let output = Command::new(env!("CARGO_BIN_EXE_pnq"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if !output.status.success() {
            return Err(format!(
                "command {:?} failed: {}",
                args,
                String::from_utf8_lossy(&output.stderr)
            ));
        }
        Ok(output.stdout)
    };

    let mut generate_outputs = Vec::new();
    for (tag, threads) in [("a", "1"), ("b", "1"), ("c", "4")] {
        let out = dir.join(format!("edges-{tag}.tsv"));
        run(&[
            "generate", "--n", "4096", "--alpha", "1", "--temperature", "0.5",
            "--avg-degree", "6", "--seed", "99", "--threads", threads, "--out",
            out.to_str().unwrap(),
        ])?;
        generate_outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    if generate_outputs[0] != generate_outputs[1] || generate_outputs[0] != generate_outputs[2] {
        return Err("generate output differs across runs or thread counts".to_string());
    }

    let raster = dir.join("pop.asc");
    let mut text = String::from("ncols 40\nnrows 40\nxllcorner 0\nyllcorner 0\ncellsize 1\n");
    for _ in 0..40 {
        text.push_str(&vec!["100"; 40].join(" "));
        text.push('\n');
    }
    std::fs::write(&raster, text).map_err(|e| e.to_string())?;

    let mut spread_outputs = Vec::new();
    for (tag, threads) in [("a", "1"), ("b", "1"), ("c", "4")] {
        let out = dir.join(format!("series-{tag}.csv"));
        run(&[
            "spread", "--raster", raster.to_str().unwrap(), "--steps", "25", "--seed",
            "42", "--threads", threads, "--out", out.to_str().unwrap(),
        ])?;
        spread_outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    if spread_outputs[0] != spread_outputs[1] || spread_outputs[0] != spread_outputs[2] {
        return Err("spread output differs across runs or thread counts".to_string());
    }
    let edge_bytes = generate_outputs[0].len();
    let series_bytes = spread_outputs[0].len();
    Ok(format!(
        "generate ({edge_bytes} bytes) and spread ({series_bytes} bytes) identical \
         across seeds-fixed reruns and threads 1 and 4"
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, fn() -> CriterionResult)> = vec![
        ("01 marginal-correctness", criterion_01_marginal_correctness),
        ("02 oracle-equivalence", criterion_02_oracle_equivalence),
        ("03 jump-width-law", criterion_03_jump_width_law),
        ("04 mass-balance", criterion_04_mass_balance),
        ("05 height-bound", criterion_05_height_bound),
        ("06 distance-bound-soundness", criterion_06_distance_bound_soundness),
        ("07 speedup", criterion_07_speedup),
        ("08 scaling-exponent", criterion_08_scaling_exponent),
        ("09 degree-control", criterion_09_degree_control),
        ("10 candidate-scaling", criterion_10_candidate_scaling),
        ("11 sir-twin", criterion_11_sir_twin),
        ("12 cli-determinism", criterion_12_cli_determinism),
    ];

    let mut failures = Vec::new();
    for (name, criterion) in criteria {
        let start = Instant::now();
        let result = criterion();
        let elapsed = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {name}: PASS ({detail}) [{elapsed:.1} s]"),
            Err(reason) => {
                println!("criterion {name}: FAIL ({reason}) [{elapsed:.1} s]");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
