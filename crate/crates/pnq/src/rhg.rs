//! Random hyperbolic graph generation.
//!
//! Vertices are points sampled in a hyperbolic disk of radius `R` with
//! radial density `g(r) = alpha * sinh(alpha*r) / (cosh(alpha*R) - 1)`
//! and uniform angles. Each vertex pair is connected independently with
//! the temperature-parametrized logistic probability
//! `f(x) = 1 / (exp((x - R) / (2T)) + 1)` of its distance. One
//! neighborhood query per vertex realizes all pair decisions: the query
//! from vertex `u` keeps only neighbors with id greater than `u`, so
//! every unordered pair is Bernoulli-tested exactly once.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::geometry::{Geometry, PolarPoint};
use crate::query::{query_aggregated, ProbabilityFn, QueryBackend, RandomSource};
use crate::quadtree::{PolarQuadtree, RadialDensity};
use crate::reference::pdp_query;
use crate::{Error, Result};

/// Disk radius given directly or calibrated from a target average degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiusSpec {
    Radius(f64),
    TargetAvgDegree(f64),
}

/// Parameters of the random hyperbolic graph model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhgParams {
    pub n: usize,
    pub alpha: f64,
    pub temperature: f64,
    pub radius: RadiusSpec,
}

impl RhgParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".to_string()));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.temperature <= 0.0 {
            return Err(Error::ZeroTemperature);
        }
        match self.radius {
            RadiusSpec::Radius(r) if !(r > 0.0) || !r.is_finite() => Err(Error::InvalidParameter(
                format!("disk radius must be positive, got {r}"),
            )),
            RadiusSpec::TargetAvgDegree(k) if !(k > 0.0) || k >= (self.n as f64 - 1.0) => {
                Err(Error::InvalidParameter(format!(
                    "target average degree {k} must lie in (0, n-1)"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Simple undirected graph as a sorted edge list: pairs `(u, v)` with
/// `u < v`, no duplicates, no self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl EdgeList {
    pub fn new(n: usize) -> Self {
        EdgeList { n, edges: Vec::new() }
    }

    pub fn from_edges(n: usize, mut edges: Vec<(u32, u32)>) -> Result<Self> {
        edges.sort_unstable();
        for &(u, v) in &edges {
            if u >= v || (v as usize) >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) is not an ordered pair of distinct node ids below {n}"
                )));
            }
        }
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate edge".to_string()));
        }
        Ok(EdgeList { n, edges })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Writes `u<TAB>v` lines preceded by a `# nodes=<n>` header.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# nodes={}", self.n)?;
        for &(u, v) in &self.edges {
            writeln!(w, "{u}\t{v}")?;
        }
        Ok(())
    }

    /// Reads the edge-list format; the `# nodes=` header is optional and
    /// the node count falls back to the largest id seen plus one.
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut max_id = 0u32;
        let mut saw_edge = false;
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            if let Some(rest) = text.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(value) = rest.strip_prefix("nodes=") {
                    n = Some(value.trim().parse().map_err(|e| Error::Parse {
                        line: line_no,
                        message: format!("bad node count `{value}`: {e}"),
                    })?);
                }
                continue;
            }
            let mut fields = text.split('\t');
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `u<TAB>v`, got `{text}`"),
                });
            };
            let parse = |s: &str| -> Result<u32> {
                s.trim().parse().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad node id `{s}`: {e}"),
                })
            };
            let (u, v) = (parse(a)?, parse(b)?);
            max_id = max_id.max(v).max(u);
            saw_edge = true;
            edges.push((u, v));
        }
        let n = n.unwrap_or(if saw_edge { max_id as usize + 1 } else { 0 });
        EdgeList::from_edges(n, edges)
    }
}

/// Samples `n` points with uniform angles and radii drawn by inverse CDF
/// from the hyperbolic radial density.
pub fn sample_points(
    n: usize,
    alpha: f64,
    radius: f64,
    rng: &mut RandomSource,
) -> Result<Vec<PolarPoint>> {
    let density = RadialDensity::hyperbolic_alpha(alpha, radius)?;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let phi = rng.next_unit() * std::f64::consts::TAU;
        let r = density.inverse_cdf(rng.next_unit())?;
        points.push(PolarPoint::new(phi, r).expect("sampled coordinates are valid"));
    }
    Ok(points)
}

/// Connection probability `1 / (exp((d - radius) / (2 * temperature)) + 1)`.
///
/// Strictly decreasing in `d` and equal to 1/2 at `d = radius`. The
/// threshold model (`temperature = 0`) is not covered here; express it as
/// a step probability function instead.
pub fn connection_probability(d: f64, radius: f64, temperature: f64) -> Result<f64> {
    if temperature <= 0.0 {
        return Err(Error::ZeroTemperature);
    }
    Ok(1.0 / (((d - radius) / (2.0 * temperature)).exp() + 1.0))
}

/// The connection probability as a query function.
pub fn connection_fn(radius: f64, temperature: f64) -> Result<ProbabilityFn> {
    // Validate eagerly so the closure below cannot fail.
    connection_probability(0.0, radius, temperature)?;
    Ok(ProbabilityFn::new(move |d| {
        1.0 / (((d - radius) / (2.0 * temperature)).exp() + 1.0)
    }))
}

/// Generates a random hyperbolic graph. With a target average degree the
/// disk radius is calibrated first.
///
/// The result is reproducible for a fixed master source regardless of the
/// rayon thread count: every vertex query runs on its own derived stream.
pub fn generate(params: &RhgParams, master: &RandomSource) -> Result<EdgeList> {
    generate_with_backend(params, QueryBackend::Aggregated, master)
}

/// Same model realized through pairwise distance probing. Used as the
/// linear-time comparison point in benchmarks and tests.
pub fn generate_pdp(params: &RhgParams, master: &RandomSource) -> Result<EdgeList> {
    generate_with_backend(params, QueryBackend::Pdp, master)
}

pub fn generate_with_backend(
    params: &RhgParams,
    backend: QueryBackend,
    master: &RandomSource,
) -> Result<EdgeList> {
    params.validate()?;
    let radius = match params.radius {
        RadiusSpec::Radius(r) => r,
        RadiusSpec::TargetAvgDegree(k) => {
            calibrate_radius(
                params.n,
                params.alpha,
                params.temperature,
                k,
                &master.derive(0xCA11B),
            )?
            .radius
        }
    };
    let points = sample_points(params.n, params.alpha, radius, &mut master.derive(1))?;
    let density = RadialDensity::hyperbolic_alpha(params.alpha, radius)?;
    generate_over_points(&points, &density, params.temperature, backend, &master.derive(2))
}

/// Runs one neighborhood query per vertex over a fixed point set and
/// keeps pairs `(u, v)` with `v > u`. Exposed separately so tests can pin
/// point configurations.
pub fn generate_over_points(
    points: &[PolarPoint],
    density: &RadialDensity,
    temperature: f64,
    backend: QueryBackend,
    master: &RandomSource,
) -> Result<EdgeList> {
    let n = points.len();
    let f = connection_fn(density.disk_radius(), temperature)?;
    let tree = match backend {
        QueryBackend::Aggregated => Some(PolarQuadtree::build(
            points,
            Geometry::Hyperbolic,
            *density,
            DEFAULT_CAPACITY,
        )?),
        QueryBackend::Pdp => None,
    };
    let per_node: Vec<Vec<(u32, u32)>> = (0..n)
        .into_par_iter()
        .map(|u| -> Result<Vec<(u32, u32)>> {
            let mut rng = master.derive(u as u64);
            let ids = match &tree {
                Some(tree) => query_aggregated(tree, points[u], &f, &mut rng)?.neighbors,
                None => pdp_query(points, Geometry::Hyperbolic, points[u], &f, &mut rng)?,
            };
            Ok(ids
                .into_iter()
                .filter(|&v| v > u)
                .map(|v| (u as u32, v as u32))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut edges: Vec<(u32, u32)> = per_node.into_iter().flatten().collect();
    edges.sort_unstable();
    debug_assert!(edges.windows(2).all(|w| w[0] != w[1]));
    Ok(EdgeList { n, edges })
}

/// Leaf capacity used by the generator's quadtree.
const DEFAULT_CAPACITY: usize = 32;

/// Outcome of the radius calibration.
#[derive(Clone, Copy, Debug)]
pub struct Calibration {
    pub radius: f64,
    /// Monte-Carlo estimate of the expected average degree at `radius`.
    pub estimated_degree: f64,
    /// Standard error of that estimate across replicates.
    pub std_error: f64,
}

/// Finds a disk radius whose expected average degree matches `target_k`
/// by bisection on a Monte-Carlo estimate.
///
/// The estimator samples point pairs with radii stratified in CDF space
/// (which removes most of the variance of the heavy-tailed expected-degree
/// distribution) and random relative angles; the expected average degree
/// is `(n - 1)` times the mean connection probability over pairs.
pub fn calibrate_radius(
    n: usize,
    alpha: f64,
    temperature: f64,
    target_k: f64,
    master: &RandomSource,
) -> Result<Calibration> {
    if n < 2 || !(target_k > 0.0) || target_k >= (n - 1) as f64 {
        return Err(Error::InvalidParameter(format!(
            "target degree {target_k} must lie in (0, n-1) with n >= 2, got n = {n}"
        )));
    }
    if temperature <= 0.0 {
        return Err(Error::ZeroTemperature);
    }

    let estimate = |radius: f64, rng_tag: u64| -> Result<(f64, f64)> {
        let density = RadialDensity::hyperbolic_alpha(alpha, radius)?;
        // Radii are stratified in CDF space and the relative angle over
        // [0, pi] (the connection probability is even in it); jittering
        // within each stratum keeps the estimate unbiased.
        const RADIUS_STRATA: usize = 64;
        const ANGLE_STRATA: usize = 16;
        const REPLICATES: u64 = 4;
        let mut means = Vec::with_capacity(REPLICATES as usize);
        for rep in 0..REPLICATES {
            let mut rng = master.derive(rng_tag).derive(rep);
            let mut sum = 0.0f64;
            for i in 0..RADIUS_STRATA {
                for j in 0..RADIUS_STRATA {
                    let u1 = (i as f64 + rng.next_unit()) / RADIUS_STRATA as f64;
                    let u2 = (j as f64 + rng.next_unit()) / RADIUS_STRATA as f64;
                    let r1 = density.inverse_cdf(u1)?;
                    let r2 = density.inverse_cdf(u2)?;
                    for k in 0..ANGLE_STRATA {
                        let dphi = (k as f64 + rng.next_unit()) / ANGLE_STRATA as f64
                            * std::f64::consts::PI;
                        let d =
                            crate::geometry::dist_raw(Geometry::Hyperbolic, 0.0, r1, dphi, r2);
                        sum += connection_probability(d, radius, temperature)?;
                    }
                }
            }
            let samples = (RADIUS_STRATA * RADIUS_STRATA * ANGLE_STRATA) as f64;
            means.push(sum / samples * (n - 1) as f64);
        }
        let mean = means.iter().sum::<f64>() / means.len() as f64;
        let var = means
            .iter()
            .map(|m| (m - mean) * (m - mean))
            .sum::<f64>()
            / (means.len() - 1) as f64;
        Ok((mean, (var / means.len() as f64).sqrt()))
    };

    let mut lo = 0.05f64;
    let mut hi = 4.0 * (n as f64).ln() + 20.0;
    let (k_lo, _) = estimate(lo, 0)?;
    let (k_hi, _) = estimate(hi, 1)?;
    if !(k_lo >= target_k && target_k >= k_hi) {
        return Err(Error::CalibrationBracket {
            target: target_k,
            low: lo,
            at_low: k_lo,
            high: hi,
            at_high: k_hi,
        });
    }

    let mut best = Calibration {
        radius: 0.5 * (lo + hi),
        estimated_degree: f64::INFINITY,
        std_error: 0.0,
    };
    for iter in 0..60 {
        let mid = 0.5 * (lo + hi);
        let (k_mid, se) = estimate(mid, 2 + iter)?;
        let cal = Calibration {
            radius: mid,
            estimated_degree: k_mid,
            std_error: se,
        };
        if (k_mid - target_k).abs() < (best.estimated_degree - target_k).abs() {
            best = cal;
        }
        if (k_mid - target_k).abs() <= 0.01 * target_k || (hi - lo) < 1e-9 {
            return Ok(cal);
        }
        // Expected degree decreases with the radius.
        if k_mid > target_k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Summary metrics of an edge list: average degree, global clustering
/// coefficient (closed triples over all triples), degree assortativity
/// (Pearson correlation of endpoint degrees over edges), and the degree
/// histogram indexed by degree.
#[derive(Clone, Debug)]
pub struct GraphMetrics {
    pub avg_degree: f64,
    pub clustering_coefficient: f64,
    pub degree_assortativity: f64,
    pub degree_histogram: Vec<u64>,
}

pub fn graph_metrics(edge_list: &EdgeList) -> GraphMetrics {
    let n = edge_list.n();
    let m = edge_list.edge_count();
    if n == 0 {
        return GraphMetrics {
            avg_degree: 0.0,
            clustering_coefficient: 0.0,
            degree_assortativity: 0.0,
            degree_histogram: Vec::new(),
        };
    }
    let mut degree = vec![0u32; n];
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v) in edge_list.edges() {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
        adjacency[u as usize].push(v);
        adjacency[v as usize].push(u);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }

    // Each triangle is seen from all three of its edges.
    let mut closed_paths = 0u64;
    for &(u, v) in edge_list.edges() {
        closed_paths += sorted_intersection_count(&adjacency[u as usize], &adjacency[v as usize]);
    }
    let triads: u64 = degree
        .iter()
        .map(|&d| d as u64 * (d as u64).saturating_sub(1) / 2)
        .sum();
    let clustering = if triads == 0 {
        0.0
    } else {
        closed_paths as f64 / triads as f64
    };

    // Pearson correlation of endpoint degrees, both edge orientations.
    let assortativity = if m == 0 {
        0.0
    } else {
        let (mut sx, mut sxx, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
        for &(u, v) in edge_list.edges() {
            let (du, dv) = (degree[u as usize] as f64, degree[v as usize] as f64);
            sx += du + dv;
            sxx += du * du + dv * dv;
            sxy += 2.0 * du * dv;
        }
        let samples = 2.0 * m as f64;
        let mean = sx / samples;
        let var = sxx / samples - mean * mean;
        if var <= 0.0 {
            0.0
        } else {
            (sxy / samples - mean * mean) / var
        }
    };

    let max_degree = degree.iter().copied().max().unwrap_or(0) as usize;
    let mut histogram = vec![0u64; max_degree + 1];
    for &d in &degree {
        histogram[d as usize] += 1;
    }

    GraphMetrics {
        avg_degree: 2.0 * m as f64 / n as f64,
        clustering_coefficient: clustering,
        degree_assortativity: assortativity,
        degree_histogram: histogram,
    }
}

fn sorted_intersection_count(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut count) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}
