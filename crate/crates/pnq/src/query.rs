//! Probabilistic neighborhood queries.
//!
//! A query pair `(q, f)` asks for a random subset of the indexed points
//! in which each point `p` appears independently with probability
//! `f(dist(q, p))`. Both query algorithms work cell by cell: the infimum
//! of the distance from `q` to a cell gives, through the monotonically
//! decreasing `f`, an upper bound `b` on the neighbor probability of
//! every point inside. Candidates are then selected by geometric skipping
//! with parameter `b` and confirmed with probability `f(dist)/b`, so the
//! combined acceptance probability is exactly `f(dist)`.
//!
//! The baseline query visits every node. The aggregated query treats a
//! subtree `S` as a single virtual leaf as soon as `|S| * b < 1`, i.e.
//! when it is expected to contain less than one candidate; candidate
//! indices sampled into the virtual leaf are resolved through the stored
//! subtree sizes.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::geometry::{cell_distance_bounds, distance, Geometry, PolarPoint};
use crate::quadtree::{NodeView, PolarQuadtree, QuadtreeNode, StoredPoint};
use crate::{Error, Result};

/// Relative slack allowed between `f(dist)` and the cell bound before the
/// discrepancy is treated as a broken distance lower bound.
const BOUND_SLACK: f64 = 1e-9;

/// Seedable stream of uniform values in `[0, 1)`.
///
/// The same seed always yields the same stream. Derived sources obtained
/// through [`RandomSource::derive`] are independent streams; deriving
/// with the same tag from the same source is reproducible regardless of
/// how much of the parent stream has been consumed.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw: true with probability `p`.
    #[inline]
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_unit() < p
    }

    /// Independent child stream for the given tag.
    pub fn derive(&self, tag: u64) -> Self {
        Self::from_seed(splitmix64(self.seed ^ splitmix64(tag)))
    }
}

/// A monotonically non-increasing map from distances to probabilities.
///
/// Monotonicity is the caller's contract; debug builds spot-check it on a
/// fixed grid at construction. Every evaluation is range-checked and a
/// value outside `[0, 1]` is a hard error.
#[derive(Clone)]
pub struct ProbabilityFn {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    declared_monotone: bool,
}

impl std::fmt::Debug for ProbabilityFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProbabilityFn")
            .field("declared_monotone", &self.declared_monotone)
            .finish()
    }
}

impl ProbabilityFn {
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let f = ProbabilityFn {
            eval: Arc::new(eval),
            declared_monotone: true,
        };
        #[cfg(debug_assertions)]
        f.spot_check_monotone();
        f
    }

    /// `f(d) = p` everywhere.
    pub fn constant(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Ok(Self::new(move |_| p))
    }

    /// `f(d) = 1` for `d <= threshold`, 0 beyond: a deterministic range
    /// query expressed as a PNQ.
    pub fn step(threshold: f64) -> Self {
        Self::new(move |d| if d <= threshold { 1.0 } else { 0.0 })
    }

    /// `f(d) = min(1, scale / d)`, the inverse-distance kernel used by the
    /// spreading application (clamped into range; `f(0) = 1`).
    pub fn scaled_inverse(scale: f64) -> Result<Self> {
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "inverse-distance scale must be nonnegative, got {scale}"
            )));
        }
        if scale == 0.0 {
            return Self::constant(0.0);
        }
        Ok(Self::new(move |d| (scale / d).min(1.0)))
    }

    #[inline]
    pub fn declared_monotone(&self) -> bool {
        self.declared_monotone
    }

    /// Evaluates `f(d)`, rejecting results outside `[0, 1]`.
    #[inline]
    pub fn eval(&self, d: f64) -> Result<f64> {
        let p = (self.eval)(d);
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Ok(p)
    }

    #[cfg(debug_assertions)]
    fn spot_check_monotone(&self) {
        let mut grid = vec![0.0f64];
        let mut d = 1e-9;
        while d <= 1e9 {
            grid.push(d);
            d *= 4.0;
        }
        let mut prev = f64::INFINITY;
        for &d in &grid {
            let p = (self.eval)(d);
            assert!(
                p <= prev + 1e-12,
                "probability function declared monotone but increases near d = {d}"
            );
            prev = p;
        }
    }
}

/// Result of one geometric skip draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkipDelta {
    /// Skip this many points before the next candidate.
    Finite(u64),
    /// No point can be a candidate; skip the whole cell.
    All,
}

/// Number of points to skip so that each point becomes a candidate with
/// probability `b_bar`: `delta = floor(ln(1-u) / ln(1-b_bar))` for `u`
/// uniform in `[0, 1)`, giving `Pr(delta = i) = (1-b_bar)^i * b_bar`.
///
/// The edge cases avoid the degenerate logarithms: `b_bar = 1` always
/// yields 0 (every point is a candidate) and `b_bar = 0` yields the
/// skip-all sentinel.
pub fn skip_delta(b_bar: f64, rng: &mut RandomSource) -> Result<SkipDelta> {
    if !(0.0..=1.0).contains(&b_bar) {
        return Err(Error::ProbabilityOutOfRange(b_bar));
    }
    if b_bar == 0.0 {
        return Ok(SkipDelta::All);
    }
    if b_bar == 1.0 {
        return Ok(SkipDelta::Finite(0));
    }
    let u = rng.next_unit();
    let delta = ((1.0 - u).ln() / (1.0 - b_bar).ln()).floor();
    // Casting saturates; any delta past the cell size ends the scan.
    Ok(SkipDelta::Finite(delta as u64))
}

/// Instrumentation counters for one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Points selected by skipping and then confirmed or rejected.
    pub candidates_examined: u64,
    /// Tree node visits, including descents into virtual leaves.
    pub cells_examined: u64,
    /// Inner nodes treated as virtual leaf cells.
    pub virtual_leaves: u64,
}

/// Sampled neighborhood: point ids plus instrumentation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryOutcome {
    pub neighbors: Vec<usize>,
    pub stats: QueryStats,
}

/// Which query answers a neighborhood request in the applications.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryBackend {
    /// Subtree-aggregated tree query.
    Aggregated,
    /// Pairwise distance probing, the linear-time oracle.
    Pdp,
}

/// Baseline query: recursively visits every tree node and scans each leaf
/// with geometric skipping. Linear time, but the foundation for the
/// aggregated variant and a useful comparison point.
pub fn query_baseline(
    tree: &PolarQuadtree,
    q: PolarPoint,
    f: &ProbabilityFn,
    rng: &mut RandomSource,
) -> Result<QueryOutcome> {
    let mut out = QueryOutcome::default();
    baseline_rec(tree.geometry(), tree.root(), q, f, rng, &mut out)?;
    Ok(out)
}

fn baseline_rec(
    g: Geometry,
    node: &QuadtreeNode,
    q: PolarPoint,
    f: &ProbabilityFn,
    rng: &mut RandomSource,
    out: &mut QueryOutcome,
) -> Result<()> {
    out.stats.cells_examined += 1;
    match node.view() {
        NodeView::Inner(children) => {
            for child in children {
                baseline_rec(g, child, q, f, rng, out)?;
            }
        }
        NodeView::Leaf(points) => {
            let b_lower = cell_distance_bounds(g, node.bounds(), q).infimum();
            let b_bar = f.eval(b_lower)?;
            scan_leaf(g, points, q, f, b_bar, rng, out)?;
        }
    }
    Ok(())
}

/// Geometric-skip scan over the points of a real leaf.
fn scan_leaf(
    g: Geometry,
    points: &[StoredPoint],
    q: PolarPoint,
    f: &ProbabilityFn,
    b_bar: f64,
    rng: &mut RandomSource,
    out: &mut QueryOutcome,
) -> Result<()> {
    let len = points.len() as u64;
    let mut i = match skip_delta(b_bar, rng)? {
        SkipDelta::All => return Ok(()),
        SkipDelta::Finite(d) => d,
    };
    while i < len {
        let sp = &points[i as usize];
        out.stats.candidates_examined += 1;
        if confirm_candidate(g, sp.point(), q, f, b_bar, rng)? {
            out.neighbors.push(sp.id());
        }
        let delta = match skip_delta(b_bar, rng)? {
            SkipDelta::All => break,
            SkipDelta::Finite(d) => d,
        };
        i = i.saturating_add(1).saturating_add(delta);
    }
    Ok(())
}

/// Accepts a candidate with probability `f(dist) / b_bar`. `f(dist)`
/// above the bound means the cell's distance lower bound (or the claimed
/// monotonicity of `f`) is broken.
fn confirm_candidate(
    g: Geometry,
    p: PolarPoint,
    q: PolarPoint,
    f: &ProbabilityFn,
    b_bar: f64,
    rng: &mut RandomSource,
) -> Result<bool> {
    let fd = f.eval(distance(g, q, p))?;
    if fd > b_bar * (1.0 + BOUND_SLACK) {
        return Err(Error::BoundViolation { f_dist: fd, bound: b_bar });
    }
    let prob = (fd / b_bar).min(1.0);
    Ok(rng.chance(prob))
}

/// Subtree-aggregated query. Distributionally identical to the baseline
/// (each point is still returned independently with probability
/// `f(dist)`), but whole subtrees expected to contain less than one
/// candidate are sampled as virtual leaves instead of being descended.
pub fn query_aggregated(
    tree: &PolarQuadtree,
    q: PolarPoint,
    f: &ProbabilityFn,
    rng: &mut RandomSource,
) -> Result<QueryOutcome> {
    let mut out = QueryOutcome::default();
    aggregated_rec(tree.geometry(), tree.root(), q, f, rng, &mut out)?;
    Ok(out)
}

fn aggregated_rec(
    g: Geometry,
    node: &QuadtreeNode,
    q: PolarPoint,
    f: &ProbabilityFn,
    rng: &mut RandomSource,
    out: &mut QueryOutcome,
) -> Result<()> {
    out.stats.cells_examined += 1;
    let b_lower = cell_distance_bounds(g, node.bounds(), q).infimum();
    let b_bar = f.eval(b_lower)?;
    match node.view() {
        NodeView::Inner(children) if node.subtree_size() as f64 * b_bar >= 1.0 => {
            for child in children {
                aggregated_rec(g, child, q, f, rng, out)?;
            }
        }
        NodeView::Inner(_) => {
            // Less than one expected candidate: aggregate.
            out.stats.virtual_leaves += 1;
            scan_virtual_leaf(g, node, q, f, b_bar, rng, out)?;
        }
        NodeView::Leaf(points) => {
            scan_leaf(g, points, q, f, b_bar, rng, out)?;
        }
    }
    Ok(())
}

/// Geometric-skip scan over a virtual leaf: candidate indices refer to
/// the depth-first order of the subtree's points and are resolved via
/// the stored subtree sizes.
fn scan_virtual_leaf(
    g: Geometry,
    node: &QuadtreeNode,
    q: PolarPoint,
    f: &ProbabilityFn,
    b_bar: f64,
    rng: &mut RandomSource,
    out: &mut QueryOutcome,
) -> Result<()> {
    let len = node.subtree_size() as u64;
    let mut i = match skip_delta(b_bar, rng)? {
        SkipDelta::All => return Ok(()),
        SkipDelta::Finite(d) => d,
    };
    while i < len {
        out.stats.candidates_examined += 1;
        if let Some(id) =
            kth_element_rec(g, node, q, f, i as usize, b_bar, rng, Some(&mut out.stats))?
        {
            out.neighbors.push(id);
        }
        let delta = match skip_delta(b_bar, rng)? {
            SkipDelta::All => break,
            SkipDelta::Finite(d) => d,
        };
        i = i.saturating_add(1).saturating_add(delta);
    }
    Ok(())
}

/// Descends to the `k`-th point of the subtree (depth-first child order,
/// resolved through subtree sizes) and returns its id with probability
/// `f(dist(q, p_k)) / b_bar`.
///
/// `b_bar` must bound `f(dist(q, p))` for every point in the subtree;
/// meeting a point that violates the bound is a hard error.
pub fn maybe_get_kth_element(
    g: Geometry,
    node: &QuadtreeNode,
    q: PolarPoint,
    f: &ProbabilityFn,
    k: usize,
    b_bar: f64,
    rng: &mut RandomSource,
) -> Result<Option<usize>> {
    if k >= node.subtree_size() {
        return Err(Error::IndexOutOfRange {
            index: k,
            size: node.subtree_size(),
        });
    }
    kth_element_rec(g, node, q, f, k, b_bar, rng, None)
}

#[allow(clippy::too_many_arguments)]
fn kth_element_rec(
    g: Geometry,
    node: &QuadtreeNode,
    q: PolarPoint,
    f: &ProbabilityFn,
    k: usize,
    b_bar: f64,
    rng: &mut RandomSource,
    mut stats: Option<&mut QueryStats>,
) -> Result<Option<usize>> {
    match node.view() {
        NodeView::Leaf(points) => {
            let sp = &points[k];
            Ok(confirm_candidate(g, sp.point(), q, f, b_bar, rng)?.then_some(sp.id()))
        }
        NodeView::Inner(children) => {
            let mut offset = 0usize;
            for child in children {
                if k - offset < child.subtree_size() {
                    if let Some(stats) = stats.as_deref_mut() {
                        stats.cells_examined += 1;
                    }
                    return kth_element_rec(g, child, q, f, k - offset, b_bar, rng, stats);
                }
                offset += child.subtree_size();
            }
            unreachable!("k < subtree_size implies some child holds index k");
        }
    }
}
