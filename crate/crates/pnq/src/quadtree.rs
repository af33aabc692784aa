//! Polar region quadtree with mass-balanced (or median) splitting.
//!
//! A leaf splits into four children once it exceeds its capacity: the
//! angular range is halved, and the radial split point is chosen so that
//! both radial halves carry the same probability mass under the point
//! distribution. With an unknown distribution the radial median of the
//! points in the cell is used instead. Every node stores the size of its
//! subtree; queries with subtree aggregation read these counts on the hot
//! path.

use std::f64::consts::TAU;
use std::io::BufRead;

use crate::geometry::{CellBounds, Geometry, PolarPoint};
use crate::{Error, Result};

/// A rotationally invariant radial distribution on a disk of radius `R`,
/// described by its normalized mass function `J` with `J(0) = 0` and
/// `J(R) = 1`, together with the inverse `J^-1`.
///
/// The `empirical` variant is a sentinel for unknown distributions; it has
/// no closed-form mass function and selects median-based radial splits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialDensity {
    radius: f64,
    kind: DensityKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum DensityKind {
    /// `J(r) = (r/R)^2`: uniform area density in the Euclidean disk.
    EuclideanUniform,
    /// `J(r) = (cosh(alpha*r) - 1) / (cosh(alpha*R) - 1)`.
    HyperbolicAlpha { alpha: f64 },
    /// Unknown distribution; radial splits use point medians.
    Empirical,
}

impl RadialDensity {
    pub fn euclidean_uniform(radius: f64) -> Result<Self> {
        Self::with_kind(radius, DensityKind::EuclideanUniform)
    }

    pub fn hyperbolic_alpha(alpha: f64, radius: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "growth parameter alpha must be positive, got {alpha}"
            )));
        }
        Self::with_kind(radius, DensityKind::HyperbolicAlpha { alpha })
    }

    pub fn empirical(radius: f64) -> Result<Self> {
        Self::with_kind(radius, DensityKind::Empirical)
    }

    fn with_kind(radius: f64, kind: DensityKind) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::EmptyDensityDomain(radius));
        }
        Ok(RadialDensity { radius, kind })
    }

    #[inline]
    pub fn disk_radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn is_empirical(&self) -> bool {
        self.kind == DensityKind::Empirical
    }

    /// Fraction of probability mass inside radius `r`.
    pub fn cdf(&self, r: f64) -> Result<f64> {
        let r = r.clamp(0.0, self.radius);
        match self.kind {
            DensityKind::EuclideanUniform => {
                let x = r / self.radius;
                Ok(x * x)
            }
            DensityKind::HyperbolicAlpha { alpha } => {
                // cosh(x) - 1 = 2 sinh^2(x/2); the ratio of squares is
                // stable for small radii.
                let num = (0.5 * alpha * r).sinh();
                let den = (0.5 * alpha * self.radius).sinh();
                Ok((num / den) * (num / den))
            }
            DensityKind::Empirical => Err(Error::EmpiricalDensity),
        }
    }

    /// Radius containing fraction `u` of the probability mass.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        let u = u.clamp(0.0, 1.0);
        match self.kind {
            DensityKind::EuclideanUniform => Ok(self.radius * u.sqrt()),
            DensityKind::HyperbolicAlpha { alpha } => {
                let den = (0.5 * alpha * self.radius).sinh();
                Ok(2.0 / alpha * (u.sqrt() * den).asinh())
            }
            DensityKind::Empirical => Err(Error::EmpiricalDensity),
        }
    }
}

/// A point stored in the tree together with its insertion-order id.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StoredPoint {
    point: PolarPoint,
    id: usize,
}

impl StoredPoint {
    #[inline]
    pub fn point(&self) -> PolarPoint {
        self.point
    }

    #[inline]
    pub fn id(&self) -> usize {
        self.id
    }
}

/// One quadtree node: a cell plus either four children or a point list.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadtreeNode {
    bounds: CellBounds,
    subtree_size: usize,
    content: NodeContent,
}

#[derive(Clone, Debug, PartialEq)]
enum NodeContent {
    Leaf(Vec<StoredPoint>),
    Inner(Box<[QuadtreeNode; 4]>),
}

/// Borrowed view of a node's content.
pub enum NodeView<'a> {
    Leaf(&'a [StoredPoint]),
    Inner(&'a [QuadtreeNode; 4]),
}

impl QuadtreeNode {
    fn empty_leaf(bounds: CellBounds) -> Self {
        QuadtreeNode {
            bounds,
            subtree_size: 0,
            content: NodeContent::Leaf(Vec::new()),
        }
    }

    #[inline]
    pub fn bounds(&self) -> &CellBounds {
        &self.bounds
    }

    #[inline]
    pub fn subtree_size(&self) -> usize {
        self.subtree_size
    }

    #[inline]
    pub fn is_leaf(&self) -> bool {
        matches!(self.content, NodeContent::Leaf(_))
    }

    #[inline]
    pub fn view(&self) -> NodeView<'_> {
        match &self.content {
            NodeContent::Leaf(points) => NodeView::Leaf(points),
            NodeContent::Inner(children) => NodeView::Inner(children),
        }
    }

    /// Child index for a point inside this (inner) node's bounds.
    /// Children are ordered low-phi/low-r, high-phi/low-r, low-phi/high-r,
    /// high-phi/high-r; this order also defines the depth-first point
    /// enumeration.
    #[inline]
    fn child_index(children: &[QuadtreeNode; 4], p: PolarPoint) -> usize {
        let mid_phi = children[0].bounds.max_phi();
        let mid_r = children[0].bounds.max_r();
        (p.phi() >= mid_phi) as usize + 2 * ((p.r() >= mid_r) as usize)
    }

    fn height(&self) -> usize {
        match &self.content {
            NodeContent::Leaf(_) => 0,
            NodeContent::Inner(children) => {
                1 + children.iter().map(|c| c.height()).max().unwrap()
            }
        }
    }

    fn node_count(&self) -> usize {
        match &self.content {
            NodeContent::Leaf(_) => 1,
            NodeContent::Inner(children) => {
                1 + children.iter().map(|c| c.node_count()).sum::<usize>()
            }
        }
    }

    fn for_each_point<F: FnMut(&StoredPoint)>(&self, f: &mut F) {
        match &self.content {
            NodeContent::Leaf(points) => points.iter().for_each(&mut *f),
            NodeContent::Inner(children) => {
                for child in children.iter() {
                    child.for_each_point(f);
                }
            }
        }
    }
}

/// Splitting coordinates for a cell: the angular midpoint and the radius
/// dividing the cell's probability mass in half (the radial point median
/// for the empirical density).
///
/// Refuses to split when either computed coordinate is not strictly
/// inside the cell, which happens for degenerate (zero-extent or
/// sub-ulp) cells; the caller then lets the leaf overflow.
pub fn split_cell(
    c: &CellBounds,
    density: &RadialDensity,
    points_in_cell: &[PolarPoint],
) -> Result<(f64, f64)> {
    let mid_phi = 0.5 * (c.min_phi() + c.max_phi());
    if !(c.min_phi() < mid_phi && mid_phi < c.max_phi()) {
        return Err(Error::DegenerateSplit(format!(
            "angular range [{}, {}] has no interior midpoint",
            c.min_phi(),
            c.max_phi()
        )));
    }
    let mid_r = if density.is_empirical() {
        if points_in_cell.is_empty() {
            return Err(Error::DegenerateSplit(
                "median split needs a nonempty cell".to_string(),
            ));
        }
        let mut radii: Vec<f64> = points_in_cell.iter().map(|p| p.r()).collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = radii.len();
        if n % 2 == 1 {
            radii[n / 2]
        } else {
            0.5 * (radii[n / 2 - 1] + radii[n / 2])
        }
    } else {
        let half = 0.5 * (density.cdf(c.min_r())? + density.cdf(c.max_r())?);
        density.inverse_cdf(half)?
    };
    if !(c.min_r() < mid_r && mid_r < c.max_r()) {
        return Err(Error::DegenerateSplit(format!(
            "radial split point {mid_r} not inside ({}, {})",
            c.min_r(),
            c.max_r()
        )));
    }
    Ok((mid_phi, mid_r))
}

/// The polar quadtree index.
///
/// Construction and insertion need exclusive access; afterwards the tree
/// is read-only and can be queried from any number of threads.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarQuadtree {
    root: QuadtreeNode,
    geometry: Geometry,
    density: RadialDensity,
    capacity: usize,
    len: usize,
}

impl PolarQuadtree {
    /// Empty tree over the disk `[0, 2*pi) x [0, R)`.
    pub fn new(geometry: Geometry, density: RadialDensity, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::ZeroCapacity);
        }
        let bounds = CellBounds::new(0.0, TAU, 0.0, density.disk_radius())
            .expect("root bounds are valid for a positive radius");
        Ok(PolarQuadtree {
            root: QuadtreeNode::empty_leaf(bounds),
            geometry,
            density,
            capacity,
            len: 0,
        })
    }

    /// Builds a tree containing exactly the given points, with ids equal
    /// to their positions in the input.
    pub fn build(
        points: &[PolarPoint],
        geometry: Geometry,
        density: RadialDensity,
        capacity: usize,
    ) -> Result<Self> {
        let mut tree = Self::new(geometry, density, capacity)?;
        for &p in points {
            tree.insert(p)?;
        }
        Ok(tree)
    }

    /// Inserts a point; its id is the current point count.
    ///
    /// Points with `r > R` are rejected. A point exactly at the disk
    /// boundary is pulled just inside so that the half-open root cell
    /// does not orphan it.
    pub fn insert(&mut self, p: PolarPoint) -> Result<()> {
        let radius = self.density.disk_radius();
        if p.r() > radius {
            return Err(Error::PointOutsideDisk {
                phi: p.phi(),
                r: p.r(),
                radius,
            });
        }
        let p = if p.r() == radius {
            PolarPoint::new(p.phi(), radius * (1.0 - f64::EPSILON))
                .expect("boundary clamp keeps the radius nonnegative")
        } else {
            p
        };
        let stored = StoredPoint { point: p, id: self.len };
        insert_rec(&mut self.root, stored, &self.density, self.capacity);
        self.len += 1;
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    #[inline]
    pub fn density(&self) -> &RadialDensity {
        &self.density
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn disk_radius(&self) -> f64 {
        self.density.disk_radius()
    }

    #[inline]
    pub fn root(&self) -> &QuadtreeNode {
        &self.root
    }

    /// Maximum root-to-leaf edge count; 0 for a leaf-only tree.
    pub fn height(&self) -> usize {
        self.root.height()
    }

    /// Total number of tree nodes, inner and leaf.
    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    /// Points in depth-first order together with their ids.
    pub fn points_in_order(&self) -> Vec<StoredPoint> {
        let mut out = Vec::with_capacity(self.len);
        self.root.for_each_point(&mut |sp| out.push(*sp));
        out
    }

    /// Counts how many of the sampled points fall into each cell at the
    /// given depth and compares the occupancy against the uniform
    /// `4^-depth` expectation.
    ///
    /// Every sampled point must reach depth `depth` without hitting a
    /// leaf; otherwise the tree is not sufficiently expanded in the
    /// probed region and an error is returned.
    pub fn mass_fraction_check(
        &self,
        depth: usize,
        sample: &[PolarPoint],
    ) -> Result<MassFractionReport> {
        if depth > self.height() {
            return Err(Error::DepthNotExpanded {
                depth,
                height: self.height(),
            });
        }
        let cells = 1usize << (2 * depth);
        let mut counts = vec![0u64; cells];
        for &p in sample {
            let radius = self.density.disk_radius();
            let p = if p.r() >= radius {
                PolarPoint::new(p.phi(), radius * (1.0 - f64::EPSILON)).unwrap()
            } else {
                p
            };
            let mut node = &self.root;
            let mut index = 0usize;
            for _ in 0..depth {
                match &node.content {
                    NodeContent::Leaf(_) => {
                        return Err(Error::DepthNotExpanded {
                            depth,
                            height: self.height(),
                        })
                    }
                    NodeContent::Inner(children) => {
                        let i = QuadtreeNode::child_index(children, p);
                        index = index * 4 + i;
                        node = &children[i];
                    }
                }
            }
            counts[index] += 1;
        }
        Ok(MassFractionReport::new(counts, sample.len() as u64))
    }
}

fn insert_rec(
    node: &mut QuadtreeNode,
    stored: StoredPoint,
    density: &RadialDensity,
    capacity: usize,
) {
    node.subtree_size += 1;
    match &mut node.content {
        NodeContent::Leaf(points) => {
            points.push(stored);
            if points.len() > capacity {
                try_split(node, density, capacity);
            }
        }
        NodeContent::Inner(children) => {
            let i = QuadtreeNode::child_index(children, stored.point);
            insert_rec(&mut children[i], stored, density, capacity);
        }
    }
}

/// Splits an overfull leaf, recursing into children that remain overfull.
/// A refused split (degenerate cell, or a cell holding only copies of one
/// point) leaves the leaf overflowing; it will never divide the points.
fn try_split(node: &mut QuadtreeNode, density: &RadialDensity, capacity: usize) {
    let NodeContent::Leaf(points) = &node.content else {
        return;
    };
    let first = points[0].point;
    if points.iter().all(|sp| sp.point == first) {
        return;
    }
    let coords: Vec<PolarPoint> = points.iter().map(|sp| sp.point).collect();
    let Ok((mid_phi, mid_r)) = split_cell(&node.bounds, density, &coords) else {
        return;
    };

    let b = &node.bounds;
    let quadrant = |min_phi: f64, max_phi: f64, min_r: f64, max_r: f64| {
        QuadtreeNode::empty_leaf(
            CellBounds::new(min_phi, max_phi, min_r, max_r)
                .expect("split coordinates stay inside the parent cell"),
        )
    };
    let mut children = Box::new([
        quadrant(b.min_phi(), mid_phi, b.min_r(), mid_r),
        quadrant(mid_phi, b.max_phi(), b.min_r(), mid_r),
        quadrant(b.min_phi(), mid_phi, mid_r, b.max_r()),
        quadrant(mid_phi, b.max_phi(), mid_r, b.max_r()),
    ]);

    let NodeContent::Leaf(points) =
        std::mem::replace(&mut node.content, NodeContent::Leaf(Vec::new()))
    else {
        unreachable!()
    };
    for sp in points {
        let i = QuadtreeNode::child_index(&children, sp.point);
        let child = &mut children[i];
        child.subtree_size += 1;
        let NodeContent::Leaf(child_points) = &mut child.content else {
            unreachable!()
        };
        child_points.push(sp);
    }
    for child in children.iter_mut() {
        if child.subtree_size > capacity {
            try_split(child, density, capacity);
        }
    }
    node.content = NodeContent::Inner(children);
}

/// Occupancy of the cells at one depth, with the chi-square statistic
/// against the uniform `4^-depth` expectation.
#[derive(Clone, Debug)]
pub struct MassFractionReport {
    counts: Vec<u64>,
    total: u64,
}

impl MassFractionReport {
    fn new(counts: Vec<u64>, total: u64) -> Self {
        MassFractionReport { counts, total }
    }

    #[inline]
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn fractions(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    pub fn chi_square(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let expected = self.total as f64 / self.counts.len() as f64;
        self.counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum()
    }
}

/// Reads a `phi,r` CSV point file. Malformed rows are rejected with their
/// line number; blank lines are skipped.
pub fn read_points_csv<R: BufRead>(reader: R) -> Result<Vec<PolarPoint>> {
    let mut points = Vec::new();
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing `phi,r` header".to_string(),
            })
        }
    };
    if header.trim() != "phi,r" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `phi,r`, got `{}`", header.trim()),
        });
    }
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let mut fields = text.split(',');
        let (Some(phi_s), Some(r_s), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two comma-separated fields, got `{text}`"),
            });
        };
        let phi: f64 = phi_s.trim().parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad phi `{}`: {e}", phi_s.trim()),
        })?;
        let r: f64 = r_s.trim().parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad r `{}`: {e}", r_s.trim()),
        })?;
        let point = PolarPoint::new(phi, r).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        points.push(point);
    }
    Ok(points)
}
