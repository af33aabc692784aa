//! Probabilistic neighborhood queries (PNQs) over planar point sets.
//!
//! A PNQ takes a query point `q` and a monotonically decreasing function
//! `f` mapping distances to probabilities, and returns a random subset of
//! the indexed point set in which each point `p` appears independently
//! with probability `f(dist(q, p))`. The index is a polar quadtree over a
//! disk in either Euclidean or hyperbolic geometry; with subtree
//! aggregation a query runs in `O((|N| + sqrt(n)) log n)` time instead of
//! the `Theta(n)` cost of probing every point.
//!
//! Modules:
//!
//! - [`geometry`]: polar points, point-to-point distances, and exact
//!   infimum/supremum of the distance from a point to a polar cell.
//! - [`quadtree`]: the polar quadtree with probability-mass-balanced (or
//!   median) splitting and per-node subtree counts.
//! - [`query`]: the baseline and subtree-aggregated query algorithms plus
//!   the geometric skip primitive.
//! - [`reference`]: the pairwise distance probing oracle and the
//!   statistical machinery used to validate the fast queries against it.
//! - [`rhg`]: random hyperbolic graph generation built on PNQs.
//! - [`spread`]: SIR-style probabilistic spreading over raster-derived
//!   point sets.

pub mod geometry;
pub mod quadtree;
pub mod query;
pub mod reference;
pub mod rhg;
pub mod spread;

mod error;

pub use error::{Error, Result};
