//! Polar points, distances, and point-to-cell distance bounds.
//!
//! Both supported geometries share the polar coordinate representation
//! `(phi, r)`. Euclidean distances follow the polar law of cosines,
//! hyperbolic distances the hyperbolic law of cosines in the native polar
//! model. Valid hyperbolic radii are limited to roughly `r < 350` by
//! `cosh` overflow; everything in this crate stays far below that.

use std::f64::consts::{PI, TAU};

use crate::{Error, Result};

/// A point `(phi, r)` in the polar plane.
///
/// The angle is normalized to `[0, 2*pi)` at construction; the radius must
/// be nonnegative and finite. Units of `r` depend on the geometry in use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarPoint {
    phi: f64,
    r: f64,
}

impl PolarPoint {
    pub fn new(phi: f64, r: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::NonFiniteCoordinate(phi));
        }
        if !r.is_finite() {
            return Err(Error::NonFiniteCoordinate(r));
        }
        if r < 0.0 {
            return Err(Error::NegativeRadius(r));
        }
        Ok(PolarPoint {
            phi: normalize_angle(phi),
            r,
        })
    }

    #[inline]
    pub fn phi(&self) -> f64 {
        self.phi
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Wraps an angle into `[0, 2*pi)`.
fn normalize_angle(phi: f64) -> f64 {
    let wrapped = phi.rem_euclid(TAU);
    // rem_euclid can round up to 2*pi for tiny negative inputs.
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// The plane the points live in. All distance operations dispatch on this.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Euclidean,
    Hyperbolic,
}

/// A polar quadtree cell `(min_phi, max_phi, min_r, max_r)`.
///
/// Containment is half-open on both axes: a point belongs to the cell iff
/// `min_phi <= phi < max_phi` and `min_r <= r < max_r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellBounds {
    min_phi: f64,
    max_phi: f64,
    min_r: f64,
    max_r: f64,
}

impl CellBounds {
    pub fn new(min_phi: f64, max_phi: f64, min_r: f64, max_r: f64) -> Result<Self> {
        let ok = (0.0..=max_phi).contains(&min_phi)
            && max_phi <= TAU
            && (0.0..=max_r).contains(&min_r)
            && max_r.is_finite();
        if !ok {
            return Err(Error::InvalidCellBounds {
                min_phi,
                max_phi,
                min_r,
                max_r,
            });
        }
        Ok(CellBounds {
            min_phi,
            max_phi,
            min_r,
            max_r,
        })
    }

    #[inline]
    pub fn min_phi(&self) -> f64 {
        self.min_phi
    }

    #[inline]
    pub fn max_phi(&self) -> f64 {
        self.max_phi
    }

    #[inline]
    pub fn min_r(&self) -> f64 {
        self.min_r
    }

    #[inline]
    pub fn max_r(&self) -> f64 {
        self.max_r
    }

    #[inline]
    pub fn contains(&self, p: PolarPoint) -> bool {
        self.min_phi <= p.phi
            && p.phi < self.max_phi
            && self.min_r <= p.r
            && p.r < self.max_r
    }
}

/// Infimum and supremum of the distance from a query point to a cell.
#[derive(Clone, Copy, Debug)]
pub struct DistanceBounds {
    infimum: f64,
    supremum: f64,
}

impl DistanceBounds {
    #[inline]
    pub fn infimum(&self) -> f64 {
        self.infimum
    }

    #[inline]
    pub fn supremum(&self) -> f64 {
        self.supremum
    }
}

/// Distance between two points under the chosen geometry.
///
/// Symmetric, nonnegative, and zero exactly for coinciding coordinates.
/// The hyperbolic `acosh` argument is clamped to 1 from below so that
/// rounding on near-identical points cannot produce NaN.
#[inline]
pub fn distance(g: Geometry, p1: PolarPoint, p2: PolarPoint) -> f64 {
    dist_raw(g, p1.phi, p1.r, p2.phi, p2.r)
}

#[inline]
pub(crate) fn dist_raw(g: Geometry, phi1: f64, r1: f64, phi2: f64, r2: f64) -> f64 {
    // Both laws of cosines are evaluated through the half-angle identity
    // (1 - cos x = 2 sin^2(x/2)), which separates the radial term from a
    // nonnegative angular term. The textbook forms subtract two nearly
    // equal products for small angle differences and lose all precision
    // at large radii (absolute error ~ eps * e^(r1 + r2) in the
    // hyperbolic acosh argument).
    let half = 0.5 * (phi1 - phi2);
    let s = half.sin();
    match g {
        Geometry::Euclidean => {
            let dr = r1 - r2;
            let sq = dr * dr + 4.0 * r1 * r2 * s * s;
            sq.max(0.0).sqrt()
        }
        Geometry::Hyperbolic => {
            if phi1 == phi2 {
                return (r1 - r2).abs();
            }
            let arg = (r1 - r2).cosh() + 2.0 * r1.sinh() * r2.sinh() * s * s;
            arg.max(1.0).acosh()
        }
    }
}

/// Infimum and supremum of the distance from `q` to the cell `c`.
///
/// The extrema of the distance function restricted to the cell boundary
/// lie either at the four corners, on an angular boundary at the radius
/// where the radial derivative vanishes, or on a radial boundary at
/// `phi_q` or `phi_q + pi`. Candidates falling outside the boundary
/// segment are discarded. If the cell contains `q` the infimum is zero.
pub fn cell_distance_bounds(g: Geometry, c: &CellBounds, q: PolarPoint) -> DistanceBounds {
    // At most: 4 corners + 2 angular extrema + 2 radial arcs * 2 points.
    let mut candidates = [(0.0f64, 0.0f64); 10];
    let mut len = 0usize;

    for corner in [
        (c.min_phi, c.min_r),
        (c.min_phi, c.max_r),
        (c.max_phi, c.min_r),
        (c.max_phi, c.max_r),
    ] {
        candidates[len] = corner;
        len += 1;
    }

    // Radial extremum on each angular boundary (fixed phi, varying r).
    // The hyperbolic root r = ln((a+b)/(a-b))/2 with a = cosh(r_q) and
    // b = sinh(r_q) cos(dphi) is rewritten through half angles so that
    // neither a+b nor a-b is formed by cancellation:
    //   a + b = e^(-r_q) + 2 sinh(r_q) cos^2(dphi/2)
    //   a - b = e^(-r_q) + 2 sinh(r_q) sin^2(dphi/2)
    // Both are strictly positive, so the root always exists (the a = b
    // degeneracy cannot occur at finite radii).
    for phi_b in [c.min_phi, c.max_phi] {
        let r_ext = match g {
            Geometry::Euclidean => q.r * (phi_b - q.phi).cos(),
            Geometry::Hyperbolic => {
                let half = 0.5 * (q.phi - phi_b);
                let (sin_h, cos_h) = (half.sin(), half.cos());
                let base = (-q.r).exp();
                let sinh_q = q.r.sinh();
                let plus = base + 2.0 * sinh_q * cos_h * cos_h;
                let minus = base + 2.0 * sinh_q * sin_h * sin_h;
                0.5 * (plus / minus).ln()
            }
        };
        if c.min_r < r_ext && r_ext < c.max_r {
            candidates[len] = (phi_b, r_ext);
            len += 1;
        }
    }

    // Angular extrema on the radial boundaries (fixed r, varying phi):
    // the derivative vanishes at phi_q and its mirror phi_q + pi.
    let mirrored = normalize_angle(q.phi + PI);
    for phi_e in [q.phi, mirrored] {
        if c.min_phi < phi_e && phi_e < c.max_phi {
            candidates[len] = (phi_e, c.min_r);
            candidates[len + 1] = (phi_e, c.max_r);
            len += 2;
        }
    }

    let mut infimum = f64::INFINITY;
    let mut supremum = 0.0f64;
    for &(phi, r) in &candidates[..len] {
        let d = dist_raw(g, q.phi, q.r, phi, r);
        infimum = infimum.min(d);
        supremum = supremum.max(d);
    }
    if c.contains(q) {
        infimum = 0.0;
    }
    DistanceBounds { infimum, supremum }
}
