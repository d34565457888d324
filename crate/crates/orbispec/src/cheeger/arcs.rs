//! Geodesic arcs between cone points.
//!
//! An order-2 cone point is the fixed point of an involution. For two
//! involutions with distinct fixed points, the product is hyperbolic
//! and translates along the geodesic through both fixed points by twice
//! their distance, so the arc between the cone points has length
//! `arccosh(|tr(product)|/2)`.
//!
//! Going around such an arc gives a closed curve of twice the arc
//! length bounding a zero-area slit; offsetting outward by `s` yields
//! boundary `2 L cosh(s)` against area `2 L sinh(s)`, a ratio that never
//! drops below 1. Arcs therefore cannot beat the height-1 horocycle cut
//! and are enumerated purely for the audit trail.

use super::chords::geodesic_distance;
use crate::groups::covering::CoveringElement;
use crate::groups::ford::FordDomain;
use crate::groups::pullback::pullback;
use crate::groups::GroupError;
use crate::hypgeom::{elliptic_fixed_point, Geodesic};
use crate::qfield::ExactMatrix;

/// A geodesic arc between two cone points of the quotient.
#[derive(Debug, Clone)]
pub struct ConeArc {
    /// Indices into the domain's cone-point list (may coincide).
    pub endpoints: (usize, usize),
    pub length: f64,
    /// The hyperbolic product of the two involutions.
    pub witness: ExactMatrix,
}

/// Maps an elliptic fixed point to the index of its cone-point orbit.
fn cone_orbit(domain: &FordDomain, g: &ExactMatrix) -> Result<usize, GroupError> {
    let z = elliptic_fixed_point(g).map_err(|e| GroupError::Domain(e.to_string()))?;
    let ctx = domain.pull_ctx(None);
    let res = pullback(&ctx, z)?;
    for (i, cp) in domain.cone_points.iter().enumerate() {
        for &(lx, ly) in &cp.lifts {
            if (lx - res.z.x).abs() < 1e-7 && (ly - res.z.y).abs() < 1e-7 {
                return Ok(i);
            }
        }
    }
    Err(GroupError::Domain(format!(
        "fixed point ({}, {}) is not a cone point of the domain",
        res.z.x, res.z.y
    )))
}

/// Enumerates the geodesic arcs between cone points with length at most
/// `bound`, from the involutions visible in a covering set.
pub fn cone_point_arcs(
    domain: &FordDomain,
    covering: &[CoveringElement],
    bound: f64,
) -> Result<Vec<ConeArc>, GroupError> {
    // order-2 elements: exact trace zero
    let mut involutions = Vec::new();
    for e in covering {
        let tr = e.mat.trace().map_err(|er| GroupError::Domain(er.to_string()))?;
        if tr.sign() == 0 {
            involutions.push(e.mat.clone());
        }
    }
    let max_half_trace = (bound.cosh()).max(1.0);
    let mut seen = std::collections::HashSet::new();
    let mut arcs = Vec::new();
    for (i, s1) in involutions.iter().enumerate() {
        for s2 in involutions.iter().skip(i + 1) {
            let prod = s1
                .mat_mul(s2)
                .map_err(|e| GroupError::Domain(e.to_string()))?;
            let tr = prod.trace().map_err(|e| GroupError::Domain(e.to_string()))?;
            let trf = tr.to_f64().abs();
            if trf <= 2.0 + 1e-12 {
                // same fixed point (the product is parabolic or trivial)
                continue;
            }
            let half = trf / 2.0;
            if half > max_half_trace {
                continue;
            }
            let length = half.acosh();
            let o1 = cone_orbit(domain, s1)?;
            let o2 = cone_orbit(domain, s2)?;
            let (o1, o2) = if o1 <= o2 { (o1, o2) } else { (o2, o1) };
            let key = (o1, o2, (length * 1e9).round() as i64);
            if seen.insert(key) {
                arcs.push(ConeArc { endpoints: (o1, o2), length, witness: prod });
            }
        }
    }
    arcs.sort_by(|a, b| a.length.partial_cmp(&b.length).unwrap());
    Ok(arcs)
}

/// Distance from a cone-point lift to the nearest of the given
/// geodesics (used for offset bounds).
pub fn min_distance_to_geodesics(geos: &[Geodesic], x: f64, y: f64) -> f64 {
    geos.iter()
        .map(|g| g.distance_to(crate::hypgeom::HPoint::new(x, y)))
        .fold(f64::INFINITY, f64::min)
}

/// Minimum pairwise distance among a set of geodesics (ignoring pairs
/// that cross; the caller rejects crossings separately).
pub fn min_pairwise_distance(geos: &[Geodesic]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in geos.iter().enumerate() {
        for b in geos.iter().skip(i + 1) {
            if super::chords::geodesics_cross(a, b) {
                continue;
            }
            best = best.min(geodesic_distance(a, b));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::covering::{covering_set, CoveringOptions};
    use crate::groups::ford::build_domain;

    #[test]
    fn shortest_arc_between_cone_points() {
        let d = build_domain(11, None).unwrap();
        let cov = covering_set(&d, None, 1.3, &CoveringOptions::default()).unwrap();
        let arcs = cone_point_arcs(&d, &cov, 1.3).unwrap();
        assert!(!arcs.is_empty());
        // the shortest arc joins two distinct order-2 cone points at
        // distance arccosh(3/2)
        let a = &arcs[0];
        assert!((a.length - 1.5f64.acosh()).abs() < 1e-9, "len = {}", a.length);
        assert_ne!(a.endpoints.0, a.endpoints.1);
        let tr = a.witness.trace().unwrap().to_f64().abs();
        assert!((tr - 3.0).abs() < 1e-9);
    }

    #[test]
    fn parabolic_products_are_excluded() {
        let d = build_domain(11, None).unwrap();
        let cov = covering_set(&d, None, 1.0, &CoveringOptions::default()).unwrap();
        let arcs = cone_point_arcs(&d, &cov, 2.0).unwrap();
        for a in &arcs {
            assert!(a.length > 1e-9);
        }
    }
}
