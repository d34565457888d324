//! Chords: intersections of closed-geodesic lifts with the fundamental
//! domain.
//!
//! Every lift of a closed geodesic is a half-circle centered on the real
//! axis. The domain is convex (a strip intersected with circle
//! exteriors), so each lift meets it in a single arc, the *chord*,
//! computed in closed form by intersecting the angle intervals imposed
//! by each boundary constraint. Walking the closed geodesic — chord by
//! chord, conjugating the lift by the pullback word at each exit —
//! recovers all of its chords; the chord lengths must sum to the
//! translation length, which certifies that no chord was missed.
//!
//! A geodesic through order-2 cone points retraces itself: the walk then
//! visits every chord exactly twice ("folded"), and the geodesic bounds
//! a degenerate region of zero area.

use crate::groups::ford::FordDomain;
use crate::groups::pullback::{pullback, PullCtx};
use crate::groups::GroupError;
use crate::hypgeom::{Geodesic, HPoint};

/// Which boundary piece a chord endpoint lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryHit {
    /// The vertical x = -1/2.
    Left,
    /// The vertical x = +1/2.
    Right,
    /// The floor circle with this index.
    Floor(usize),
}

/// A maximal geodesic segment inside the domain, on the half-circle
/// `x = center + radius cos(theta)`, `y = radius sin(theta)`. Theta
/// decreases from `th_hi` (left end) to `th_lo` (right end).
#[derive(Debug, Clone)]
pub struct Chord {
    pub center: f64,
    pub radius: f64,
    pub th_lo: f64,
    pub th_hi: f64,
    pub len: f64,
    /// Binding boundary at the right end (theta = th_lo).
    pub hit_lo: BoundaryHit,
    /// Binding boundary at the left end (theta = th_hi).
    pub hit_hi: BoundaryHit,
}

impl Chord {
    pub fn point(&self, theta: f64) -> HPoint {
        HPoint::new(
            self.center + self.radius * theta.cos(),
            self.radius * theta.sin(),
        )
    }

    pub fn geodesic(&self) -> Geodesic {
        Geodesic::Arc { center: self.center, radius: self.radius }
    }

    /// Endpoint x-coordinates (left, right).
    pub fn x_range(&self) -> (f64, f64) {
        (
            self.center + self.radius * self.th_hi.cos(),
            self.center + self.radius * self.th_lo.cos(),
        )
    }

    /// Unit tangent at `theta` pointing in the direction of increasing x
    /// (decreasing theta).
    pub fn tangent_pos_x(&self, theta: f64) -> (f64, f64) {
        (theta.sin(), -theta.cos())
    }

    fn key(&self) -> [i64; 4] {
        [
            (self.center * 1e9).round() as i64,
            (self.radius * 1e9).round() as i64,
            (self.th_lo * 1e9).round() as i64,
            (self.th_hi * 1e9).round() as i64,
        ]
    }
}

/// Arclength parameter along a half-circle: ds = d(theta)/sin(theta),
/// antiderivative ln tan(theta/2), increasing in theta.
pub fn arc_param(theta: f64) -> f64 {
    (theta / 2.0).tan().ln()
}

fn theta_from_param(l: f64) -> f64 {
    2.0 * l.exp().atan()
}

/// Axis of a hyperbolic f64 matrix as (center, radius).
pub fn axis_of(m: &[[f64; 2]; 2]) -> Result<(f64, f64), GroupError> {
    let tr = m[0][0] + m[1][1];
    let disc = tr * tr - 4.0;
    if disc <= 0.0 {
        return Err(GroupError::Domain("axis of a non-hyperbolic element".into()));
    }
    if m[1][0].abs() < 1e-9 {
        // would fix infinity; the cusp stabilizer is parabolic, so this
        // cannot occur for group elements
        return Err(GroupError::Domain("hyperbolic element fixing infinity".into()));
    }
    let center = (m[0][0] - m[1][1]) / (2.0 * m[1][0]);
    let radius = disc.sqrt() / (2.0 * m[1][0].abs());
    Ok((center, radius))
}

/// Clips the half-circle `(center, radius)` against the domain. Returns
/// the chord, or `None` when the circle misses the domain.
pub fn clip_axis(domain: &FordDomain, center: f64, radius: f64) -> Option<Chord> {
    let (p, r) = (center, radius);
    // start with the full circle; tighten [th_lo, th_hi]
    let mut th_lo = 0.0f64;
    let mut th_hi = std::f64::consts::PI;
    let mut hit_lo = BoundaryHit::Right; // placeholder, fixed below
    let mut hit_hi = BoundaryHit::Left;

    // x <= 1/2: cos(theta) <= (1/2 - p)/r, a lower bound on theta
    let u = (0.5 - p) / r;
    if u <= -1.0 {
        return None;
    }
    if u < 1.0 {
        th_lo = u.acos();
        hit_lo = BoundaryHit::Right;
    }
    // x >= -1/2: cos(theta) >= (-1/2 - p)/r, an upper bound on theta
    let v = (-0.5 - p) / r;
    if v >= 1.0 {
        return None;
    }
    if v > -1.0 {
        th_hi = v.acos();
        hit_hi = BoundaryHit::Left;
    }

    for (i, c) in domain.circles.iter().enumerate() {
        // outside circle i: a + b cos(theta) >= 0 on the axis
        let dp = p - c.center_f;
        let a = dp * dp + r * r - c.radius_f * c.radius_f;
        let b = 2.0 * r * dp;
        if b.abs() < 1e-15 {
            if a < 0.0 {
                return None; // concentric and strictly inside
            }
            continue;
        }
        let q = (-a / b).clamp(-1.0, 1.0);
        let th = q.acos();
        if b > 0.0 {
            // cos(theta) >= q: theta <= th, an upper bound
            if -a / b >= 1.0 {
                return None;
            }
            if -a / b > -1.0 && th < th_hi {
                th_hi = th;
                hit_hi = BoundaryHit::Floor(i);
            }
        } else {
            // cos(theta) <= q: theta >= th, a lower bound
            if -a / b <= -1.0 {
                return None;
            }
            if -a / b < 1.0 && th > th_lo {
                th_lo = th;
                hit_lo = BoundaryHit::Floor(i);
            }
        }
    }
    if th_lo >= th_hi - 1e-12 {
        return None;
    }
    let len = arc_param(th_hi) - arc_param(th_lo);
    Some(Chord { center: p, radius: r, th_lo, th_hi, len, hit_lo, hit_hi })
}

/// The chords of one closed geodesic, with traversal multiplicities.
#[derive(Debug, Clone)]
pub struct ClassGeometry {
    pub chords: Vec<Chord>,
    pub mults: Vec<u32>,
    /// Translation length of the class (sum of chord lengths with
    /// multiplicity).
    pub total_len: f64,
    /// True when the geodesic retraces itself through order-2 cone
    /// points (every chord visited twice).
    pub folded: bool,
    /// True when every lift of the geodesic lies in the side skeleton of
    /// the tessellation (the axis coincides with a boundary circle).
    /// Such a curve has no transversal chords and cannot separate: its
    /// complement contains the connected image of the open domain.
    pub boundary: bool,
    /// Canonical fingerprint: the sorted quantized chord keys.
    pub fingerprint: Vec<[i64; 4]>,
}

/// Whether the half-circle `(center, radius)` coincides with a boundary
/// circle of the domain.
fn is_boundary_circle(domain: &FordDomain, center: f64, radius: f64) -> bool {
    domain.circles.iter().any(|c| {
        (c.center_f - center).abs() < 1e-9 && (c.radius_f - radius).abs() < 1e-9
    })
}

const STEP_EPS: f64 = 1e-7;

/// Walks the closed geodesic of a hyperbolic element once around,
/// collecting its chords in the domain. `ell` is the exact translation
/// length.
pub fn chord_walk(
    domain: &FordDomain,
    ctx: &PullCtx,
    g: &[[f64; 2]; 2],
    ell: f64,
) -> Result<ClassGeometry, GroupError> {
    let (p0, r0) = axis_of(g)?;
    // move the lift so its axis crosses the domain: pull back a point of
    // the axis. The summit usually works, but when its pullback lands on
    // a corner of the domain the translated axis may only graze the
    // boundary, so fall back to nearby axis points until the clipped
    // chord has positive length.
    let axis = Geodesic::Arc { center: p0, radius: r0 };
    let mut first_and_axis: Option<(Chord, f64, f64)> = None;
    for t in [0.0, 0.17, -0.17, 0.34, -0.34, 0.51, -0.51] {
        let res = pullback(ctx, axis.point_at(t))?;
        let g0 = axis.transform(&res.mat);
        let (np, nr) = match g0 {
            Geodesic::Arc { center, radius } => (center, radius),
            Geodesic::Vertical { .. } => {
                return Err(GroupError::Domain("lift axis became vertical".into()));
            }
        };
        if is_boundary_circle(domain, np, nr) {
            // the closed geodesic runs along the side skeleton of the
            // tessellation and has no transversal chords
            return Ok(ClassGeometry {
                chords: Vec::new(),
                mults: Vec::new(),
                total_len: ell,
                folded: false,
                boundary: true,
                fingerprint: vec![[-1, (ell * 1e9).round() as i64, 0, 0]],
            });
        }
        if let Some(ch) = clip_axis(domain, np, nr) {
            if ch.len > 1e-9 {
                first_and_axis = Some((ch, np, nr));
                break;
            }
        }
    }
    let Some((first, _p, _r)) = first_and_axis else {
        return Err(GroupError::Domain("pulled-back axis misses the domain".into()));
    };
    // traversal direction: start at the left end heading right (+x)
    let mut dir_pos_x = true;
    let mut chord = first;
    let mut acc = 0.0f64;
    let mut chords: Vec<Chord> = Vec::new();
    let mut mults: Vec<u32> = Vec::new();
    let cap = 4 + (ell / STEP_EPS.max(1e-3)) as usize; // generous step cap
    for _ in 0..cap.min(100_000) {
        // record
        let key = chord.key();
        if let Some(i) = chords.iter().position(|c| c.key() == key) {
            mults[i] += 1;
        } else {
            chords.push(chord.clone());
            mults.push(1);
        }
        acc += chord.len;
        if acc >= ell - 1e-7 {
            break;
        }
        // step just past the exit end and pull back into the domain.
        // When the geodesic exits through a vertex of the domain, the
        // first step beyond may still land on the side skeleton (empty
        // pullback word) or the continued axis may only graze the next
        // tile; retry with doubled steps. A vertex crossing carries no
        // chord length, and the final length-closure check certifies
        // that nothing real was skipped.
        let mut step = STEP_EPS;
        let (next, image) = loop {
            let exit_param = if dir_pos_x {
                arc_param(chord.th_lo) - step
            } else {
                arc_param(chord.th_hi) + step
            };
            let beyond = chord.point(theta_from_param(exit_param));
            let res = pullback(ctx, beyond)?;
            if !res.word.is_empty() {
                let gnew = chord.geodesic().transform(&res.mat);
                let (np, nr) = match gnew {
                    Geodesic::Arc { center, radius } => (center, radius),
                    Geodesic::Vertical { .. } => {
                        return Err(GroupError::Domain("lift axis became vertical".into()));
                    }
                };
                if let Some(ch) = clip_axis(domain, np, nr) {
                    if ch.len > 1e-9 {
                        break (ch, res.z);
                    }
                }
            }
            step *= 2.0;
            if step > 2e-4 {
                return Err(GroupError::Domain(
                    "geodesic walk stalled at a domain boundary".into(),
                ));
            }
        };
        // the image point sits just inside the new chord near its entry
        // end; head toward the far end
        let th_entry = {
            let c = (image.x - next.center) / next.radius;
            c.clamp(-1.0, 1.0).acos()
        };
        dir_pos_x = (th_entry - next.th_hi).abs() < (th_entry - next.th_lo).abs();
        chord = next;
    }
    if (acc - ell).abs() > 1e-5 {
        return Err(GroupError::Domain(format!(
            "chord walk length {acc} does not close to the translation length {ell}"
        )));
    }
    let folded = mults.iter().all(|&m| m % 2 == 0);
    if !folded && mults.iter().any(|&m| m != mults[0]) {
        return Err(GroupError::Domain(
            "inconsistent chord multiplicities in geodesic walk".into(),
        ));
    }
    let mut fingerprint: Vec<[i64; 4]> = chords.iter().map(|c| c.key()).collect();
    fingerprint.sort_unstable();
    Ok(ClassGeometry { chords, mults, total_len: ell, folded, boundary: false, fingerprint })
}

/// Hyperbolic distance between two disjoint half-circle geodesics by
/// golden-section search along the first.
pub fn geodesic_distance(a: &Geodesic, b: &Geodesic) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-20.0f64, 20.0f64);
    let f = |t: f64| b.distance_to(a.point_at(t));
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    f(0.5 * (lo + hi))
}

/// Whether two half-circle geodesics cross inside the upper half-plane
/// (their real endpoint intervals strictly interleave).
pub fn geodesics_cross(a: &Geodesic, b: &Geodesic) -> bool {
    let (a1, a2) = match *a {
        Geodesic::Arc { center, radius } => (center - radius, center + radius),
        Geodesic::Vertical { x } => (x, f64::INFINITY),
    };
    let (b1, b2) = match *b {
        Geodesic::Arc { center, radius } => (center - radius, center + radius),
        Geodesic::Vertical { x } => (x, f64::INFINITY),
    };
    let inside = |x: f64, l: f64, r: f64| x > l + 1e-12 && x < r - 1e-12;
    inside(b1, a1, a2) != inside(b2, a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::ford::build_domain;
    use crate::qfield::{ExactMatrix, QnElement};

    #[test]
    fn clip_rejects_far_circles_and_accepts_crossing_ones() {
        let d = build_domain(11, None).unwrap();
        // a circle entirely to the right of the strip
        assert!(clip_axis(&d, 5.0, 1.0).is_none());
        // a big circle over the whole floor crosses both verticals
        let ch = clip_axis(&d, 0.0, 2.0).unwrap();
        assert_eq!(ch.hit_lo, BoundaryHit::Right);
        assert_eq!(ch.hit_hi, BoundaryHit::Left);
        let (xl, xr) = ch.x_range();
        assert!((xl + 0.5).abs() < 1e-12 && (xr - 0.5).abs() < 1e-12);
        // a tiny circle hidden inside the Fricke circle
        assert!(clip_axis(&d, 0.0, 0.05).is_none());
    }

    #[test]
    fn chord_length_matches_distance() {
        let d = build_domain(11, None).unwrap();
        let ch = clip_axis(&d, 0.0, 2.0).unwrap();
        let a = ch.point(ch.th_lo);
        let b = ch.point(ch.th_hi);
        assert!((crate::hypgeom::hyp_distance(a, b) - ch.len).abs() < 1e-10);
    }

    #[test]
    fn folded_walk_on_the_shortest_class() {
        // the trace-3 geodesic passes through two order-2 cone points and
        // retraces itself
        let d = build_domain(11, None).unwrap();
        let ctx = d.pull_ctx(None);
        let g = ExactMatrix::from_integers(11, 5, -1, 11, -2).unwrap();
        let ell = 2.0 * (1.5f64).acosh();
        let geo = chord_walk(&d, &ctx, &g.to_f64(), ell).unwrap();
        assert!(geo.folded, "mults: {:?}", geo.mults);
        assert!((geo.total_len - ell).abs() < 1e-9);
    }

    #[test]
    fn embedded_walk_on_the_realizing_class() {
        // trace sqrt(11): the separating geodesic, embedded
        let d = build_domain(11, None).unwrap();
        let ctx = d.pull_ctx(None);
        let q = |a: i64, b: i64| QnElement::sqrt_term(a, b, 11);
        let z = QnElement::from_rational(0, 1);
        let g = ExactMatrix::new(11, q(1, 1), q(-1, 11), q(1, 1), z).unwrap();
        let ell = 2.0 * (11f64.sqrt() / 2.0).acosh();
        let geo = chord_walk(&d, &ctx, &g.to_f64(), ell).unwrap();
        assert!(!geo.folded, "mults: {:?}", geo.mults);
        assert!(geo.mults.iter().all(|&m| m == 1));
        let sum: f64 = geo.chords.iter().map(|c| c.len).sum();
        assert!((sum - ell).abs() < 1e-6);
    }

    #[test]
    fn crossing_detection() {
        let a = Geodesic::Arc { center: 0.0, radius: 1.0 };
        let b = Geodesic::Arc { center: 0.5, radius: 1.0 };
        let c = Geodesic::Arc { center: 3.0, radius: 1.0 };
        let n = Geodesic::Arc { center: 0.0, radius: 2.0 }; // nested around a
        assert!(geodesics_cross(&a, &b));
        assert!(!geodesics_cross(&a, &c));
        assert!(!geodesics_cross(&a, &n));
        assert!(geodesic_distance(&a, &c) > 0.5);
    }
}
