//! Floating-point geometry of the upper half-plane: Möbius action,
//! distances, geodesics and axes, elliptic fixed points, and equidistant
//! (hypercycle) offsets.
//!
//! Enumeration and ordering decisions elsewhere in the crate are made on
//! exact traces from [`crate::qfield`]; this module only does the numeric
//! geometry once those decisions are settled.

use crate::qfield::{ExactMatrix, IsometryClass};
use thiserror::Error;

/// Incidence tolerance for geometric predicates (point on geodesic,
/// matching of side endpoints, chord continuation across sides).
pub const EPS_GEO: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("expected a hyperbolic element, found {0:?}")]
    NotHyperbolic(IsometryClass),
    #[error("expected an elliptic element, found {0:?}")]
    NotElliptic(IsometryClass),
}

/// A point `z = x + iy` of the upper half-plane, `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(y > 0.0, "half-plane point needs y > 0, got {y}");
        Self { x, y }
    }
}

/// A complete geodesic: either a vertical line or a half-circle centered
/// on the real axis. Verticals are kept as their own variant rather than
/// as huge circles to avoid cancellation for cusp-bound axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geodesic {
    Vertical { x: f64 },
    Arc { center: f64, radius: f64 },
}

impl Geodesic {
    /// Geodesic with the given distinct boundary endpoints; `None` stands
    /// for the point at infinity.
    pub fn from_endpoints(p: Option<f64>, q: Option<f64>) -> Self {
        match (p, q) {
            (None, Some(x)) | (Some(x), None) => Geodesic::Vertical { x },
            (Some(p), Some(q)) => Geodesic::Arc {
                center: 0.5 * (p + q),
                radius: 0.5 * (p - q).abs(),
            },
            (None, None) => panic!("both endpoints at infinity"),
        }
    }

    /// The two boundary endpoints (`None` = infinity).
    pub fn endpoints(&self) -> (Option<f64>, Option<f64>) {
        match *self {
            Geodesic::Vertical { x } => (Some(x), None),
            Geodesic::Arc { center, radius } => {
                (Some(center - radius), Some(center + radius))
            }
        }
    }

    /// Whether `z` lies on the geodesic within `tol` (Euclidean residual).
    pub fn contains(&self, z: HPoint, tol: f64) -> bool {
        match *self {
            Geodesic::Vertical { x } => (z.x - x).abs() <= tol,
            Geodesic::Arc { center, radius } => {
                let dx = z.x - center;
                ((dx * dx + z.y * z.y).sqrt() - radius).abs() <= tol
            }
        }
    }

    /// Hyperbolic distance from `z` to the geodesic.
    pub fn distance_to(&self, z: HPoint) -> f64 {
        let sinh_d = match *self {
            Geodesic::Vertical { x } => (z.x - x).abs() / z.y,
            Geodesic::Arc { center, radius } => {
                let dx = z.x - center;
                (dx * dx + z.y * z.y - radius * radius).abs() / (2.0 * radius * z.y)
            }
        };
        sinh_d.asinh()
    }

    /// Point of the geodesic at signed arclength `t` from its summit
    /// (top of the arc, or height 1 on a vertical).
    pub fn point_at(&self, t: f64) -> HPoint {
        match *self {
            Geodesic::Vertical { x } => HPoint::new(x, t.exp()),
            Geodesic::Arc { center, radius } => {
                // unit-speed parametrization: z(t) = c + r (tanh t + i sech t)
                HPoint::new(center + radius * t.tanh(), radius / t.cosh())
            }
        }
    }

    /// Image under a Möbius transformation, computed on the endpoints.
    pub fn transform(&self, m: &[[f64; 2]; 2]) -> Geodesic {
        let (p, q) = self.endpoints();
        let map = |e: Option<f64>| -> Option<f64> {
            match e {
                None => {
                    if m[1][0].abs() < 1e-300 {
                        None
                    } else {
                        Some(m[0][0] / m[1][0])
                    }
                }
                Some(x) => {
                    let den = m[1][0] * x + m[1][1];
                    if den.abs() < 1e-12 * (m[1][0].abs() * x.abs() + m[1][1].abs()).max(1.0) {
                        None
                    } else {
                        Some((m[0][0] * x + m[0][1]) / den)
                    }
                }
            }
        };
        Geodesic::from_endpoints(map(p), map(q))
    }
}

/// Applies the Möbius transformation given by a real matrix to `z`.
pub fn mobius_apply_real(m: &[[f64; 2]; 2], z: HPoint) -> HPoint {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    // (az+b)(conj(cz+d)) / |cz+d|^2
    let re_num = (a * z.x + b) * (c * z.x + d) + a * c * z.y * z.y;
    let im_num = z.y * (a * d - b * c);
    let den = (c * z.x + d).powi(2) + (c * z.y).powi(2);
    HPoint::new(re_num / den, im_num / den)
}

/// Applies an exact group element to `z` (converting entries once).
pub fn mobius_apply(m: &ExactMatrix, z: HPoint) -> HPoint {
    mobius_apply_real(&m.to_f64(), z)
}

/// Hyperbolic distance between two points of the half-plane.
pub fn hyp_distance(z: HPoint, w: HPoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    let cosh_d = 1.0 + (dx * dx + dy * dy) / (2.0 * z.y * w.y);
    cosh_d.acosh()
}

/// Point at hyperbolic distance `s` from `z` in direction `theta`
/// (Euclidean angle of the initial tangent vector).
pub fn geodesic_step(z: HPoint, theta: f64, s: f64) -> HPoint {
    // Flow in the tangent space of i, conjugated to z by z = x + y*w.
    // At i, exp_i(s, theta) has the closed form below.
    let (sin_t, cos_t) = theta.sin_cos();
    let (sh, ch) = (s.sinh(), s.cosh());
    let den = ch - sh * sin_t;
    let wx = sh * cos_t / den;
    let wy = 1.0 / den;
    HPoint::new(z.x + z.y * wx, z.y * wy)
}

/// Axis and translation length of a hyperbolic element.
///
/// The translation length is `2 arccosh(|tr|/2)` with the trace taken
/// exactly; the axis joins the two real fixed points.
pub fn axis_and_length(m: &ExactMatrix) -> Result<(Geodesic, f64), GeomError> {
    let class = m.classify();
    if class != IsometryClass::Hyperbolic {
        return Err(GeomError::NotHyperbolic(class));
    }
    let tr = m.trace().expect("group element trace").to_f64().abs();
    let length = 2.0 * (tr / 2.0).acosh();
    let e = m.to_f64();
    let (a, b, c, d) = (e[0][0], e[0][1], e[1][0], e[1][1]);
    let axis = if c.abs() < 1e-12 {
        // fixed points b/(d-a) and infinity
        Geodesic::Vertical { x: b / (d - a) }
    } else {
        let disc = ((a + d) * (a + d) - 4.0).sqrt();
        let p = (a - d + disc) / (2.0 * c);
        let q = (a - d - disc) / (2.0 * c);
        Geodesic::from_endpoints(Some(p), Some(q))
    };
    Ok((axis, length))
}

/// The unique fixed point of an elliptic element in the open half-plane.
pub fn elliptic_fixed_point(m: &ExactMatrix) -> Result<HPoint, GeomError> {
    let class = m.classify();
    if !matches!(class, IsometryClass::Elliptic { .. }) {
        return Err(GeomError::NotElliptic(class));
    }
    let e = m.to_f64();
    let (a, c, d) = (e[0][0], e[1][0], e[1][1]);
    // roots of c z^2 + (d - a) z - b = 0; elliptic forces c != 0
    let tr = a + d;
    let y = (4.0 - tr * tr).sqrt() / (2.0 * c.abs());
    let x = (a - d) / (2.0 * c);
    Ok(HPoint::new(x, y))
}

/// Pair of hypercycles at distance `s` from a geodesic; `s = 0`
/// degenerates to the geodesic itself. The curves make the angle `theta`
/// with the real axis where `cos theta = tanh s`.
#[derive(Debug, Clone, Copy)]
pub struct EquidistantCurve {
    pub base: Geodesic,
    pub offset: f64,
    /// Angle between each hypercycle and the boundary circle/line.
    pub boundary_angle: f64,
}

pub fn equidistant_curve(base: Geodesic, s: f64) -> EquidistantCurve {
    assert!(s >= 0.0);
    EquidistantCurve {
        base,
        offset: s,
        boundary_angle: s.tanh().acos(),
    }
}

/// Length of the offset curve over a base arc of length `len`.
pub fn equidistant_length(len: f64, s: f64) -> f64 {
    len * s.cosh()
}

/// Area swept between a base arc of length `len` and its offset at `s`.
pub fn equidistant_area(len: f64, s: f64) -> f64 {
    len * s.sinh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::QnElement;
    use approx::assert_abs_diff_eq;

    fn t_shift(n: u64) -> ExactMatrix {
        ExactMatrix::from_integers(n, 1, 1, 0, 1).unwrap()
    }

    #[test]
    fn translation_moves_i() {
        let z = mobius_apply(&t_shift(11), HPoint::new(0.0, 1.0));
        assert_abs_diff_eq!(z.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.y, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_fixes_everything() {
        let id = ExactMatrix::identity(11);
        let z = HPoint::new(0.37, 2.9);
        let w = mobius_apply(&id, z);
        assert_abs_diff_eq!(w.x, z.x, epsilon = 1e-15);
        assert_abs_diff_eq!(w.y, z.y, epsilon = 1e-15);
    }

    fn order_two(n: u64) -> ExactMatrix {
        // (0, -1/sqrt(n); sqrt(n), 0)
        ExactMatrix::new(
            n,
            QnElement::zero(),
            QnElement::sqrt_term(-1, n as i64, n),
            QnElement::sqrt_term(1, 1, n),
            QnElement::zero(),
        )
        .unwrap()
    }

    #[test]
    fn involution_fixed_point() {
        let m = order_two(11);
        let p = elliptic_fixed_point(&m).unwrap();
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.y, 1.0 / 11f64.sqrt(), epsilon = 1e-14);
        let q = mobius_apply(&m, p);
        assert_abs_diff_eq!(q.x, p.x, epsilon = 1e-12);
        assert_abs_diff_eq!(q.y, p.y, epsilon = 1e-12);

        let std = ExactMatrix::from_integers(11, 0, -1, 1, 0).unwrap();
        let i = elliptic_fixed_point(&std).unwrap();
        assert_abs_diff_eq!(i.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(i.y, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn distance_basics() {
        let i = HPoint::new(0.0, 1.0);
        assert_eq!(hyp_distance(i, i), 0.0);
        assert_abs_diff_eq!(
            hyp_distance(i, HPoint::new(0.0, 2.0)),
            2f64.ln(),
            epsilon = 1e-12
        );
        // symmetry and triangle inequality on a sample triple
        let a = HPoint::new(-0.3, 0.4);
        let b = HPoint::new(0.8, 1.7);
        let c = HPoint::new(0.1, 0.05);
        assert_abs_diff_eq!(hyp_distance(a, b), hyp_distance(b, a), epsilon = 1e-12);
        assert!(hyp_distance(a, c) <= hyp_distance(a, b) + hyp_distance(b, c) + 1e-12);
    }

    #[test]
    fn isometry_invariance_of_distance() {
        let g = ExactMatrix::from_integers(11, 5, -1, 11, -2).unwrap();
        let z = HPoint::new(0.21, 0.9);
        let w = HPoint::new(-0.4, 1.3);
        assert_abs_diff_eq!(
            hyp_distance(mobius_apply(&g, z), mobius_apply(&g, w)),
            hyp_distance(z, w),
            epsilon = 1e-12
        );
    }

    #[test]
    fn axis_length_from_trace() {
        // trace sqrt(11): length 2 arccosh(sqrt(11)/2) ~ 2.18464
        let g1 = ExactMatrix::new(
            11,
            QnElement::sqrt_term(1, 1, 11),
            QnElement::sqrt_term(-1, 11, 11),
            QnElement::sqrt_term(1, 1, 11),
            QnElement::zero(),
        )
        .unwrap();
        let (_, len) = axis_and_length(&g1).unwrap();
        assert_abs_diff_eq!(len, 2.18464, epsilon = 1e-5);

        // trace 3: length 2 arccosh(3/2) ~ 1.92485
        let h = ExactMatrix::from_integers(11, 5, -1, 11, -2).unwrap();
        let (axis, len) = axis_and_length(&h).unwrap();
        assert_abs_diff_eq!(len, 1.92485, epsilon = 1e-5);
        // axis endpoints are fixed points
        let (p, q) = axis.endpoints();
        for e in [p.unwrap(), q.unwrap()] {
            let im = mobius_apply_real(&h.to_f64(), HPoint::new(e, 1e-9));
            assert_abs_diff_eq!(im.x, e, epsilon = 1e-6);
        }

        // parabolic input rejected
        let t = t_shift(11);
        assert!(axis_and_length(&t).is_err());
    }

    #[test]
    fn axis_is_distance_minimizer() {
        let h = ExactMatrix::from_integers(11, 5, -1, 11, -2).unwrap();
        let (axis, len) = axis_and_length(&h).unwrap();
        // on the axis, d(z, hz) = len; off the axis it is larger
        let on = axis.point_at(0.3);
        assert_abs_diff_eq!(hyp_distance(on, mobius_apply(&h, on)), len, epsilon = 1e-9);
        let off = HPoint::new(on.x, on.y * 1.5);
        assert!(hyp_distance(off, mobius_apply(&h, off)) > len + 1e-6);
    }

    #[test]
    fn composition_respected() {
        let a = ExactMatrix::from_integers(11, 5, -1, 11, -2).unwrap();
        let b = t_shift(11);
        let z = HPoint::new(0.13, 0.77);
        let lhs = mobius_apply(&a.mat_mul(&b).unwrap(), z);
        let rhs = mobius_apply(&a, mobius_apply(&b, z));
        assert_abs_diff_eq!(lhs.x, rhs.x, epsilon = 1e-12);
        assert_abs_diff_eq!(lhs.y, rhs.y, epsilon = 1e-12);
    }

    #[test]
    fn equidistant_formulas() {
        let g = Geodesic::Arc { center: 0.0, radius: 1.0 };
        let c = equidistant_curve(g, 0.0);
        assert_eq!(c.offset, 0.0);
        assert_abs_diff_eq!(c.boundary_angle, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
        let s = 0.55247;
        let l = 2.7036;
        assert_abs_diff_eq!(equidistant_length(l, s), l * s.cosh(), epsilon = 1e-15);
        assert_abs_diff_eq!(equidistant_area(l, s), l * s.sinh(), epsilon = 1e-15);
        // the offset curve really is at constant distance s
        let off = equidistant_curve(g, s);
        assert_abs_diff_eq!(off.boundary_angle.cos(), s.tanh(), epsilon = 1e-15);
    }

    #[test]
    fn geodesic_step_distance() {
        let z = HPoint::new(0.4, 1.9);
        for k in 0..8 {
            let theta = k as f64 * std::f64::consts::FRAC_PI_4;
            let w = geodesic_step(z, theta, 0.8);
            assert_abs_diff_eq!(hyp_distance(z, w), 0.8, epsilon = 1e-12);
        }
    }

    #[test]
    fn point_at_lies_on_geodesic_at_unit_speed() {
        let g = Geodesic::Arc { center: 0.3, radius: 2.0 };
        let mut prev = g.point_at(-1.0);
        for i in 1..=20 {
            let t = -1.0 + i as f64 * 0.1;
            let p = g.point_at(t);
            assert!(g.contains(p, 1e-12));
            assert_abs_diff_eq!(hyp_distance(prev, p), 0.1, epsilon = 1e-12);
            prev = p;
        }
    }

    #[test]
    fn distance_to_geodesic() {
        let g = Geodesic::Arc { center: 0.0, radius: 1.0 };
        assert_abs_diff_eq!(g.distance_to(HPoint::new(0.0, 1.0)), 0.0, epsilon = 1e-15);
        // vertical through the summit: distance ln 2 up the unit circle's
        // perpendicular from (0, 1) to (0, 2)
        let d = g.distance_to(HPoint::new(0.0, 2.0));
        assert_abs_diff_eq!(d, hyp_distance(HPoint::new(0.0, 1.0), HPoint::new(0.0, 2.0)), epsilon = 1e-12);
        let v = Geodesic::Vertical { x: 0.0 };
        assert_abs_diff_eq!(
            v.distance_to(HPoint::new(1.0, 1.0)),
            1f64.asinh(),
            epsilon = 1e-15
        );
    }
}
